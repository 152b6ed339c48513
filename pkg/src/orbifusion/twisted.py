"""Twisted modules T_sigma(W) for sigma = (1 2 ... k) acting on M(1)^{(x)k}.

Y_T(u^1, z) = Y_W(Delta_k(z) u, z^{1/k}); the slot-j operator is obtained from
slot 1 by z^{1/k} -> eta_k^{1-j} z^{1/k}, applied to stored exponents.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .boson import (Contragredient, FockModule, GradedVector, Partition, _apply_linear,
                    _mode, conformal_vector, module_basis, partitions, virasoro)
from .cyclotomic import Cyc, normalize, root_of_unity
from .delta import apply_delta
from .report import Check
from .series import binomial

Key = Tuple[Partition, ...]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TensorVector:
    """A finite combination of pure tensors in M(1)^{(x)k}; keys are k-tuples of partitions."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: Optional[dict] = None):
        self.k = k
        clean = {}
        for key, c in (terms or {}).items():
            c = normalize(c)
            if c:
                if len(key) != k:
                    raise ValueError("key length must equal k")
                clean[tuple(tuple(p) for p in key)] = c
        self.terms = clean

    @classmethod
    def single(cls, u: GradedVector, slot: int, k: int) -> "TensorVector":
        """u^slot = 1 (x) ... (x) u (x) ... (x) 1 (slots are 1-based)."""
        if u.charge != 0:
            raise ValueError("tensor slots hold vectors of M(1)")
        if not 1 <= slot <= k:
            raise ValueError(f"slot must lie in 1..{k}")
        terms = {}
        for m, c in u.terms.items():
            key = [()] * k
            key[slot - 1] = m
            terms[tuple(key)] = c
        return cls(k, terms)

    @classmethod
    def vacuum(cls, k: int) -> "TensorVector":
        return cls(k, {((),) * k: Fraction(1)})

    def weight_of(self, key: Key) -> Fraction:
        return Fraction(sum(sum(p) for p in key))

    def weights(self) -> list:
        return sorted({self.weight_of(key) for key in self.terms})

    def weight(self) -> Fraction:
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError("vector is not homogeneous")
        return ws[0]

    def permute(self, perm: Sequence[int]) -> "TensorVector":
        """Move slot i to slot perm[i-1] (perm given as 1-based images)."""
        out = {}
        for key, c in self.terms.items():
            new = [()] * self.k
            for i, p in enumerate(key):
                new[perm[i] - 1] = p
            out[tuple(new)] = c
        return TensorVector(self.k, out)

    def sigma(self, power: int = 1) -> "TensorVector":
        """The cyclic permutation u^j -> u^{j+1}, applied ``power`` times."""
        perm = [((i + power) % self.k) + 1 for i in range(self.k)]
        return self.permute(perm)

    def slot_L(self, n: int) -> "TensorVector":
        """The Virasoro operator L(n) of the tensor product (sum over slots)."""
        out = TensorVector(self.k)
        for key, c in self.terms.items():
            for i, p in enumerate(key):
                img = virasoro(n, GradedVector.monomial(0, p))
                for m, f in img.terms.items():
                    nk = list(key)
                    nk[i] = m
                    out = out + TensorVector(self.k, {tuple(nk): c * f})
        return out

    def __add__(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        if other.k != self.k:
            raise ValueError("tensor length mismatch")
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms[key] + c if key in terms else c
        return TensorVector(self.k, terms)

    def __neg__(self):
        return TensorVector(self.k, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if not isinstance(s, (int, Fraction, Cyc)):
            return NotImplemented
        return TensorVector(self.k, {key: c * s for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        return self.k == other.k and not (self - other).terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in sorted(self.terms.items()):
            slots = "(x)".join("".join(f"a({-n})" for n in p) or "1" for p in key)
            parts.append(f"({c}){slots}")
        return " + ".join(parts)


def conformal_tensor(k: int) -> TensorVector:
    """omega^{(k)} = omega^1 + ... + omega^k."""
    w = conformal_vector()
    out = TensorVector(k)
    for j in range(1, k + 1):
        out = out + TensorVector.single(w, j, k)
    return out


def eigencomponent(u: TensorVector, r: int) -> TensorVector:
    """u^{(r)} = (1/k) sum_j eta_k^{-jr} sigma^j u, the eta_k^r-eigencomponent."""
    k = u.k
    out = TensorVector(k)
    for j in range(k):
        out = out + u.sigma(j) * root_of_unity(k, -j * r)
    return out * Fraction(1, k)


def single_slot(key: Key) -> Tuple[int, Partition]:
    """(slot, partition) of a key with at most one non-vacuum slot; vacuum -> slot 1."""
    busy = [i for i, p in enumerate(key) if p]
    if not busy:
        return 1, ()
    if len(busy) > 1:
        raise NotImplementedError("only single-slot insertions are supported")
    return busy[0] + 1, key[busy[0]]


# ---------------------------------------------------------------------------
# the twisted module
# ---------------------------------------------------------------------------

_img_lock = threading.Lock()
_img_cache: Dict[Tuple[int, Partition], Tuple[Tuple[Fraction, GradedVector], ...]] = {}


def _delta_monomial(k: int, p: Partition):
    key = (k, p)
    with _img_lock:
        hit = _img_cache.get(key)
    if hit is None:
        hit = tuple(sorted(apply_delta(k, GradedVector.monomial(0, p)).entries.items()))
        with _img_lock:
            _img_cache[key] = hit
    return hit


@lru_cache(maxsize=None)
def _slot_one(k: int, lam: Fraction, p: Partition, a: Fraction, s: Partition):
    """Coefficient of z**a in Y_W(Delta_k(z) u, z^{1/k}) s for the monomial u = p."""
    terms: dict = {}
    for e0, ud in _delta_monomial(k, p):
        e = k * (a - e0)
        if e.denominator != 1:
            continue
        for um, uc in ud.terms.items():
            for mm, f in _mode(Fraction(0), um, -e - 1, lam, s):
                terms[mm] = terms.get(mm, 0) + uc * f
    return tuple((m, c) for m, c in terms.items() if c)


@dataclass(frozen=True)
class TwistedModule:
    """T_sigma(M(1,charge)) for sigma = (1 2 ... k); monomials are those of M(1,charge)."""

    charge: Fraction
    k: int
    central_charge: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "charge", _frac(self.charge))

    @property
    def step(self) -> Fraction:
        return Fraction(1, self.k)

    @property
    def shift(self) -> Fraction:
        return self.central_charge / 24 * (self.k - Fraction(1, self.k))

    @property
    def base(self) -> FockModule:
        return FockModule(self.charge)

    @property
    def min_weight(self) -> Fraction:
        return self.base.min_weight / self.k + self.shift

    def weight(self, m: Partition) -> Fraction:
        """L_T(0)-eigenvalue of a monomial: wt/k + (c/24)(k - 1/k)."""
        return self.base.weight(m) / self.k + self.shift

    def monomials_of_weight(self, weight) -> list:
        depth = (_frac(weight) - self.min_weight) * self.k
        if depth < 0 or depth.denominator != 1:
            return []
        return list(partitions(int(depth)))

    def basis(self, degree_cap) -> list:
        """Monomials with base weight at most ``degree_cap``."""
        return module_basis(self.charge, degree_cap)

    @property
    def twist(self) -> Tuple[int, ...]:
        return tuple(((i + 1) % self.k) + 1 for i in range(self.k))


class TwistedAction:
    """Y_{T_sigma(W)}(.,z) as an operator family on T_sigma(M(1,charge))."""

    def __init__(self, module: TwistedModule):
        self.module = module
        self.source = module
        self.target = module
        self.k = module.k

    # family interface --------------------------------------------------
    def insert_weight(self, key) -> Fraction:
        if isinstance(key, TensorVector):
            return key.weight()
        return Fraction(sum(sum(p) for p in key))

    def lowest(self, key: Key, s: Partition) -> Fraction:
        return self.module.min_weight - self.insert_weight(key) - self.module.weight(s)

    def coeff(self, key: Key, a, s: Partition) -> GradedVector:
        """Coefficient of z**a in Y_T(key, z) s."""
        a = _frac(a)
        slot, p = single_slot(key)
        k = self.k
        ka = k * a
        if ka.denominator != 1:
            return GradedVector.zero(self.module.charge)
        vec = GradedVector(self.module.charge, dict(_slot_one(k, self.module.charge, p, a, tuple(s))))
        phase = root_of_unity(k, (1 - slot) * int(ka))
        return vec * phase if phase != 1 else vec

    def apply(self, u, a, vec: GradedVector) -> GradedVector:
        return _apply_linear(self, u, a, vec)

    # contragredient hooks ----------------------------------------------
    def as_vector(self, v):
        return v

    def source_vector(self, m: Partition) -> GradedVector:
        return GradedVector.monomial(self.module.charge, m)

    def insertion_L1(self, v: TensorVector) -> TensorVector:
        return v.slot_L(1)

    def __repr__(self):
        return f"TwistedAction(k={self.k}, charge={self.module.charge})"


def twisted_module(charge, k: int) -> TwistedAction:
    return TwistedAction(TwistedModule(_frac(charge), k))


def twisted_vertex(T: TwistedAction, u: GradedVector, slot: int, exponents, degree_cap) -> Dict[Fraction, Dict[Partition, GradedVector]]:
    """Coefficients of Y_T(u^slot, z) at the given exponents on monomials of base
    weight at most ``degree_cap``."""
    vec = TensorVector.single(u, slot, T.k)
    out: Dict[Fraction, Dict[Partition, GradedVector]] = {}
    for a in exponents:
        a = _frac(a)
        for s in T.module.basis(degree_cap):
            img = T.apply(vec, a, GradedVector.monomial(T.module.charge, s))
            if img:
                out.setdefault(a, {})[s] = img
    return out


def twisted_virasoro(T: TwistedAction, n: int, s: GradedVector) -> GradedVector:
    """L_T(n) s, extracted from the coefficient of z^{-n-2} in Y_T(omega^{(k)}, z)."""
    return T.apply(conformal_tensor(T.k), Fraction(-n - 2), s)


def expected_twisted_virasoro(T: TwistedAction, n: int, s: GradedVector) -> GradedVector:
    """(1/k)L(nk) s for n != 0 and (1/k)L(0)s + (c/24)(k - 1/k)s for n = 0."""
    k = T.k
    out = virasoro(n * k, s) * Fraction(1, k)
    if n == 0:
        out = out + s * T.module.shift
    return out


def ground_weight(T: TwistedAction) -> Fraction:
    hw = GradedVector.monomial(T.module.charge, ())
    img = twisted_virasoro(T, 0, hw)
    return img.terms.get((), Fraction(0))


# ---------------------------------------------------------------------------
# twisted Jacobi identity in commutativity / associativity form
# ---------------------------------------------------------------------------

def pole_order(u: GradedVector, v: GradedVector) -> int:
    """1 + max{n >= 0 : u_n v != 0} in M(1), or 0 if all vanish."""
    from .boson import mode
    top = u.weights()[-1] + v.weights()[-1] if u and v else 0
    m = 0
    for n in range(int(top) + 1):
        if mode(u, n, v):
            m = n + 1
    return m


def _lattice(lo: Fraction, hi: Fraction, step: Fraction):
    a = ceil(lo / step) * step
    while a <= hi:
        yield a
        a += step


def _low(T: TwistedAction, vec: TensorVector, w: GradedVector) -> Fraction:
    return min(T.lowest(key, s) for key in vec.terms for s in w.terms)


def _product_coefficient(T, U, V, m, a1, a2, w, swap=False):
    """[z1^a1 z2^a2] (z1-z2)^m Y(U,z1)Y(V,z2) w (or Y(V,z2)Y(U,z1) w when swap)."""
    out = w * 0
    for t in range(m + 1):
        c = binomial(Fraction(m), t) * (-1) ** t
        e1, e2 = a1 - m + t, a2 - t
        if swap:
            inner = T.apply(U, e1, w)
            piece = T.apply(V, e2, inner) if inner else inner
        else:
            inner = T.apply(V, e2, w)
            piece = T.apply(U, e1, inner) if inner else inner
        if piece:
            out = out + piece * c
    return out


def verify_commutativity(T, u: GradedVector, i: int, v: GradedVector, j: int,
                         w, cutoff=3, m: Optional[int] = None, name="twisted commutativity") -> Check:
    """(z1-z2)^m [Y(u^i,z1), Y(v^j,z2)] w = 0 on an exponent grid.

    By default m = 1 + max{n : u_n v != 0}.  In a twisted module this order is
    needed across slots too, since u^i is not a sigma-eigenvector; pass m=0 to
    test a plain commutator.
    """
    k = T.k
    U, V = TensorVector.single(u, i, k), TensorVector.single(v, j, k)
    if m is None:
        m = pole_order(u, v)
    step = T.module.step
    cutoff = _frac(cutoff)
    A1, A2 = _low(T, U, w), _low(T, V, w)
    top = T.module.min_weight + cutoff
    wt = u.weight() + v.weight() + max(T.module.weight(s) for s in w.terms)
    count = 0
    for a1 in _lattice(A1 - cutoff, A1 + cutoff, step):
        for a2 in _lattice(A2 - cutoff, A2 + cutoff, step):
            if wt + a1 + a2 > top:
                continue
            count += 1
            left = _product_coefficient(T, U, V, m, a1, a2, w)
            right = _product_coefficient(T, U, V, m, a1, a2, w, swap=True)
            if left != right:
                return Check(name, False, {"cutoff": cutoff}, count,
                             {"z1": a1, "z2": a2, "left": left, "right": right},
                             {"k": k, "u": u, "i": i, "v": v, "j": j, "m": m})
    return Check(name, True, {"cutoff": cutoff}, count, None,
                 {"k": k, "u": u, "i": i, "v": v, "j": j, "m": m})


def verify_associativity(T: TwistedAction, u: GradedVector, v: GradedVector, slot: int,
                         w: GradedVector, cutoff=3) -> Check:
    """z0^m Y_T((Y(u,z0)v)^i, z2) w = (z1-z2)^m Y_T(u^i,z1)Y_T(v^i,z2) w |_{z1^{1/k}=(z2+z0)^{1/k}}.

    Compared for z0-exponents 0..cutoff and z2-exponents in a window of length
    ``cutoff`` above the lowest one.
    """
    from .boson import coefficient
    k = T.k
    U, V = TensorVector.single(u, slot, k), TensorVector.single(v, slot, k)
    m = pole_order(u, v)
    step = T.module.step
    cutoff = _frac(cutoff)
    A_min = _low(T, U, w)
    E2_min = _low(T, V, w)
    wt_uv = u.weight() + v.weight()
    top_w = max(T.module.weight(s) for s in w.terms)
    count = 0
    G: dict = {}

    def g(a1, a2):
        key = (a1, a2)
        if key not in G:
            G[key] = _product_coefficient(T, U, V, m, a1, a2, w)
        return G[key]

    for c in range(int(cutoff) + 1):
        inner = coefficient(u, c - m, v)  # coefficient of z0^{c-m} in Y(u,z0)v
        X = TensorVector.single(inner, slot, k) if inner else None
        # lowest z2 power of Y_T(X, z2) w, with wt X = wt u + wt v + c - m
        B_min = T.module.min_weight - top_w - (wt_uv + c - m)
        for b in _lattice(B_min, B_min + cutoff, step):
            left = T.apply(X, b, w) if X is not None else GradedVector.zero(w.charge)
            right = GradedVector.zero(w.charge)
            for a in _lattice(A_min, b + c - E2_min, step):
                coef = binomial(a, c)
                if coef:
                    piece = g(a, b - a + c)
                    if piece:
                        right = right + piece * coef
            count += 1
            if left != right:
                return Check("twisted associativity", False, {"cutoff": cutoff}, count,
                             {"z0": c, "z2": b, "left": left, "right": right},
                             {"k": k, "u": u, "v": v, "slot": slot, "m": m})
    return Check("twisted associativity", True, {"cutoff": cutoff}, count, None,
                 {"k": k, "u": u, "v": v, "slot": slot, "m": m})


def verify_slot_commutator(action, u: GradedVector, i: int, v: GradedVector, j: int, w, cutoff=3) -> Check:
    """[Y(u^i,z1), Y(v^j,z2)] w = 0 for i != j in an untwisted module of the tensor product."""
    if i == j:
        raise ValueError("slots must differ")
    return verify_commutativity(action, u, i, v, j, w, cutoff, m=0, name="cross-slot commutator")


def verify_twisted_jacobi(T: TwistedAction, u: GradedVector, i: int, v: GradedVector, j: int,
                          w: GradedVector, cutoff=3) -> list:
    """Weak commutativity for any slots; associativity for equal slots (the iterate of
    two different slots lies outside the single-slot insertions handled here)."""
    checks = [verify_commutativity(T, u, i, v, j, w, cutoff)]
    if i == j:
        checks.append(verify_associativity(T, u, v, i, w, cutoff))
    return checks


# ---------------------------------------------------------------------------
# untwisted tensor products and conjugation by permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TensorModule:
    """M(1,c_1) (x) ... (x) M(1,c_k); monomials are k-tuples of partitions."""

    charges: Tuple[Fraction, ...]

    step = Fraction(1)

    @property
    def k(self) -> int:
        return len(self.charges)

    @property
    def min_weight(self) -> Fraction:
        return sum((c * c / 2 for c in self.charges), Fraction(0))

    def weight(self, m: Key) -> Fraction:
        return self.min_weight + sum(sum(p) for p in m)


class TensorAction:
    """The untwisted action of M(1)^{(x)k} on a tensor product of Fock modules."""

    def __init__(self, charges: Sequence):
        self.module = TensorModule(tuple(_frac(c) for c in charges))
        self.source = self.target = self.module
        self.k = self.module.k
        self.twist = tuple(range(1, self.k + 1))

    def insert_weight(self, key) -> Fraction:
        return Fraction(sum(sum(p) for p in key))

    def lowest(self, key: Key, s: Key) -> Fraction:
        return self.module.min_weight - self.insert_weight(key) - self.module.weight(s)

    def apply(self, u, a, vec: "TensorState") -> "TensorState":
        out = TensorState(self.module.charges, {})
        for key, c in u.terms.items():
            for s, d in vec.terms.items():
                out = out + self.coeff(key, a, s) * (c * d)
        return out

    def state(self, parts: Sequence[Partition] = None) -> "TensorState":
        parts = tuple(parts) if parts is not None else ((),) * self.k
        return TensorState(self.module.charges, {parts: Fraction(1)})

    def coeff(self, key: Key, a, s: Key) -> "TensorState":
        slot, p = single_slot(key)
        a = _frac(a)
        ch = self.module.charges
        out = {}
        for mm, f in _mode(Fraction(0), p, -a - 1, ch[slot - 1], s[slot - 1]):
            new = list(s)
            new[slot - 1] = mm
            out[tuple(new)] = f
        return TensorState(ch, out)


class TensorState:
    """A vector of a tensor product of Fock modules (k-tuple of partitions -> coefficient)."""

    __slots__ = ("charges", "terms")

    def __init__(self, charges, terms):
        self.charges = tuple(charges)
        self.terms = {key: normalize(c) for key, c in terms.items() if c}

    def __add__(self, other):
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms[key] + c if key in terms else c
        return TensorState(self.charges, terms)

    def __neg__(self):
        return TensorState(self.charges, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return TensorState(self.charges, {key: c * s for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorState):
            return NotImplemented
        return self.charges == other.charges and not (self - other).terms

    __hash__ = None

    def __repr__(self):
        return f"TensorState({self.terms})"


class ConjugateAction:
    """W^mu: the same space with Y^mu(u, z) = Y(mu(u), z).

    ``perm`` lists 1-based images, mu(u^i) = u^{mu(i)}.  A sigma-twisted W gives
    a mu^{-1} sigma mu-twisted W^mu.
    """

    def __init__(self, action, perm: Sequence[int]):
        self.base = action
        self.perm = tuple(perm)
        self.k = action.k
        if sorted(self.perm) != list(range(1, self.k + 1)):
            raise ValueError("not a permutation")
        self.source, self.target, self.module = action.source, action.target, action.module
        inv = [0] * self.k
        for i, p in enumerate(self.perm):
            inv[p - 1] = i + 1
        self.inverse_perm = tuple(inv)
        tw = getattr(action, "twist", None) or action.module.twist
        # mu^{-1} tau mu as image tuple
        self.twist = tuple(inv[tw[self.perm[i] - 1] - 1] for i in range(self.k))

    def _move(self, key: Key) -> Key:
        new = [()] * self.k
        for i, p in enumerate(key):
            new[self.perm[i] - 1] = p
        return tuple(new)

    def insert_weight(self, key):
        return self.base.insert_weight(key)

    def lowest(self, key, s):
        return self.base.lowest(self._move(key), s)

    def coeff(self, key: Key, a, s):
        return self.base.coeff(self._move(key), a, s)

    def apply(self, u, a, vec):
        out = vec * 0
        for key, c in u.terms.items():
            for s, d in vec.terms.items():
                img = self.coeff(key, a, s)
                if img:
                    out = out + img * (c * d)
        return out


def conjugate_module(action, perm: Sequence[int]):
    """W^mu for a permutation mu given as 1-based images."""
    perm = tuple(perm)
    if perm == tuple(range(1, len(perm) + 1)):
        return action
    return ConjugateAction(action, perm)


def twisted_contragredient(T: TwistedAction) -> Contragredient:
    """The contragredient of T_sigma(W); it is twisted by sigma^{-1}."""
    return Contragredient(T)
