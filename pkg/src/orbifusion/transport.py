"""Transport of intertwining operators between V-modules and sigma-twisted modules.

Forward:  Ybar(w^1, z) = Y(Delta_k(z) w, z^{1/k})
Inverse:  Y(w, z) = Ybar((Phi_k(z) w)^1, z^k),  Phi_k(z) = Delta_k(z^k)^{-1}

Both directions are coefficient providers with the same interface as the
Fock intertwiners, so they compose and can be transported again.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Optional, Sequence

from .boson import FockIntertwiner, FockModule, GradedVector, Partition, _apply_linear, coefficient
from .delta import apply_delta, apply_phi, verify_phi_conjugation
from .report import Check
from .series import binomial
from .twisted import TwistedModule


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@lru_cache(maxsize=None)
def _delta_of(k: int, charge: Fraction, p: Partition):
    return tuple(sorted(apply_delta(k, GradedVector.monomial(charge, p)).entries.items()))


@lru_cache(maxsize=None)
def _phi_of(k: int, charge: Fraction, p: Partition):
    return tuple(sorted(apply_phi(k, GradedVector.monomial(charge, p)).entries.items()))


class TransportedIntertwiner:
    """Ybar of type (T_sigma(W); M^1 T_sigma(N)) built from Y of type (W; M N).

    Insertions are vectors of M, standing for w^1 = w (x) 1 (x) ... (x) 1.
    """

    def __init__(self, base, k: int):
        self.base = base
        self.k = k
        self.inserted = base.inserted
        self.source = TwistedModule(base.source.charge, k)
        self.target = TwistedModule(base.target.charge, k)

    def insert_weight(self, w: Partition) -> Fraction:
        return self.inserted.weight(w)

    def lowest(self, w: Partition, s: Partition) -> Fraction:
        return self.target.min_weight - self.insert_weight(w) - self.source.weight(s)

    def coeff(self, w: Partition, a, s: Partition) -> GradedVector:
        a = _frac(a)
        out = GradedVector.zero(self.target.charge)
        for p, wd in _delta_of(self.k, self.inserted.charge, tuple(w)):
            e = self.k * (a - p)
            for m, c in wd.terms.items():
                img = self.base.coeff(m, e, s)
                if img:
                    out = out + img * c
        return out

    def apply(self, w, a, s: GradedVector) -> GradedVector:
        return _apply_linear(self, w, a, s)

    def __repr__(self):
        return f"TransportedIntertwiner({self.base!r}, k={self.k})"


class InverseTransport:
    """Y(w, z) = Ybar((Phi_k(z) w)^1, z^k) of type (W; M N) from Ybar of type
    (T_sigma(W); M^1 T_sigma(N))."""

    def __init__(self, twisted, k: int):
        self.twisted = twisted
        self.k = k
        self.inserted = twisted.inserted
        self.source = FockModule(twisted.source.charge)
        self.target = FockModule(twisted.target.charge)

    def insert_weight(self, w: Partition) -> Fraction:
        return self.inserted.weight(w)

    def lowest(self, w: Partition, s: Partition) -> Fraction:
        return self.target.min_weight - self.insert_weight(w) - self.source.weight(s)

    def coeff(self, w: Partition, a, s: Partition) -> GradedVector:
        a = _frac(a)
        out = GradedVector.zero(self.target.charge)
        for q, wd in _phi_of(self.k, self.inserted.charge, tuple(w)):
            b = (a - q) / self.k
            for m, c in wd.terms.items():
                img = self.twisted.coeff(m, b, s)
                if img:
                    out = out + img * c
        return out

    def apply(self, w, a, s: GradedVector) -> GradedVector:
        return _apply_linear(self, w, a, s)

    def __repr__(self):
        return f"InverseTransport({self.twisted!r}, k={self.k})"


class ModuleMapInsertion:
    """Y_{T_sigma(N)}(u^1, z) viewed as an intertwiner of type (T(N); V^1 T(N))."""

    def __init__(self, action):
        from .twisted import TensorVector  # noqa: F401  (documented dependency)
        self.action = action
        self.k = action.k
        self.inserted = FockModule(0)
        self.source = self.target = action.module

    def insert_weight(self, w: Partition) -> Fraction:
        return Fraction(sum(w))

    def lowest(self, w, s):
        return self.target.min_weight - self.insert_weight(w) - self.source.weight(s)

    def coeff(self, w: Partition, a, s: Partition) -> GradedVector:
        key = (tuple(w),) + ((),) * (self.k - 1)
        return self.action.coeff(key, a, s)

    def apply(self, w, a, s):
        return _apply_linear(self, w, a, s)


def transport_forward(base, k: int) -> TransportedIntertwiner:
    return TransportedIntertwiner(base, k)


def transport_inverse(twisted, k: int) -> InverseTransport:
    return InverseTransport(twisted, k)


def lowest_exponents(family, w: Partition, s: Partition, count: int) -> list:
    lo = family.lowest(w, s)
    step = family.target.step
    return [lo + i * step for i in range(count)]


def compare_families(name: str, left, right, insertions: Sequence[Partition], sources: Sequence[Partition],
                     count: int = 30, params: Optional[dict] = None) -> Check:
    """Compare two families on the ``count`` lowest exponents for every (w, s)."""
    checked = 0
    for w in insertions:
        for s in sources:
            for a in lowest_exponents(left, w, s, count):
                x, y = left.coeff(w, a, s), right.coeff(w, a, s)
                checked += 1
                if x != y:
                    return Check(name, False, {"exponents": count}, checked,
                                 {"w": w, "s": s, "exponent": a, "left": x, "right": y}, params or {})
    return Check(name, True, {"exponents": count}, checked, None, params or {})


# ---------------------------------------------------------------------------
# commutator formula and weak associativity for the inverse transport
# ---------------------------------------------------------------------------

def _lattice(lo: Fraction, count: int, step=Fraction(1)):
    """``count`` points lo, lo + step, ... (kept in the exponent class of ``lo``)."""
    return [lo + i * step for i in range(count)]


def pole_bound(u: GradedVector, w: GradedVector) -> int:
    """1 + max{j >= 0 : u_j w != 0} (0 if none)."""
    from .boson import mode
    top = int(u.weights()[-1]) + 1 if u else 0
    m = 0
    for j in range(top + 1):
        if mode(u, j, w):
            m = j + 1
    return m


def verify_transport_commutator(Y, u: GradedVector, w: GradedVector, a_vec: GradedVector, count: int = 5) -> Check:
    """[Y_W(u,z1), Y(w,z2)] a = Res_z0 z2^{-1} delta((z1-z0)/z2) Y(Y_M(u,z0)w, z2) a,
    coefficientwise: [z1^p z2^q] of the right side is
    sum_j C(-p-1, j) [z2^{q+p+1+j}] Y(u_j w, z2) a."""
    YW = FockIntertwiner(0, Y.target.charge)
    YN = FockIntertwiner(0, Y.source.charge)
    J = pole_bound(u, w)
    low_w = min(Y.lowest(m, s) for m in w.terms for s in a_vec.terms)
    low_u = min(YN.lowest(m, s) for m in u.terms for s in a_vec.terms)
    checked = 0
    for p in _lattice(low_u - count, 2 * count + 1):
        for q in _lattice(low_w - count, 2 * count + 1):
            inner = Y.apply(w, q, a_vec)
            left = YW.apply(u, p, inner) if inner else GradedVector.zero(Y.target.charge)
            inner = YN.apply(u, p, a_vec)
            if inner:
                left = left - Y.apply(w, q, inner)
            right = GradedVector.zero(Y.target.charge)
            for j in range(J):
                uw = coefficient(u, -j - 1, w)
                if uw:
                    right = right + Y.apply(uw, q + p + 1 + j, a_vec) * binomial(-p - 1, j)
            checked += 1
            if left != right:
                return Check("transport commutator formula", False, {"span": count}, checked,
                             {"z1": p, "z2": q, "left": left, "right": right}, {"u": u, "w": w, "a": a_vec})
    return Check("transport commutator formula", True, {"span": count}, checked, None, {"u": u, "w": w, "a": a_vec})


def verify_transport_associativity(Y, u: GradedVector, w: GradedVector, a_vec: GradedVector, count: int = 4) -> Check:
    """(z0+z2)^n Y_W(u,z0+z2)Y(w,z2)a = (z2+z0)^n Y(Y_M(u,z0)w,z2)a with n = -low(Y_N(u,z)a)."""
    YW = FockIntertwiner(0, Y.target.charge)
    YN = FockIntertwiner(0, Y.source.charge)
    n = max(0, -min(YN.lowest(m, s) for m in u.terms for s in a_vec.terms))
    n = int(ceil(n))
    low_f = min(Y.lowest(m, s) for m in w.terms for s in a_vec.terms)
    checked = 0
    for c in range(count + 1):
        for b in _lattice(low_f - count, 2 * count + 1):
            # left: sum over f <= b with e = c + b - f - n, weight C(n+e, b-f)
            left = GradedVector.zero(Y.target.charge)
            f = low_f
            while f <= b:
                e = c + b - f - n
                coef = binomial(Fraction(n) + e, int(b - f)) if (b - f).denominator == 1 else 0
                if coef:
                    inner = Y.apply(w, f, a_vec)
                    if inner:
                        piece = YW.apply(u, e, inner)
                        if piece:
                            left = left + piece * coef
                f += 1
            right = GradedVector.zero(Y.target.charge)
            for i in range(n + 1):
                uw = coefficient(u, c - i, w)
                if uw:
                    right = right + Y.apply(uw, b - n + i, a_vec) * binomial(Fraction(n), i)
            checked += 1
            if left != right:
                return Check("transport weak associativity", False, {"z0": count}, checked,
                             {"z0": c, "z2": b, "left": left, "right": right}, {"u": u, "w": w, "a": a_vec, "n": n})
    return Check("transport weak associativity", True, {"z0": count}, checked, None,
                 {"u": u, "w": w, "a": a_vec, "n": n})


def verify_delta_property(k: int, u: GradedVector, w: GradedVector, cutoff=4) -> Check:
    """Y(Phi_k(z2+z0)u, (z2+z0)^k - z2^k) Phi_k(z2) w = Phi_k(z2) Y(u,z0) w."""
    chk = verify_phi_conjugation(k, u, w, cutoff)
    chk.name = "delta property"
    return chk
