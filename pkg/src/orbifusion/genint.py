"""Generalized intertwining operators phi(x) between twisted modules and the
weak-module action Y_H(u, z) on them.

A generalized intertwiner here is any object with

    source, target   twisted modules (weight, min_weight, step, k)
    top              largest L(0)-degree of phi (phi_a raises weight by top + a)
    floor            lowest weight of the module the inserted vectors come from
    coeff(a, s)      coefficient of x**a applied to a source monomial s

The action u^H_n phi is evaluated from the residue formula

    Res_x1 sum_j C(-r/T, j) x^{-r/T-j} x1^{r/T}
        ((x1-x)^{n+j} Y_3(u,x1) phi(x) - (-x+x1)^{n+j} phi(x) Y_2(u,x1))

per eta-eigencomponent u in V^r; the j-sum stops at the weak-commutativity
order K, since the bracket vanishes once n + j >= K.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil
from typing import Dict, Optional, Sequence, Tuple

from .boson import FockModule, GradedVector, Partition, mode, module_basis
from .report import Check
from .series import binomial
from .transport import TransportedIntertwiner
from .twisted import (TensorVector, TwistedAction, TwistedModule, eigencomponent,
                      expected_twisted_virasoro)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _sign(n) -> int:
    return -1 if int(n) % 2 else 1


class GeneralizedIntertwiner:
    """phi(x) = I(w, x) for a fixed vector w and an intertwiner family I."""

    def __init__(self, family, w: GradedVector):
        if isinstance(family.target, FockModule):
            family = TransportedIntertwiner(family, 1)
        self.family = family
        self.w = w
        self.source: TwistedModule = family.source
        self.target: TwistedModule = family.target
        self.k = self.target.k
        ws = w.weights() if w else [Fraction(0)]
        self.top = max(ws)
        self.floor = family.inserted.min_weight
        self._cache: Dict = {}

    def lowest(self, s: Partition) -> Fraction:
        return self.target.min_weight - self.top - self.source.weight(s)

    def coeff(self, a, s: Partition) -> GradedVector:
        key = (_frac(a), tuple(s))
        hit = self._cache.get(key)
        if hit is None:
            hit = GradedVector.zero(self.target.charge)
            for m, c in self.w.terms.items():
                img = self.family.coeff(m, key[0], key[1])
                if img:
                    hit = hit + img * c
            self._cache[key] = hit
        return hit

    def apply(self, a, vec: GradedVector) -> GradedVector:
        out = GradedVector.zero(self.target.charge)
        for s, c in vec.terms.items():
            img = self.coeff(a, s)
            if img:
                out = out + img * c
        return out

    def __repr__(self):
        return f"GeneralizedIntertwiner({self.family!r}, w={self.w!r})"


def from_intertwiner(family, w: GradedVector) -> GeneralizedIntertwiner:
    return GeneralizedIntertwiner(family, w)


def weak_commutativity_order(u: TensorVector, phi) -> int:
    """Weight bound for the order K in (x1-x)^K [Y(u,x1), phi(x)] = 0."""
    top = max(u.weights()) if u else Fraction(0)
    return max(0, int(ceil(top + phi.top - phi.floor)))


class HImage:
    """u^H_n phi as a generalized intertwiner."""

    def __init__(self, u: TensorVector, n: int, phi, K: Optional[int] = None):
        self.u = u
        self.n = int(n)
        self.phi = phi
        self.source = phi.source
        self.target = phi.target
        self.k = phi.k
        self.K = weak_commutativity_order(u, phi) if K is None else int(K)
        self.top = (max(u.weights()) if u else 0) - self.n - 1 + phi.top
        self.floor = phi.floor
        self.act2 = TwistedAction(self.source)
        self.act3 = TwistedAction(self.target)
        self.parts = [(r, e) for r in range(self.k) for e in [eigencomponent(u, r)] if e]
        self._cache: Dict = {}

    def lowest(self, s: Partition) -> Fraction:
        return self.target.min_weight - self.top - self.source.weight(s)

    def _piece(self, e: TensorVector, r: int, a: Fraction, s: Partition) -> GradedVector:
        rT = Fraction(r, self.k)
        phi, n = self.phi, self.n
        out = GradedVector.zero(self.target.charge)
        svec = GradedVector.monomial(self.source.charge, s)
        lo_phi = phi.lowest(s)
        lo2 = min(self.act2.lowest(key, s) for key in e.terms)
        for j in range(max(0, self.K - n)):
            cj = binomial(-rT, j)
            N = n + j
            # (x1 - x)^N Y_3(u, x1) phi(x)
            l = 0
            while True:
                if N >= 0 and l > N:
                    break
                b = a + rT + j - l
                if b < lo_phi:
                    break
                vec = phi.coeff(b, s)
                if vec:
                    img = self.act3.apply(e, -1 - rT - N + l, vec)
                    if img:
                        out = out + img * (cj * binomial(N, l) * _sign(l))
                l += 1
            # (-x + x1)^N phi(x) Y_2(u, x1)
            top_l = int(ceil(-1 - rT - lo2))
            if N >= 0:
                top_l = min(top_l, N)
            for l in range(0, top_l + 1):
                vec = self.act2.apply(e, -1 - rT - l, svec)
                if vec:
                    img = phi.apply(a + rT + l - n, vec)
                    if img:
                        out = out - img * (cj * binomial(N, l) * _sign(N - l))
        return out

    def coeff(self, a, s: Partition) -> GradedVector:
        key = (_frac(a), tuple(s))
        hit = self._cache.get(key)
        if hit is None:
            hit = GradedVector.zero(self.target.charge)
            for r, e in self.parts:
                hit = hit + self._piece(e, r, key[0], key[1])
            self._cache[key] = hit
        return hit

    def apply(self, a, vec: GradedVector) -> GradedVector:
        out = GradedVector.zero(self.target.charge)
        for s, c in vec.terms.items():
            img = self.coeff(a, s)
            if img:
                out = out + img * c
        return out

    def __repr__(self):
        return f"HImage(n={self.n}, K={self.K}, u={self.u!r})"


def apply_YH(u: TensorVector, n: int, phi, K: Optional[int] = None) -> HImage:
    return HImage(u, n, phi, K)


# ---------------------------------------------------------------------------
# windows and comparisons
# ---------------------------------------------------------------------------

def sources(phi, depth: int) -> list:
    """Source monomials at most ``depth`` above the lowest weight."""
    base = FockModule(phi.source.charge)
    return module_basis(phi.source.charge, base.min_weight + depth)


def exponent_window(phi, s: Partition, count: int) -> list:
    lo = phi.lowest(s)
    return [lo + i * phi.target.step for i in range(count)]


def compare(name: str, left, right, degree_cap=1, count=8, params=None) -> Check:
    """Coefficientwise equality of two generalized intertwiners (right may be None for zero)."""
    checked = 0
    for s in sources(left, degree_cap):
        lo = left.lowest(s) if right is None else min(left.lowest(s), right.lowest(s))
        for i in range(count):
            a = lo + i * left.target.step
            x = left.coeff(a, s)
            y = right.coeff(a, s) if right is not None else GradedVector.zero(left.target.charge)
            checked += 1
            if x != y:
                return Check(name, False, {"degree": degree_cap, "exponents": count}, checked,
                             {"s": s, "exponent": a, "left": x, "right": y}, params or {})
    return Check(name, True, {"degree": degree_cap, "exponents": count}, checked, None, params or {})


def verify_vacuum_identity(phi, ns=range(-3, 3), degree_cap=1, count=6) -> list:
    """Y_H(1, z) = 1: 1^H_{-1} phi = phi and 1^H_n phi = 0 otherwise."""
    one = TensorVector.vacuum(phi.k)
    out = []
    for n in ns:
        img = HImage(one, n, phi)
        out.append(compare(f"Y_H(1) mode {n}", img, phi if n == -1 else None, degree_cap, count, {"n": n}))
    return out


def verify_vacuum_like(phi, u: GradedVector, slot: int, n: int, degree_cap=1, count=6) -> Check:
    """(u^i)^H_n phi = 0 for i != 1 and n >= 0, with phi transported from slot one."""
    img = HImage(TensorVector.single(u, slot, phi.k), n, phi)
    return compare("vacuum-like slot", img, None, degree_cap, count, {"slot": slot, "n": n, "u": u})


def verify_homomorphism(family, u: GradedVector, w: GradedVector, n: int, degree_cap=1, count=6) -> Check:
    """(u^1)^H_n Ybar(w^1, x) = Ybar((u_n w)^1, x)."""
    phi = GeneralizedIntertwiner(family, w)
    img = HImage(TensorVector.single(u, 1, phi.k), n, phi)
    rhs = GeneralizedIntertwiner(family, mode(u, n, w))
    rhs.top = img.top
    return compare("H homomorphism", img, rhs, degree_cap, count, {"u": u, "w": w, "n": n})


def verify_bracket(phi, degree_cap=1, count=6, name="L(-1) bracket") -> Check:
    """(G2): L(-1) phi_a - phi_a L(-1) = (a+1) phi_{a+1}."""
    T3, T2 = TwistedAction(phi.target), TwistedAction(phi.source)
    checked = 0
    for s in sources(phi, degree_cap):
        svec = GradedVector.monomial(phi.source.charge, s)
        ls = expected_twisted_virasoro(T2, -1, svec)
        for a in exponent_window(phi, s, count):
            a0 = a - 1
            left = expected_twisted_virasoro(T3, -1, phi.coeff(a0, s)) - phi.apply(a0, ls)
            right = phi.coeff(a0 + 1, s) * (a0 + 1)
            checked += 1
            if left != right:
                return Check(name, False, {"degree": degree_cap, "exponents": count}, checked,
                             {"s": s, "exponent": a0, "left": left, "right": right}, {})
    return Check(name, True, {"degree": degree_cap, "exponents": count}, checked, None, {})


def verify_weak_commutativity(phi, u: TensorVector, K: Optional[int] = None, degree_cap=1, count=6) -> Check:
    """(G3): (x1-x)^K (Y_3(u,x1) phi(x) - phi(x) Y_2(u,x1)) = 0 at truncation."""
    K = weak_commutativity_order(u, phi) if K is None else K
    T3, T2 = TwistedAction(phi.target), TwistedAction(phi.source)
    step = phi.target.step
    checked = 0
    for s in sources(phi, degree_cap):
        svec = GradedVector.monomial(phi.source.charge, s)
        lo_b = phi.lowest(s)
        lo_e = min(T2.lowest(key, s) for key in u.terms)
        for i in range(count):
            for t in range(count):
                e0 = lo_e + i * step - K
                b = lo_b + t * step
                acc = GradedVector.zero(phi.target.charge)
                for l in range(K + 1):
                    c = binomial(K, l) * _sign(l)
                    e = e0 + l
                    acc = acc + T3.apply(u, e, phi.coeff(b - l, s)) * c
                    acc = acc - phi.apply(b - l, T2.apply(u, e, svec)) * c
                checked += 1
                if acc:
                    return Check("weak commutativity order", False, {"K": K, "window": count}, checked,
                                 {"s": s, "x1": e0 + K, "x": b, "residual": acc}, {"u": u})
    return Check("weak commutativity order", True, {"K": K, "window": count}, checked, None, {"u": u})


def verify_technical_identity(phi, u: TensorVector, r: int, K: Optional[int] = None,
                              cutoff=4, degree_cap=1, count=4) -> Check:
    """z^K (x+z)^{r/T} Y_H(u,z) phi(x) = ((x1-x)^K x1^{r/T} Y_3(u,x1) phi(x))|_{x1=x+z}
    for u in V^r, compared at z^c x^a."""
    K = weak_commutativity_order(u, phi) if K is None else K
    rT = Fraction(r, phi.k)
    T3, T2 = TwistedAction(phi.target), TwistedAction(phi.source)
    modes = {}

    def H(n):
        if n not in modes:
            modes[n] = HImage(u, n, phi, K)
        return modes[n]

    checked = 0
    for s in sources(phi, degree_cap):
        lo_b = phi.lowest(s)
        m0 = int(ceil(min(T2.lowest(key, s) for key in u.terms) + rT))
        lo_a = H(K - 1).lowest(s) + rT
        for c in range(cutoff + 1):
            for t in range(count):
                a = lo_a - c + t * phi.target.step
                left = GradedVector.zero(phi.target.charge)
                for i in range(c + 1):
                    left = left + H(K + i - c - 1).coeff(a - rT + i, s) * binomial(rT, i)
                right = GradedVector.zero(phi.target.charge)
                m = m0
                while a + c - m >= lo_b:
                    b = a + c - m
                    cm = binomial(m, c)
                    if cm:
                        for l in range(K + 1):
                            vec = phi.coeff(b - l, s)
                            if vec:
                                img = T3.apply(u, m - rT - K + l, vec)
                                if img:
                                    right = right + img * (cm * binomial(K, l) * _sign(l))
                    m += 1
                checked += 1
                if left != right:
                    return Check("technical substitution identity", False,
                                 {"cutoff": cutoff, "exponents": count}, checked,
                                 {"s": s, "z": c, "x": a, "left": left, "right": right}, {"u": u, "r": r, "K": K})
    return Check("technical substitution identity", True, {"cutoff": cutoff, "exponents": count}, checked, None,
                 {"u": u, "r": r, "K": K})


def verify_H_axioms(u: TensorVector, v: TensorVector, phi, cutoff=4, degree_cap=1, count=4) -> list:
    """Technical identity for every eigencomponent of u, the L(-1) bracket on
    v^H_n phi, and weak commutativity of phi with u."""
    out = []
    for r in range(phi.k):
        e = eigencomponent(u, r)
        if e:
            out.append(verify_technical_identity(phi, e, r, cutoff=cutoff, degree_cap=degree_cap, count=count))
    K = weak_commutativity_order(v, phi)
    for n in range(K - 2, K + 1):
        out.append(verify_bracket(HImage(v, n, phi), degree_cap, count, name=f"L(-1) bracket on v_{n} phi"))
    out.append(verify_weak_commutativity(phi, u, degree_cap=degree_cap, count=count))
    return out
