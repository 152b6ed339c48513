"""The operators Delta_k(z), Delta_k(z)^{-1} and Phi_k(z) = Delta_k(z^k)^{-1}.

Delta_k(z) = exp(sum_n a_n z^{-n/k} L(n)) k^{-L(0)} z^{(1/k-1)L(0)}, where the
a_n are fixed by exp(-sum_n a_n x^{n+1} d/dx) x = ((1+x)^k - 1)/k.

On a vector of finite weight every image is a finite sum, stored as a map
exponent -> GradedVector.  On M(1,lam) the scalar k^{-L(0)} is taken relative
to the lowest weight lam^2/2 (k^{-lam^2/2} is irrational in general); all
identities below are homogeneous in that constant.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Tuple

from .boson import GradedVector, coefficient, virasoro
from .report import Check, compare_maps, compare_series
from .series import PuiseuxSeries, binomial, binomial_root_difference, power_difference

_lock = threading.Lock()
_cache: Dict[Tuple[int, int], "DeltaCoefficients"] = {}


@dataclass(frozen=True)
class DeltaCoefficients:
    k: int
    a: Tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        """a_n, 1-based."""
        return self.a[n - 1] if 1 <= n <= len(self.a) else Fraction(0)


def _poly_mul(p, q, top):
    out = [Fraction(0)] * (top + 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q[: top + 1 - i]):
                out[i + j] += x * y
    return out


def flow(a, top: int) -> list:
    """exp(-sum_n a_n x^{n+1} d/dx) x as coefficients through x**top."""
    def D(p):
        dp = [Fraction(i) * c for i, c in enumerate(p)][1:] + [Fraction(0)]
        out = [Fraction(0)] * (top + 1)
        for n, an in enumerate(a, start=1):
            if an:
                for i, c in enumerate(dp):
                    if c and i + n + 1 <= top:
                        out[i + n + 1] -= an * c
        return out

    term = [Fraction(0)] * (top + 1)
    term[1] = Fraction(1)
    total = list(term)
    m = 1
    while any(term):
        term = [c / m for c in D(term)]
        total = [x + y for x, y in zip(total, term)]
        m += 1
    return total


def solve_an(k: int, N: int) -> DeltaCoefficients:
    """The unique a_1..a_N, by forward coefficient matching at x^{n+1}."""
    if k < 1 or N < 1:
        raise ValueError("k and N must be positive")
    with _lock:
        hit = _cache.get((k, N))
    if hit is not None:
        return hit
    a: list = []
    for n in range(1, N + 1):
        # a_n enters x^{n+1} linearly with coefficient -1
        c = flow(a + [Fraction(0)], n + 1)[n + 1]
        a.append(c - Fraction(comb(k, n + 1), k))
    out = DeltaCoefficients(k, tuple(a))
    with _lock:
        _cache[(k, N)] = out
    return out


# ---------------------------------------------------------------------------
# images of vectors
# ---------------------------------------------------------------------------

@dataclass
class DeltaImage:
    """A finite z-series of homogeneous vectors."""

    k: int
    vector: GradedVector
    entries: Dict[Fraction, GradedVector]
    kind: str = "delta"

    def series(self, var: str = "z") -> PuiseuxSeries:
        return PuiseuxSeries((var,), {(e,): v for e, v in self.entries.items()})

    def __eq__(self, other):
        if isinstance(other, DeltaImage):
            other = other.entries
        if not isinstance(other, dict):
            return NotImplemented
        return bool(compare_maps("image", self.entries, other).passed)


def _add(d: dict, e, v: GradedVector) -> None:
    if e in d:
        d[e] = d[e] + v
    else:
        d[e] = v


def _clean(d: dict) -> dict:
    return {e: v for e, v in d.items() if v}


def _depth_bound(v: GradedVector) -> int:
    return max((sum(m) for m in v.terms), default=0)


def _exp_virasoro(v: GradedVector, coeffs, sign: int, power_of_z) -> dict:
    """exp(sign * sum_n a_n z^{power_of_z(n)} L(n)) v as exponent -> vector."""
    out: dict = {Fraction(0): v}
    layer: dict = {Fraction(0): v}
    m = 0
    top = _depth_bound(v)
    while layer:
        m += 1
        nxt: dict = {}
        for e, vec in layer.items():
            for n in range(1, top + 1):
                an = coeffs[n]
                if not an:
                    continue
                img = virasoro(n, vec)
                if img:
                    _add(nxt, e + power_of_z(n), img * (sign * an))
        layer = _clean(nxt)
        for e, vec in layer.items():
            _add(out, e, vec * Fraction(1, factorial(m)))
    return _clean(out)


def _depth(vec: GradedVector, m) -> int:
    return sum(m)


def apply_delta(k: int, v: GradedVector, inverse: bool = False) -> DeltaImage:
    """Delta_k(z) v, or Delta_k(z)^{-1} v when ``inverse`` is set."""
    coeffs = solve_an(k, max(_depth_bound(v), 1))
    out: dict = {}
    if not inverse:
        for wt, comp in v.components().items():
            depth = wt - v.charge ** 2 / 2
            scaled = comp * (Fraction(1, k) ** int(depth))
            e0 = (Fraction(1, k) - 1) * wt
            for e, img in _exp_virasoro(scaled, coeffs, 1, lambda n: Fraction(-n, k)).items():
                _add(out, e0 + e, img)
        return DeltaImage(k, v, _clean(out), "delta")
    for e, img in _exp_virasoro(v, coeffs, -1, lambda n: Fraction(-n, k)).items():
        for wt, comp in img.components().items():
            depth = wt - v.charge ** 2 / 2
            _add(out, e + (1 - Fraction(1, k)) * wt, comp * (Fraction(k) ** int(depth)))
    return DeltaImage(k, v, _clean(out), "delta_inverse")


def apply_phi(k: int, v: GradedVector) -> DeltaImage:
    """Phi_k(z) v = Delta_k(z^k)^{-1} v = (k z^{k-1})^{L(0)} exp(-sum a_n z^{-n} L(n)) v."""
    coeffs = solve_an(k, max(_depth_bound(v), 1))
    out: dict = {}
    for e, img in _exp_virasoro(v, coeffs, -1, lambda n: Fraction(-n)).items():
        for wt, comp in img.components().items():
            depth = wt - v.charge ** 2 / 2
            _add(out, e + (k - 1) * wt, comp * (Fraction(k) ** int(depth)))
    return DeltaImage(k, v, _clean(out), "phi")


def compose(outer, inner: DeltaImage) -> dict:
    """Apply ``outer`` (a function vector -> DeltaImage) to each entry of ``inner``,
    adding exponents (both operators in the same variable)."""
    out: dict = {}
    for e, vec in inner.entries.items():
        for f, img in outer(vec).entries.items():
            _add(out, e + f, img)
    return _clean(out)


def omega_image_expected(k: int, central_charge=Fraction(1)) -> dict:
    """(1/k^2) z^{2(1/k-1)} omega + z^{-2} (c/24)(1-k^{-2}) 1."""
    from .boson import conformal_vector, vacuum
    out = {2 * (Fraction(1, k) - 1): conformal_vector() * Fraction(1, k * k)}
    const = Fraction(central_charge) / 24 * (1 - Fraction(1, k * k))
    if const:
        _add(out, Fraction(-2), vacuum() * const)
    return _clean(out)


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

def _derivative(entries: dict) -> dict:
    return _clean({e - 1: v * e for e, v in entries.items() if e})


def verify_derivative_identity(k: int, w: GradedVector, window=None) -> Check:
    """d/dz Delta_k(z) w = (1/k) sum_{i>=1} C(1-k,i) z^{-1-(i-1)/k} L(i-1) Delta_k(z) w."""
    img = apply_delta(k, w).entries
    left = _derivative(img)
    right: dict = {}
    for e, vec in img.items():
        for i in range(1, _depth_bound(vec) + 2):
            c = binomial(Fraction(1 - k), i) / k
            if not c:
                continue
            piece = virasoro(i - 1, vec)
            if piece:
                _add(right, e - 1 - Fraction(i - 1, k), piece * c)
    right = _clean(right)
    left, right = _windowed(left, window), _windowed(right, window)
    return compare_maps("delta derivative identity", left, right, window, {"k": k, "w": w})


def verify_l_minus_one_bracket(k: int, w: GradedVector, window=None) -> Check:
    """Delta_k(z)L(-1)w - (1/k)z^{1/k-1}L(-1)Delta_k(z)w = d/dz Delta_k(z)w."""
    img = apply_delta(k, w).entries
    left = dict(apply_delta(k, virasoro(-1, w)).entries)
    for e, vec in img.items():
        _add(left, e + Fraction(1, k) - 1, virasoro(-1, vec) * Fraction(-1, k))
    left = _windowed(_clean(left), window)
    right = _windowed(_derivative(img), window)
    return compare_maps("delta L(-1) bracket", left, right, window, {"k": k, "w": w})


def _windowed(d: dict, window) -> dict:
    if window is None:
        return d
    return {e: v for e, v in d.items() if e <= Fraction(window)}


def _lowest(v: GradedVector, w: GradedVector) -> Fraction:
    target = (v.charge + w.charge) ** 2 / 2
    return min(target - v.weight_of(m) - w.weight_of(s) for m in v.terms for s in w.terms)


def operator_series(v: GradedVector, w: GradedVector, var: str, cutoff) -> PuiseuxSeries:
    """Y(v, var) w as a series in ``var`` truncated at ``cutoff``."""
    cutoff = Fraction(cutoff)
    out: dict = {}
    if v and w:
        e = _lowest(v, w)
        while e <= cutoff:
            c = coefficient(v, e, w)
            if c:
                out[(e,)] = c
            e += 1
    return PuiseuxSeries((var,), out, (cutoff,))


def _vector_series_apply(series: PuiseuxSeries, var_out: str, fn) -> PuiseuxSeries:
    """Apply fn: vector -> DeltaImage to every coefficient, in a new variable."""
    terms: dict = {}
    for e, vec in series.terms.items():
        for f, img in fn(vec).entries.items():
            key = e + (f,)
            terms[key] = terms[key] + img if key in terms else img
    return PuiseuxSeries(series.vars + (var_out,), terms, series.cutoffs + (None,))


def verify_delta_conjugation(k: int, v: GradedVector, w: GradedVector, cutoff=4) -> Check:
    """Delta_k(x) Y(v,z) w = Y(Delta_k(x+z) v, (x+z)^{1/k} - x^{1/k}) Delta_k(x) w,
    compared up to z**cutoff, exactly in x."""
    return _conjugation(k, v, w, cutoff, "delta")


def verify_phi_conjugation(k: int, v: GradedVector, w: GradedVector, cutoff=4) -> Check:
    """Phi_k(x) Y(v,z) w = Y(Phi_k(x+z) v, (x+z)^k - x^k) Phi_k(x) w."""
    return _conjugation(k, v, w, cutoff, "phi")


def _conjugation(k, v, w, cutoff, kind) -> Check:
    cutoff = Fraction(cutoff)
    op = (lambda u: apply_delta(k, u)) if kind == "delta" else (lambda u: apply_phi(k, u))
    # left side: variables (z, x)
    lhs = _vector_series_apply(operator_series(v, w, "z", cutoff), "x", op)
    lhs = lhs.with_vars(("x", "z"))
    # right side
    vimg = op(v).entries
    wimg = op(w).entries
    lowest = min((_lowest(vd, wf) for vd in vimg.values() for wf in wimg.values()), default=Fraction(0))
    span = cutoff - lowest + 1
    if kind == "delta":
        y = binomial_root_difference(k, "x", "z", span + 1)
    else:
        y = power_difference(k, "x", "z")
        y = PuiseuxSeries(y.vars, y.terms, (None, span + k))
    powers: dict = {}
    rhs = PuiseuxSeries.zero(("x", "z"), (None, cutoff))
    for p, vd in vimg.items():
        shift = _expand_power(p, cutoff)
        for f, wf in wimg.items():
            e = _lowest(vd, wf)
            while e <= cutoff:
                c = coefficient(vd, e, wf)
                if c:
                    if e not in powers:
                        powers[e] = y.pow(e, "z").truncate("z", cutoff)
                    scal = (shift * powers[e]).shift("x", f).truncate("z", cutoff)
                    rhs = rhs + scal.tensor(c)
                e += 1
    name = "delta conjugation" if kind == "delta" else "phi conjugation"
    return compare_series(name, lhs.truncate("z", cutoff), rhs, {"z": cutoff}, {"k": k, "v": v, "w": w})


def _expand_power(p, cutoff) -> PuiseuxSeries:
    """(x+z)**p with nonnegative powers of z."""
    terms = {}
    for j in range(int(cutoff) + 1):
        b = binomial(Fraction(p), j)
        if b:
            terms[(Fraction(p) - j, Fraction(j))] = b
    return PuiseuxSeries(("x", "z"), terms, (None, Fraction(cutoff)))
