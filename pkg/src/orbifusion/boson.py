"""The rank-one Heisenberg vertex operator algebra M(1) and its Fock modules.

Vectors of M(1,lam) are finite combinations of oscillator monomials
alpha(-n_1)...alpha(-n_r)|lam>, stored as descending tuples of parts.  Modes of
vertex operators and of the Fock intertwiners are computed exactly by the
iterate formula for alpha(-m) insertions, starting from the identity (vacuum)
or from the exponential vertex operator of |lam>.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

from .cyclotomic import Cyc, normalize
from .series import binomial

Partition = Tuple[int, ...]
Scalar = Union[Fraction, Cyc]


class WindowError(ValueError):
    """Raised when a requested exponent window holds no admissible exponent."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int, largest: Optional[int] = None) -> Tuple[Partition, ...]:
    """All partitions of n (descending tuples), with parts at most ``largest``."""
    if n == 0:
        return ((),)
    if largest is None or largest > n:
        largest = n
    out = []
    for first in range(largest, 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def _insert(p: Partition, n: int) -> Partition:
    return tuple(sorted(p + (n,), reverse=True))


def _remove(p: Partition, n: int) -> Partition:
    lst = list(p)
    lst.remove(n)
    return tuple(lst)


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

class GradedVector:
    """A finite combination of Fock monomials of one charge.

    >>> v = GradedVector.monomial(0, (1,)) * 2
    >>> v.terms
    {(1,): Fraction(2, 1)}
    """

    __slots__ = ("charge", "terms")

    def __init__(self, charge, terms: Optional[dict] = None):
        self.charge = _frac(charge)
        clean = {}
        for m, c in (terms or {}).items():
            c = normalize(c)
            if c:
                clean[tuple(m)] = c
        self.terms = clean

    @classmethod
    def monomial(cls, charge, parts: Sequence[int] = (), coeff=Fraction(1)) -> "GradedVector":
        return cls(charge, {tuple(sorted(parts, reverse=True)): coeff})

    @classmethod
    def zero(cls, charge) -> "GradedVector":
        return cls(charge, {})

    def weight_of(self, m: Partition) -> Fraction:
        return self.charge ** 2 / 2 + sum(m)

    def weights(self) -> list:
        return sorted({self.weight_of(m) for m in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def weight(self) -> Fraction:
        ws = self.weights()
        if len(ws) != 1:
            raise ValueError("vector is not homogeneous")
        return ws[0]

    def component(self, weight) -> "GradedVector":
        weight = _frac(weight)
        return GradedVector(self.charge, {m: c for m, c in self.terms.items() if self.weight_of(m) == weight})

    def components(self) -> Dict[Fraction, "GradedVector"]:
        return {w: self.component(w) for w in self.weights()}

    def _check(self, other: "GradedVector") -> None:
        if self.charge != other.charge:
            raise ValueError(f"charge mismatch: {self.charge} vs {other.charge}")

    def __add__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return GradedVector(self.charge, terms)

    def __neg__(self):
        return GradedVector(self.charge, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, s):
        if not isinstance(s, (int, Fraction, Cyc)):
            return NotImplemented
        return GradedVector(self.charge, {m: c * s for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1 / _frac(s) if isinstance(s, (int, Fraction)) else s.inverse())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.charge == other.charge and not (self - other).terms

    __hash__ = None

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return f"0[{self.charge}]"
        parts = []
        for m, c in sorted(self.terms.items()):
            mon = "".join(f"a({-n})" for n in m) or "1"
            parts.append(f"({c}){mon}")
        return " + ".join(parts) + f" |{self.charge}>"


def vacuum() -> GradedVector:
    return GradedVector.monomial(0)


def alpha_vector(n: int = 1, charge=0) -> GradedVector:
    """alpha(-n)|charge>."""
    return GradedVector.monomial(charge, (n,))


def conformal_vector() -> GradedVector:
    """omega = (1/2) alpha(-1)^2 1."""
    return GradedVector.monomial(0, (1, 1), Fraction(1, 2))


def highest_weight(charge) -> GradedVector:
    return GradedVector.monomial(charge)


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FockModule:
    """The Fock module M(1, charge); charge 0 is the vertex operator algebra itself."""

    charge: Fraction = Fraction(0)
    central_charge: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "charge", _frac(self.charge))

    step = Fraction(1)

    @property
    def min_weight(self) -> Fraction:
        return self.charge ** 2 / 2

    def weight(self, m: Partition) -> Fraction:
        return self.min_weight + sum(m)

    def basis(self, degree_cap) -> list:
        return module_basis(self.charge, degree_cap)

    def L(self, n: int, v: GradedVector) -> GradedVector:
        return virasoro(n, v)


def module_basis(charge, degree_cap) -> list:
    """Monomials of M(1,charge) of weight at most ``degree_cap``, by weight then
    reverse-lexicographically."""
    charge = _frac(charge)
    top = _frac(degree_cap) - charge ** 2 / 2
    if top < 0:
        raise ValueError("degree cap lies below the lowest weight")
    out = []
    for n in range(int(top) + 1):
        out.extend(partitions(n))
    return out


# ---------------------------------------------------------------------------
# oscillators and the Virasoro action
# ---------------------------------------------------------------------------

def _alpha_on_monomial(n: int, m: Partition, charge: Fraction) -> Iterator[Tuple[Partition, Fraction]]:
    if n < 0:
        yield _insert(m, -n), Fraction(1)
    elif n == 0:
        if charge:
            yield m, charge
    else:
        c = m.count(n)
        if c:
            yield _remove(m, n), Fraction(n * c)


def alpha(n: int, v: GradedVector) -> GradedVector:
    """The oscillator alpha(n) with [alpha(m), alpha(n)] = m delta_{m+n,0}."""
    terms: dict = {}
    for m, c in v.terms.items():
        for mm, f in _alpha_on_monomial(n, m, v.charge):
            terms[mm] = terms.get(mm, 0) + f * c
    return GradedVector(v.charge, terms)


@lru_cache(maxsize=None)
def _virasoro_monomial(n: int, m: Partition, charge: Fraction) -> Tuple[Tuple[Partition, Fraction], ...]:
    acc: Dict[Partition, Fraction] = {}
    depth = sum(m)
    if n == 0:
        return ((m, charge ** 2 / 2 + depth),)
    # L(n) = 1/2 sum_j :alpha(n-j) alpha(j):, annihilators applied first
    bound = depth + abs(n) + 1
    for j in range(-bound, bound + 1):
        a, b = n - j, j
        first, second = (b, a) if b >= a else (a, b)  # apply the larger index first
        for m1, c1 in _alpha_on_monomial(first, m, charge):
            for m2, c2 in _alpha_on_monomial(second, m1, charge):
                acc[m2] = acc.get(m2, 0) + Fraction(1, 2) * c1 * c2
    return tuple((k, v) for k, v in acc.items() if v)


def virasoro(n: int, v: GradedVector) -> GradedVector:
    """L(n) v computed from the quadratic oscillator formula."""
    terms: dict = {}
    for m, c in v.terms.items():
        for mm, f in _virasoro_monomial(n, m, v.charge):
            terms[mm] = terms.get(mm, 0) + f * c
    return GradedVector(v.charge, terms)


# ---------------------------------------------------------------------------
# exponential operators for |lam>
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _exp_annihilation(lam: Fraction, m: Partition, charge: Fraction) -> Tuple[Tuple[int, Tuple[Tuple[Partition, Fraction], ...]], ...]:
    """exp(-lam sum_{n>0} alpha(n) z^{-n} / n) on a monomial, as d -> vector of z^{-d}."""
    out: Dict[int, Dict[Partition, Fraction]] = {0: {m: Fraction(1)}}
    layer: Dict[int, Dict[Partition, Fraction]] = {0: {m: Fraction(1)}}
    r = 0
    while layer:
        r += 1
        nxt: Dict[int, Dict[Partition, Fraction]] = {}
        for d, vec in layer.items():
            for mm, c in vec.items():
                for n in set(mm):
                    for m2, f in _alpha_on_monomial(n, mm, charge):
                        slot = nxt.setdefault(d + n, {})
                        slot[m2] = slot.get(m2, 0) + c * f * (-lam) / n
        layer = {d: {k: v for k, v in vec.items() if v} for d, vec in nxt.items()}
        layer = {d: vec for d, vec in layer.items() if vec}
        for d, vec in layer.items():
            slot = out.setdefault(d, {})
            for k, v in vec.items():
                slot[k] = slot.get(k, 0) + v / factorial(r)
    return tuple((d, tuple((k, v) for k, v in vec.items() if v)) for d, vec in sorted(out.items()))


@lru_cache(maxsize=None)
def _exp_creation_coeffs(lam: Fraction, t: int) -> Tuple[Tuple[Partition, Fraction], ...]:
    """z^t coefficient of exp(lam sum_{n>0} alpha(-n) z^n / n) as partitions."""
    out = []
    for p in partitions(t):
        c = Fraction(1)
        for n, mult in Counter(p).items():
            c *= (lam / n) ** mult / factorial(mult)
        out.append((p, c))
    return tuple(out)


# ---------------------------------------------------------------------------
# the mode engine
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _mode(lam: Fraction, w: Partition, q: Fraction, mu: Fraction, s: Partition) -> Tuple[Tuple[Partition, Fraction], ...]:
    """w_q s for w in M(1,lam), s in M(1,mu), result in M(1,lam+mu).

    Uses the exponential intertwiner z^{lam mu} E^-(-lam,z) E^+(-lam,z) for the
    highest-weight vector and the iterate formula for alpha(-m) insertions.
    """
    out_depth = sum(w) + sum(s) - q - 1 - lam * mu
    if out_depth < 0 or out_depth.denominator != 1:
        return ()
    if not w:
        if lam == 0:
            return ((s, Fraction(1)),) if q == -1 else ()
        t = int(-q - 1 - lam * mu)  # exponent of z beyond z^{lam mu}
        acc: Dict[Partition, Fraction] = {}
        for d, vec in _exp_annihilation(lam, s, mu):
            if t + d < 0:
                continue
            for p, c in _exp_creation_coeffs(lam, t + d):
                for mm, f in vec:
                    key = tuple(sorted(mm + p, reverse=True))
                    acc[key] = acc.get(key, 0) + c * f
        return tuple((k, v) for k, v in acc.items() if v)
    m, rest = w[0], w[1:]
    acc = {}
    charge_out = lam + mu
    rest_depth = sum(rest)
    jmax = rest_depth + sum(s) - q - 1 - lam * mu
    j = 0
    while j <= jmax:
        b = binomial(Fraction(m + j - 1), j)
        for mm, c in _mode(lam, rest, q + j, mu, s):
            for m2, f in _alpha_on_monomial(-m - j, mm, charge_out):
                acc[m2] = acc.get(m2, 0) + b * c * f
        j += 1
    sign = -1 if m % 2 else 1
    top = max(s) if s else 0
    for j in range(0, top + 1):
        b = binomial(Fraction(m + j - 1), j)
        for mm, f in _alpha_on_monomial(j, s, mu):
            for m2, c in _mode(lam, rest, q - m - j, mu, mm):
                acc[m2] = acc.get(m2, 0) - sign * b * f * c
    return tuple((k, v) for k, v in acc.items() if v)


def mode(w: GradedVector, q, s: GradedVector) -> GradedVector:
    """The component w_q s (coefficient of z^{-q-1} in Y(w,z)s)."""
    q = _frac(q)
    terms: dict = {}
    for wm, wc in w.terms.items():
        for sm, sc in s.terms.items():
            for mm, f in _mode(w.charge, wm, q, s.charge, sm):
                terms[mm] = terms.get(mm, 0) + wc * sc * f
    return GradedVector(w.charge + s.charge, terms)


def coefficient(w: GradedVector, exponent, s: GradedVector) -> GradedVector:
    """Coefficient of z**exponent in Y(w,z)s (or the Fock intertwiner when w is charged)."""
    return mode(w, -_frac(exponent) - 1, s)


# ---------------------------------------------------------------------------
# operator families and their materialization
# ---------------------------------------------------------------------------

class FockIntertwiner:
    """The intertwiner of type (M(1,lam+mu); M(1,lam) M(1,mu)) with leading
    coefficient 1 on highest-weight vectors; lam = 0 gives the module map."""

    def __init__(self, lam, mu):
        self.lam = _frac(lam)
        self.mu = _frac(mu)
        self.inserted = FockModule(self.lam)
        self.source = FockModule(self.mu)
        self.target = FockModule(self.lam + self.mu)

    def insert_weight(self, w: Partition) -> Fraction:
        return self.inserted.weight(w)

    def coeff(self, w: Partition, a, s: Partition) -> GradedVector:
        q = -_frac(a) - 1
        return GradedVector(self.target.charge, dict(_mode(self.lam, tuple(w), q, self.mu, tuple(s))))

    def lowest(self, w: Partition, s: Partition) -> Fraction:
        return self.target.min_weight - self.insert_weight(w) - self.source.weight(s)

    def apply(self, w: GradedVector, a, s: GradedVector) -> GradedVector:
        return _apply_linear(self, w, a, s)

    def __repr__(self):
        return f"FockIntertwiner(lam={self.lam}, mu={self.mu})"


def _apply_linear(family, w, a, s: GradedVector) -> GradedVector:
    """Extend family.coeff linearly in the inserted vector and the source vector."""
    out = None
    for wm, wc in _terms(w):
        for sm, sc in s.terms.items():
            piece = family.coeff(wm, a, sm)
            if piece:
                piece = piece * (wc * sc)
                out = piece if out is None else out + piece
    return out if out is not None else GradedVector.zero(family.target.charge)


def _terms(w):
    if hasattr(w, "terms"):
        return w.terms.items()
    return w.items()


def exponent_window(family, w: Partition, s: Partition, count: int) -> list:
    """The ``count`` lowest admissible exponents of family(w, z) s."""
    lo = family.lowest(w, s)
    step = family.target.step
    return [lo + i * step for i in range(count)]


@dataclass
class OperatorSeries:
    """Exponent-indexed sparse matrices of an operator family on a truncated basis.

    ``entries[a][m]`` is the image of the source monomial ``m`` under the
    coefficient of z**a.
    """

    source_charge: Fraction
    target_charge: Fraction
    window: Tuple[Fraction, Fraction]
    degree_cap: Fraction
    entries: Dict[Fraction, Dict[Partition, GradedVector]] = field(default_factory=dict)

    def exponents(self) -> list:
        return sorted(self.entries)

    def apply(self, a, s: GradedVector) -> GradedVector:
        a = _frac(a)
        out = GradedVector.zero(self.target_charge)
        for m, c in s.terms.items():
            img = self.entries.get(a, {}).get(m)
            if img is not None:
                out = out + img * c
        return out

    def matrix_entry(self, a, source: Partition, target: Partition):
        img = self.entries.get(_frac(a), {}).get(tuple(source))
        return Fraction(0) if img is None else img.terms.get(tuple(target), Fraction(0))


def materialize(family, w: GradedVector, window: Tuple, degree_cap, lattice_offset=None) -> OperatorSeries:
    """Store all coefficients of family(w,z) with exponents in ``window`` acting on
    source monomials of weight at most ``degree_cap``."""
    lo, hi = _frac(window[0]), _frac(window[1])
    basis = module_basis(family.source.charge, degree_cap)
    entries: Dict[Fraction, Dict[Partition, GradedVector]] = {}
    step = family.target.step
    found = False
    for wm, wc in _terms(w):
        for s in basis:
            base = family.lowest(wm, s)
            # first admissible exponent >= lo on the lattice base + step*Z
            n0 = -((base - lo) // step)
            a = base + n0 * step
            while a <= hi:
                found = True
                img = family.coeff(wm, a, s) * wc
                if img:
                    slot = entries.setdefault(a, {})
                    slot[s] = slot[s] + img if s in slot else img
                a += step
    if not found:
        raise WindowError(f"window [{lo}, {hi}] contains no admissible exponent")
    for a in list(entries):
        entries[a] = {s: v for s, v in entries[a].items() if v}
        if not entries[a]:
            del entries[a]
    return OperatorSeries(family.source.charge, family.target.charge, (lo, hi), _frac(degree_cap), entries)


def vertex_operator(v: GradedVector, lam, window: Tuple, degree_cap=None) -> OperatorSeries:
    """Matrix coefficients of Y_{M(1,lam)}(v, z) on the truncated basis."""
    if v.charge != 0:
        raise ValueError("vertex operators need a vector of charge 0")
    lam = _frac(lam)
    cap = _frac(degree_cap) if degree_cap is not None else lam ** 2 / 2 + 4
    return materialize(FockIntertwiner(0, lam), v, window, cap)


def fock_intertwiner(lam, mu, w: GradedVector, window: Tuple, degree_cap=None) -> OperatorSeries:
    """Matrix coefficients of the normalized intertwiner Y(w,z): M(1,mu) -> M(1,lam+mu)."""
    lam, mu = _frac(lam), _frac(mu)
    if w.charge != lam:
        raise ValueError("w must have charge lam")
    cap = _frac(degree_cap) if degree_cap is not None else mu ** 2 / 2 + 4
    return materialize(FockIntertwiner(lam, mu), w, window, cap)


# ---------------------------------------------------------------------------
# contragredient modules
# ---------------------------------------------------------------------------

class Contragredient:
    """Y_{M'}(v,z) defined by <Y_{M'}(v,z)f, u> = <f, Y_M(e^{zL(1)}(-z^{-2})^{L(0)} v, z^{-1}) u>.

    Dual vectors are stored in the basis dual to the monomials of M.  The
    underlying family must act on M and expose ``insert_weight``,
    ``insertion_L1`` and ``coeff``.
    """

    def __init__(self, family):
        self.family = family
        self.module = family.target
        if family.source != family.target:
            raise ValueError("contragredient needs an action of the algebra on one module")

    def coeff(self, v, a, f: Partition):
        """Image of the dual basis vector f under the z**a coefficient of Y_{M'}(v, z)."""
        fam = self.family
        a = _frac(a)
        h = fam.insert_weight(v)
        if h.denominator != 1:
            raise ValueError("contragredient action needs integer-weight insertions")
        h = int(h)
        target_weight = self.module.weight(f) + h + a
        out: dict = {}
        sign = -1 if h % 2 else 1
        vi = fam.as_vector(v)
        i = 0
        while vi:
            for u in self._basis_of_weight(target_weight):
                e = i - 2 * h - a
                img = fam.apply(vi, e, fam.source_vector(u))
                c = img.terms.get(f) if hasattr(img, "terms") else None
                if c:
                    out[u] = out.get(u, 0) + sign * c / factorial(i)
            vi = fam.insertion_L1(vi)
            i += 1
        return GradedVector(self.module.charge, out)

    def _basis_of_weight(self, weight) -> list:
        weight = _frac(weight)
        if weight < self.module.min_weight:
            return []
        return [m for m in module_basis_graded(self.module, weight)]


def module_basis_graded(module, weight) -> list:
    """Monomials of exactly the given weight in ``module`` (Fock or twisted)."""
    return module.monomials_of_weight(weight) if hasattr(module, "monomials_of_weight") else \
        [m for m in partitions_of_depth(_frac(weight) - module.min_weight)]


def partitions_of_depth(d: Fraction) -> tuple:
    if d < 0 or d.denominator != 1:
        return ()
    return partitions(int(d))


class _VertexFamily(FockIntertwiner):
    """Y_{M(1,lam)} with helpers used by the contragredient construction."""

    def __init__(self, lam):
        super().__init__(0, lam)

    def as_vector(self, v):
        return v

    def source_vector(self, u: Partition) -> GradedVector:
        return GradedVector.monomial(self.source.charge, u)

    def insert_weight(self, v) -> Fraction:
        if isinstance(v, GradedVector):
            return v.weight()
        return self.inserted.weight(v)

    def insertion_L1(self, v: GradedVector) -> GradedVector:
        return virasoro(1, v)


def contragredient(lam) -> Contragredient:
    """The contragredient action on M(1,lam)'."""
    return Contragredient(_VertexFamily(lam))


def contragredient_series(lam, v: GradedVector, window: Tuple, degree_cap) -> OperatorSeries:
    """Matrix coefficients of Y_{M'}(v,z) on the dual truncated basis."""
    con = contragredient(lam)
    lam = _frac(lam)
    lo, hi = _frac(window[0]), _frac(window[1])
    entries: Dict[Fraction, Dict[Partition, GradedVector]] = {}
    basis = module_basis(lam, degree_cap)
    h = v.weight()
    found = False
    for f in basis:
        base = -(h + FockModule(lam).weight(f) - lam ** 2 / 2)  # lowest target weight is lam^2/2
        n0 = -((base - lo) // 1)
        a = base + n0
        while a <= hi:
            found = True
            img = con.coeff(v, a, f)
            if img:
                entries.setdefault(a, {})[f] = img
            a += 1
    if not found:
        raise WindowError(f"window [{lo}, {hi}] contains no admissible exponent")
    return OperatorSeries(lam, lam, (lo, hi), _frac(degree_cap), entries)


def pairing(f: GradedVector, u: GradedVector):
    """<f, u> for f written in the dual monomial basis."""
    return sum((c * u.terms.get(m, 0) for m, c in f.terms.items()), Fraction(0))


# ---------------------------------------------------------------------------
# independent oracle: normal-ordered products of derivatives of alpha(z)
# ---------------------------------------------------------------------------

def normal_ordered_mode(parts: Partition, q, s: GradedVector) -> GradedVector:
    """v_q s for v = alpha(-n_1)...alpha(-n_r) 1, from the explicit normal-ordered
    product of the fields d^{(n_i - 1)} alpha(z).  Brute force; for tests."""
    q = _frac(q)
    if q.denominator != 1:
        return GradedVector.zero(s.charge)
    q = int(q)
    r = len(parts)
    if r == 0:
        return s if q == -1 else GradedVector.zero(s.charge)
    depth = max((sum(m) for m in s.terms), default=0)
    # sum_i (m_i + n_i) = q + 1 with m_i the oscillator index of factor i
    total = q + 1 - sum(parts)
    bound = depth + abs(total) + sum(parts) + 2
    out = GradedVector.zero(s.charge)

    def rec(i, remaining, chosen):
        nonlocal out
        if i == r - 1:
            choice = chosen + [remaining]
            if abs(remaining) > bound:
                return
            coeff = Fraction(1)
            for m, n in zip(choice, parts):
                coeff *= binomial(Fraction(-m - 1), n - 1)
            if not coeff:
                return
            # normal order: creation (negative) operators to the left
            ordered = sorted(choice, reverse=True)  # apply largest index first
            vec = s
            for m in ordered:
                vec = alpha(m, vec)
                if not vec:
                    return
            out = out + vec * coeff
            return
        for m in range(-bound, bound + 1):
            rec(i + 1, remaining - m, chosen + [m])

    rec(0, total, [])
    return out
