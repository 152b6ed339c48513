"""Truncated multivariate Puiseux series with exact coefficients.

A series is a finite map from exponent tuples (one rational exponent per
variable) to coefficients.  Coefficients may be scalars (``Fraction`` or
``Cyc``) or any vector type supporting ``+``, ``-``, scalar multiplication
and truthiness.  Each variable carries an optional cutoff: entries are
trusted, and only stored, up to that exponent.  ``None`` means the series is
known exactly in that variable.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Callable, Iterable, Optional, Sequence

from .cyclotomic import minus_one_power

_INF = float("inf")


@lru_cache(maxsize=None)
def binomial(alpha: Fraction, j: int) -> Fraction:
    """Generalized binomial coefficient C(alpha, j) for integer j >= 0."""
    if j < 0:
        return Fraction(0)
    alpha = Fraction(alpha)
    out = Fraction(1)
    for i in range(j):
        out = out * (alpha - i) / (i + 1)
    return out


def _acc(d: dict, key, val) -> None:
    if key in d:
        d[key] = d[key] + val
    else:
        d[key] = val


def _cut(c) -> Optional[Fraction]:
    return None if c is None or c == _INF else Fraction(c)


class PuiseuxSeries:
    """Truncated series in one or more variables.

    >>> z = PuiseuxSeries.monomial(("z",), (Fraction(1, 2),))
    >>> (z * z).terms
    {(Fraction(1, 1),): Fraction(1, 1)}
    """

    __slots__ = ("vars", "terms", "cutoffs")

    def __init__(self, vars: Sequence[str], terms: Optional[dict] = None,
                 cutoffs: Optional[Sequence] = None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"repeated variable in {self.vars}")
        cut = tuple(_cut(c) for c in (cutoffs if cutoffs is not None else (None,) * len(self.vars)))
        if len(cut) != len(self.vars):
            raise ValueError("one cutoff per variable required")
        self.cutoffs = cut
        clean = {}
        for e, c in (terms or {}).items():
            if not c:
                continue
            e = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in e)
            if any(cv is not None and ev > cv for ev, cv in zip(e, cut)):
                continue
            clean[e] = c
        self.terms = clean

    # construction -------------------------------------------------------
    @classmethod
    def monomial(cls, vars, exps, coeff=Fraction(1), cutoffs=None) -> "PuiseuxSeries":
        return cls(vars, {tuple(Fraction(e) for e in exps): coeff}, cutoffs)

    @classmethod
    def zero(cls, vars, cutoffs=None) -> "PuiseuxSeries":
        return cls(vars, {}, cutoffs)

    @classmethod
    def one(cls, vars=()) -> "PuiseuxSeries":
        return cls(vars, {tuple(Fraction(0) for _ in vars): Fraction(1)})

    # basic queries ------------------------------------------------------
    def index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"series has no variable {var!r}") from None

    def cutoff(self, var: str) -> Optional[Fraction]:
        return self.cutoffs[self.index(var)]

    def low(self, var) -> Optional[Fraction]:
        i = var if isinstance(var, int) else self.index(var)
        if not self.terms:
            return None
        return min(e[i] for e in self.terms)

    def high(self, var) -> Optional[Fraction]:
        i = var if isinstance(var, int) else self.index(var)
        if not self.terms:
            return None
        return max(e[i] for e in self.terms)

    @property
    def denominator(self) -> int:
        """Smallest T with every exponent in (1/T)Z."""
        t = 1
        for e in self.terms:
            for x in e:
                t = lcm(t, x.denominator)
        return t

    def coefficient(self, exps, default=Fraction(0)):
        key = tuple(Fraction(e) for e in exps)
        for ev, cv in zip(key, self.cutoffs):
            if cv is not None and ev > cv:
                raise ValueError(f"exponent {key} lies beyond the trusted cutoff {self.cutoffs}")
        return self.terms.get(key, default)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        items = sorted(self.terms.items())
        body = " + ".join(f"({c})*" + "*".join(f"{v}^{e}" for v, e in zip(self.vars, k)) for k, c in items[:8])
        more = " + ..." if len(items) > 8 else ""
        return f"PuiseuxSeries[{','.join(self.vars)}; cut={self.cutoffs}]({body or '0'}{more})"

    # variable bookkeeping ------------------------------------------------
    def with_vars(self, vars: Sequence[str]) -> "PuiseuxSeries":
        """Embed into a larger ordered variable set (new variables get exponent 0)."""
        vars = tuple(vars)
        missing = [v for v in self.vars if v not in vars]
        if missing:
            raise ValueError(f"cannot drop variables {missing}")
        pos = [self.vars.index(v) if v in self.vars else None for v in vars]
        terms = {tuple(e[p] if p is not None else Fraction(0) for p in pos): c for e, c in self.terms.items()}
        cut = tuple(self.cutoffs[p] if p is not None else None for p in pos)
        return PuiseuxSeries(vars, terms, cut)

    def rename(self, mapping: dict) -> "PuiseuxSeries":
        return PuiseuxSeries(tuple(mapping.get(v, v) for v in self.vars), self.terms, self.cutoffs)

    def truncate(self, var: str, cutoff) -> "PuiseuxSeries":
        i = self.index(var)
        cut = list(self.cutoffs)
        cut[i] = Fraction(cutoff) if cut[i] is None else min(cut[i], Fraction(cutoff))
        return PuiseuxSeries(self.vars, self.terms, cut)

    def drop_var(self, var: str) -> "PuiseuxSeries":
        """Forget a variable all of whose exponents are zero."""
        i = self.index(var)
        if any(e[i] for e in self.terms):
            raise ValueError(f"variable {var!r} still occurs")
        vars = self.vars[:i] + self.vars[i + 1:]
        terms = {e[:i] + e[i + 1:]: c for e, c in self.terms.items()}
        return PuiseuxSeries(vars, terms, self.cutoffs[:i] + self.cutoffs[i + 1:])

    # arithmetic ---------------------------------------------------------
    def _aligned(self, other: "PuiseuxSeries"):
        if self.vars == other.vars:
            return self, other
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(vars), other.with_vars(vars)

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            _acc(terms, e, c)
        cut = tuple(_cut(min(x if x is not None else _INF, y if y is not None else _INF))
                    for x, y in zip(a.cutoffs, b.cutoffs))
        return PuiseuxSeries(a.vars, terms, cut)

    def __neg__(self):
        return PuiseuxSeries(self.vars, {e: -c for e, c in self.terms.items()}, self.cutoffs)

    def __sub__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "PuiseuxSeries":
        return PuiseuxSeries(self.vars, {e: s * c for e, c in self.terms.items()}, self.cutoffs)

    def map_coeffs(self, f: Callable) -> "PuiseuxSeries":
        return PuiseuxSeries(self.vars, {e: f(c) for e, c in self.terms.items()}, self.cutoffs)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other) if isinstance(other, (int, Fraction)) else NotImplemented
        a, b = self._aligned(other)
        cut = []
        for i in range(len(a.vars)):
            la, lb = a.low(i), b.low(i)
            la = _INF if la is None else la
            lb = _INF if lb is None else lb
            ca = _INF if a.cutoffs[i] is None else a.cutoffs[i]
            cb = _INF if b.cutoffs[i] is None else b.cutoffs[i]
            cut.append(_cut(min(ca + lb, cb + la)))
        terms: dict = {}
        for ea, xa in a.terms.items():
            for eb, xb in b.terms.items():
                e = tuple(p + q for p, q in zip(ea, eb))
                if any(cv is not None and ev > cv for ev, cv in zip(e, cut)):
                    continue
                _acc(terms, e, xa * xb)
        return PuiseuxSeries(a.vars, terms, cut)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return PuiseuxSeries(self.vars, {e: other * c for e, c in self.terms.items()}, self.cutoffs)

    def tensor(self, vec) -> "PuiseuxSeries":
        """Multiply a scalar series by a fixed vector, giving vector coefficients."""
        return PuiseuxSeries(self.vars, {e: c * vec for e, c in self.terms.items()}, self.cutoffs)

    def derivative(self, var: str) -> "PuiseuxSeries":
        i = self.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[ne] = e[i] * c
        cut = list(self.cutoffs)
        if cut[i] is not None:
            cut[i] -= 1
        return PuiseuxSeries(self.vars, terms, cut)

    def shift(self, var: str, amount) -> "PuiseuxSeries":
        """Multiply by var**amount."""
        i = self.index(var)
        amount = Fraction(amount)
        terms = {e[:i] + (e[i] + amount,) + e[i + 1:]: c for e, c in self.terms.items()}
        cut = list(self.cutoffs)
        if cut[i] is not None:
            cut[i] += amount
        return PuiseuxSeries(self.vars, terms, cut)

    def scale_exponents(self, var: str, factor, root: Optional[Callable] = None) -> "PuiseuxSeries":
        """Substitute var -> var**factor (factor > 0), optionally weighting by root(e)."""
        i = self.index(var)
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("factor must be positive")
        terms = {}
        for e, c in self.terms.items():
            ne = e[:i] + (e[i] * factor,) + e[i + 1:]
            terms[ne] = c if root is None else root(e[i]) * c
        cut = list(self.cutoffs)
        if cut[i] is not None:
            cut[i] *= factor
        return PuiseuxSeries(self.vars, terms, cut)

    def restrict(self, var: str, exponent) -> "PuiseuxSeries":
        """Coefficient of var**exponent, as a series in the remaining variables."""
        i = self.index(var)
        exponent = Fraction(exponent)
        cv = self.cutoffs[i]
        if cv is not None and exponent > cv:
            raise ValueError(f"exponent {exponent} of {var} is beyond the trusted cutoff {cv}")
        terms = {e[:i] + e[i + 1:]: c for e, c in self.terms.items() if e[i] == exponent}
        return PuiseuxSeries(self.vars[:i] + self.vars[i + 1:], terms, self.cutoffs[:i] + self.cutoffs[i + 1:])

    def pow(self, alpha, var: str) -> "PuiseuxSeries":
        """self**alpha, expanded around the lowest term in ``var``.

        The lowest ``var`` coefficient must be a single monomial c*m; the
        result is c**alpha m**alpha (1+t)**alpha with t of positive valuation.
        For non-integer alpha the constant c must be 1.
        """
        alpha = Fraction(alpha)
        i = self.index(var)
        if not self.terms:
            raise ZeroDivisionError("power of the zero series")
        lo = self.low(i)
        lead = [(e, c) for e, c in self.terms.items() if e[i] == lo]
        if len(lead) != 1:
            raise ValueError("leading coefficient is not a monomial")
        le, lc = lead[0]
        if alpha.denominator == 1:
            cpow = Fraction(lc) ** int(alpha) if isinstance(lc, (int, Fraction)) else lc ** int(alpha)
        elif lc == 1:
            cpow = Fraction(1)
        else:
            raise ValueError("non-integer power of a non-unit leading constant")
        inv = PuiseuxSeries.monomial(self.vars, tuple(-x for x in le), 1 / Fraction(lc) if isinstance(lc, (int, Fraction)) else 1 / lc)
        t = self * inv
        t = PuiseuxSeries(t.vars, {e: c for e, c in t.terms.items() if any(e)}, t.cutoffs)
        # number of binomial terms needed in var
        cv = t.cutoffs[i]
        tlow = t.low(i)
        lead_mon = PuiseuxSeries.monomial(self.vars, tuple(alpha * x for x in le), cpow)
        if tlow is None:
            out = lead_mon
            cut = list(out.cutoffs)
            cut[i] = None if cv is None else cv + alpha * lo
            return PuiseuxSeries(out.vars, out.terms, cut)
        if tlow <= 0:
            raise ValueError("correction term does not have positive valuation")
        span = cv if cv is not None else None
        if span is None:
            raise ValueError("exact power of an infinite expansion requires a cutoff")
        nmax = int(span / tlow)
        total = PuiseuxSeries.one(self.vars)
        term = PuiseuxSeries.one(self.vars)
        for j in range(1, nmax + 1):
            term = term * t
            total = total + term.scale(binomial(alpha, j))
        cut = list(total.cutoffs)
        cut[i] = cv if cut[i] is None else min(cut[i], cv)
        total = PuiseuxSeries(total.vars, total.terms, cut)
        return lead_mon * total

    # comparison ---------------------------------------------------------
    def first_difference(self, other: "PuiseuxSeries"):
        """None if the two series agree wherever both are trusted, else a witness."""
        a, b = self._aligned(other)
        cut = tuple(_cut(min(x if x is not None else _INF, y if y is not None else _INF))
                    for x, y in zip(a.cutoffs, b.cutoffs))
        keys = sorted(set(a.terms) | set(b.terms))
        for e in keys:
            if any(cv is not None and ev > cv for ev, cv in zip(e, cut)):
                continue
            x = a.terms.get(e)
            y = b.terms.get(e)
            if x is None or y is None or x != y:
                if x is not None and y is not None and not (x - y):
                    continue
                return e, x, y
        return None

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.vars == other.vars and self.cutoffs == other.cutoffs and self.first_difference(other) is None

    __hash__ = None


# ---------------------------------------------------------------------------
# binomial expansions and substitutions
# ---------------------------------------------------------------------------

def expand_binomial(alpha, first: str, second: str, cutoff, *, sign: int = -1,
                    expand_in: Optional[str] = None) -> PuiseuxSeries:
    """(first + sign*second)**alpha with nonnegative integer powers of ``expand_in``.

    By default the expansion variable is ``second``, so
    ``expand_binomial(a, "z1", "z2", c)`` is sum_j C(a,j)(-1)^j z1^(a-j) z2^j.
    With ``expand_in=first`` the leading factor (sign*second)**alpha uses the
    principal branch (-1)**alpha = exp(i pi alpha).
    """
    alpha = Fraction(alpha)
    cutoff = Fraction(cutoff)
    expand_in = second if expand_in is None else expand_in
    if first == second:
        raise ValueError("the two variables must be distinct")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    terms = {}
    if expand_in == second:
        for j in range(int(cutoff) + 1 if cutoff >= 0 else 0):
            c = binomial(alpha, j) * (sign ** j)
            terms[(alpha - j, Fraction(j))] = c
        return PuiseuxSeries((first, second), terms, (None, cutoff))
    if expand_in != first:
        raise ValueError("expand_in must name one of the two variables")
    lead = Fraction(1) if sign == 1 else minus_one_power(alpha)
    for j in range(int(cutoff) + 1 if cutoff >= 0 else 0):
        c = binomial(alpha, j) * lead * (sign ** j if sign == -1 else 1)
        terms[(Fraction(j), alpha - j)] = c
    return PuiseuxSeries((first, second), terms, (cutoff, None))


def residue(series: PuiseuxSeries, var: str):
    """Res_var: the coefficient of var**-1 (a series in the other variables,
    or a bare coefficient when ``var`` is the only variable)."""
    r = series.restrict(var, -1)
    if not r.vars:
        return r.terms.get((), Fraction(0))
    return r


def substitute_root(series: PuiseuxSeries, var: str, k: int, x: str, z: str, cutoff) -> PuiseuxSeries:
    """Replace var**(m/k) by (x+z)**(m/k) expanded in nonnegative powers of z.

    ``x`` may already occur in the series; ``z`` must not.  The output is
    trusted up to z**cutoff, and the x-cutoff is adjusted when the input was
    truncated in ``var``.
    """
    i = series.index(var)
    if z in series.vars:
        raise ValueError(f"{z!r} already occurs in the series")
    cutoff = Fraction(cutoff)
    for e in series.terms:
        if (e[i] * k).denominator != 1:
            raise ValueError(f"exponent {e[i]} of {var} has denominator not dividing {k}")
    rest_vars = series.vars[:i] + series.vars[i + 1:]
    out_vars = rest_vars + ((x,) if x not in rest_vars else ()) + (z,)
    xi = out_vars.index(x)
    zi = out_vars.index(z)
    terms: dict = {}
    jmax = int(cutoff)
    for e, c in series.terms.items():
        base = list(e[:i] + e[i + 1:]) + ([Fraction(0)] if x not in rest_vars else []) + [Fraction(0)]
        a = e[i]
        for j in range(jmax + 1):
            b = binomial(a, j)
            if not b:
                continue
            ne = list(base)
            ne[xi] += a - j
            ne[zi] += j
            _acc(terms, tuple(ne), b * c)
    cut = [None] * len(out_vars)
    for v, cv in zip(rest_vars, series.cutoffs[:i] + series.cutoffs[i + 1:]):
        cut[out_vars.index(v)] = cv
    cut[zi] = cutoff
    cv = series.cutoffs[i]
    if cv is not None:
        # a missing term var**a (a > cv) lands on x-exponents > low_x + cv - cutoff
        low_x = Fraction(0)
        if x in series.vars and series.terms:
            low_x = series.low(x)
        bound = low_x + cv - cutoff
        cut[xi] = bound if cut[xi] is None else min(cut[xi], bound)
    if x in series.vars and series.cutoffs[series.index(x)] is not None and series.terms:
        cx = series.cutoffs[series.index(x)]
        bound = cx + series.low(i) - cutoff
        cut[xi] = min(cut[xi], bound) if cut[xi] is not None else bound
    return PuiseuxSeries(out_vars, terms, cut)


def substitute_series(series: PuiseuxSeries, var: str, value: PuiseuxSeries, along: str) -> PuiseuxSeries:
    """Replace var**e by value**e (value expanded around its lowest ``along`` term).

    ``value`` must have positive valuation in ``along``; its other variables
    may overlap those of ``series``.
    """
    i = series.index(var)
    rest = PuiseuxSeries(series.vars[:i] + series.vars[i + 1:], {}, series.cutoffs[:i] + series.cutoffs[i + 1:])
    total = None
    cache: dict = {}
    for e, c in series.terms.items():
        a = e[i]
        if a not in cache:
            cache[a] = value.pow(a, along) if a else PuiseuxSeries.one(value.vars)
        mon = PuiseuxSeries.monomial(rest.vars, e[:i] + e[i + 1:], c, rest.cutoffs)
        piece = mon * cache[a]
        total = piece if total is None else total + piece
    if total is None:
        total = PuiseuxSeries.zero(rest.vars, rest.cutoffs)._aligned(value)[0]
    cv = series.cutoffs[i]
    if cv is not None:
        val = value.low(along)
        if val is None or val <= 0:
            raise ValueError("substituted value must have positive valuation")
        total = total.truncate(along, cv * val) if along in total.vars else total
    return total


def change_of_variable(series: PuiseuxSeries, x: str, z1: str, z0: str, k: int, cutoff) -> PuiseuxSeries:
    """Substitute x = z1**k - (z1 - z0)**k, a polynomial of z0-valuation one.

    Exponents of x must be nonnegative integers.  The result is trusted up to
    z0**cutoff (and no further than the input's x-cutoff allows).
    """
    i = series.index(x)
    for e in series.terms:
        if e[i] < 0 or e[i].denominator != 1:
            raise ValueError("change of variable needs a power series in x")
    cutoff = Fraction(cutoff)
    poly = PuiseuxSeries.monomial((z1, z0), (k, 0)) - expand_binomial(k, z1, z0, k)
    poly = PuiseuxSeries(poly.vars, poly.terms, (None, cutoff))
    out = substitute_series(series, x, poly, z0)
    return out.truncate(z0, cutoff)


def binomial_root_difference(k: int, x: str, z: str, cutoff) -> PuiseuxSeries:
    """(x+z)**(1/k) - x**(1/k), expanded in nonnegative powers of z."""
    s = expand_binomial(Fraction(1, k), x, z, cutoff, sign=1)
    return s - PuiseuxSeries.monomial((x, z), (Fraction(1, k), 0))


def power_difference(k: int, x: str, z: str) -> PuiseuxSeries:
    """(x+z)**k - x**k, an exact polynomial."""
    s = expand_binomial(k, x, z, k, sign=1)
    s = PuiseuxSeries(s.vars, s.terms, (None, None))
    return s - PuiseuxSeries.monomial((x, z), (k, 0))


def series_from(vars: Sequence[str], items: Iterable, cutoffs=None) -> PuiseuxSeries:
    terms: dict = {}
    for e, c in items:
        _acc(terms, tuple(Fraction(v) for v in e), c)
    return PuiseuxSeries(vars, terms, cutoffs)
