"""Exact arithmetic in cyclotomic fields Q(eta_N).

An element is a polynomial in ``eta_N = exp(2 pi i / N)`` with rational
coefficients, reduced modulo the N-th cyclotomic polynomial.  Elements of
different orders are combined in the field of the lcm of their orders.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Union

Rational = Union[int, Fraction]


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _polydivmod(a: list, b: list) -> tuple[list, list]:
    """Divide a by b (coefficient lists, low degree first)."""
    a = [Fraction(x) for x in a]
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _trim(q), _trim(a[: len(b) - 1])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _polydivmod(num, list(cyclotomic_polynomial(d)))
            assert not rem
    return tuple(int(c) for c in num)


def euler_phi(n: int) -> int:
    return sum(1 for i in range(1, n + 1) if gcd(i, n) == 1)


@lru_cache(maxsize=None)
def _power_residue(n: int, e: int) -> tuple[Fraction, ...]:
    """Reduced coefficient vector of eta_n**e."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    e %= n
    if e < deg:
        v = [Fraction(0)] * deg
        v[e] = Fraction(1)
        return tuple(v)
    prev = _power_residue(n, e - 1)
    # multiply by eta: shift, then fold the top coefficient back
    top = prev[-1]
    v = [Fraction(0)] + list(prev[:-1])
    for i in range(deg):
        v[i] -= top * phi[i]
    return tuple(v)


def _reduce(n: int, poly: list) -> tuple[Fraction, ...]:
    deg = euler_phi(n)
    out = [Fraction(0)] * deg
    for e, c in enumerate(poly):
        if not c:
            continue
        if e < deg:
            out[e] += c
        else:
            for i, r in enumerate(_power_residue(n, e)):
                if r:
                    out[i] += c * r
    return tuple(out)


class Cyc:
    """An exact element of Q(eta_N).

    >>> w = Cyc.eta(3)
    >>> w**3 == 1
    True
    >>> 1 + w + w**2 == 0
    True
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        self.coeffs = _reduce(order, list(coeffs))

    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> "Cyc":
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    @classmethod
    def rational(cls, q: Rational, order: int = 1) -> "Cyc":
        deg = euler_phi(order)
        return cls._raw(order, (Fraction(q),) + (Fraction(0),) * (deg - 1))

    @classmethod
    def eta(cls, n: int, power: int = 1) -> "Cyc":
        """The element eta_n**power with eta_n = exp(2 pi i / n)."""
        return cls._raw(n, _power_residue(n, power))

    def lift(self, order: int) -> "Cyc":
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Q(eta_{self.order}) does not embed in Q(eta_{order})")
        step = order // self.order
        poly = [Fraction(0)] * (step * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            poly[i * step] = c
        return Cyc(order, poly)

    @staticmethod
    def _coerce(a, b):
        if not isinstance(a, Cyc):
            a = Cyc.rational(a)
        if not isinstance(b, Cyc):
            b = Cyc.rational(b)
        n = lcm(a.order, b.order)
        return a.lift(n), b.lift(n), n

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (int, Fraction, Cyc)):
            return NotImplemented
        a, b, n = Cyc._coerce(self, other)
        return Cyc._raw(n, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyc._raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, (int, Fraction, Cyc)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if not isinstance(other, (int, Fraction, Cyc)):
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyc._raw(self.order, tuple(x * other for x in self.coeffs))
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b, n = Cyc._coerce(self, other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyc(n, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyc":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.order
        # extended Euclid: s*self + t*phi = 1
        r0, r1 = [Fraction(c) for c in cyclotomic_polynomial(n)], list(self.coeffs)
        s0, s1 = [], [Fraction(1)]
        r1 = _trim(r1)
        while len(r1) > 1 or (r1 and r1[0] == 0):
            q, r = _polydivmod(r0, r1)
            qs = _polymul(q, s1)
            s2 = _polysub(s0, qs)
            r0, r1, s0, s1 = r1, r, s1, s2
            if not r1:
                raise ZeroDivisionError("non-invertible element")
        c = r1[0]
        return Cyc(n, [x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyc._raw(self.order, tuple(x / other for x in self.coeffs))
        if not isinstance(other, Cyc):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyc.rational(1, self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # comparison ---------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b, _ = Cyc._coerce(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        # reduce to the smallest field containing self for a canonical hash
        return hash(("cyc", self.minimal().order, self.minimal().coeffs))

    def minimal(self) -> "Cyc":
        """The same element written over the smallest Q(eta_d) containing it."""
        for d in sorted(d for d in range(1, self.order + 1) if self.order % d == 0):
            try:
                cand = _descend(self, d)
            except ValueError:
                continue
            return cand
        return self

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*eta{self.order}^{i}")
        return " + ".join(terms) if terms else "0"

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        return repr(self)


def _polymul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _polysub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(x) for x in out])


def _descend(x: Cyc, d: int) -> Cyc:
    """Write x over Q(eta_d) if possible (d divides x.order)."""
    if d == x.order:
        return x
    n = x.order
    deg = euler_phi(d)
    # solve by matching: the image of the basis eta_d^i is eta_n^(i*n/d)
    images = [Cyc.eta(d, i).lift(n).coeffs for i in range(deg)]
    # greedy elimination over the (small) linear system
    rows = [list(col) for col in images]
    target = list(x.coeffs)
    sol = _solve_columns(rows, target)
    if sol is None:
        raise ValueError("not in subfield")
    return Cyc._raw(d, tuple(sol))


def _solve_columns(cols: list, target: list):
    m = len(target)
    k = len(cols)
    aug = [[cols[j][i] for j in range(k)] + [target[i]] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, m):
        if aug[i][-1] != 0:
            return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][-1]
    return sol


def root_of_unity(n: int, power: int = 1):
    """eta_n**power, returned as a Fraction when it is rational (i.e. +-1)."""
    power %= n
    if power == 0:
        return Fraction(1)
    if 2 * power == n:
        return Fraction(-1)
    return Cyc.eta(n, power)


def minus_one_power(alpha: Fraction):
    """The principal value (-1)**alpha = exp(i pi alpha) for rational alpha."""
    alpha = Fraction(alpha)
    # exp(i pi p/q) = eta_{2q}^p
    return root_of_unity(2 * alpha.denominator, alpha.numerator)


def normalize(c):
    """Return a Fraction for rational cyclotomic values; pass others through."""
    if isinstance(c, Cyc) and c.is_rational():
        return c.coeffs[0]
    if isinstance(c, int):
        return Fraction(c)
    return c


def session_order(*orders: int) -> int:
    """Smallest cyclotomic order containing all the requested roots of unity."""
    n = 1
    for o in orders:
        n = lcm(n, int(o))
    return n
