from collections import Counter
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from orbifusion.boson import GradedVector, coefficient, module_basis, partitions
from orbifusion.cyclotomic import Cyc
from orbifusion.delta import apply_delta, compose
from orbifusion.fusion import (Permutation, Twisted, conjugate_label, cycle_normal_form, equivariance_holds,
                               iterated_fuse, load_ring, orbifold_fuse, sigma_kappa)
from orbifusion.series import binomial, expand_binomial
from orbifusion.twisted import TensorVector, eigencomponent

F = Fraction
fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
orders = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12])


@st.composite
def cyc(draw, order=None):
    n = order or draw(orders)
    coeffs = draw(st.lists(fractions, min_size=n, max_size=n))
    total = Cyc.rational(0, n)
    for j, c in enumerate(coeffs):
        total = total + Cyc.eta(n, j) * c
    return total


@st.composite
def perm(draw, k=None):
    k = k or draw(st.integers(2, 4))
    return Permutation(tuple(draw(st.permutations(range(1, k + 1)))))


# --- cyclotomic arithmetic ------------------------------------------------------

@given(cyc(), cyc(), cyc())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@given(cyc())
def test_inverse(a):
    if a:
        assert a * a.inverse() == 1


@given(st.integers(1, 12), st.integers(-30, 30))
def test_eta_powers(n, p):
    assert Cyc.eta(n, p) == Cyc.eta(n) ** (p % n)


# --- binomials and series ------------------------------------------------------

@given(fractions, fractions, st.integers(0, 6))
def test_vandermonde(x, y, n):
    assert binomial(x + y, n) == sum(binomial(x, i) * binomial(y, n - i) for i in range(n + 1))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=4),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_binomial_exponents_add(a, b):
    cut = 5
    lhs = (expand_binomial(a, "z1", "z2", cut) * expand_binomial(b, "z1", "z2", cut)).truncate("z2", cut)
    assert lhs == expand_binomial(a + b, "z1", "z2", cut)


# --- oscillator modes ----------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.sampled_from(module_basis(0, 3)), st.sampled_from(module_basis(0, 3)),
       fractions, fractions, st.integers(-3, 3))
def test_mode_linearity(p, q, x, y, e):
    s = GradedVector.monomial(F(1, 2), (1,)) + GradedVector.monomial(F(1, 2), ())
    u, v = GradedVector.monomial(0, p), GradedVector.monomial(0, q)
    assert coefficient(u * x + v * y, e, s) == coefficient(u, e, s) * x + coefficient(v, e, s) * y


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.integers(0, 4), st.data())
def test_delta_round_trip(k, depth, data):
    m = data.draw(st.sampled_from(partitions(depth)))
    w = GradedVector.monomial(0, m)
    assert compose(lambda v: apply_delta(k, v, inverse=True), apply_delta(k, w)) == {F(0): w}


# --- eigencomponents -----------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.data())
def test_eigencomponents_resolve(k, data):
    u = TensorVector(k)
    for _ in range(data.draw(st.integers(1, 3))):
        slot = data.draw(st.integers(1, k))
        m = data.draw(st.sampled_from(module_basis(0, 3)))
        u = u + TensorVector.single(GradedVector.monomial(0, m), slot, k) * data.draw(fractions)
    parts = [eigencomponent(u, r) for r in range(k)]
    total = TensorVector(k)
    for r, p in enumerate(parts):
        assert p.sigma() == p * Cyc.eta(k, r)
        total = total + p
    assert total == u


# --- permutations and fusion ---------------------------------------------------

@given(perm(), st.data())
def test_conjugation_is_action(sigma, data):
    mu = data.draw(perm(sigma.k))
    nu = data.draw(perm(sigma.k))
    assert sigma.conjugate_by(mu * nu) == sigma.conjugate_by(mu).conjugate_by(nu)
    assert sigma.conjugate_by(mu).cycle_type() == sigma.cycle_type()


@given(perm())
def test_normal_form(sigma):
    kappa, mu = cycle_normal_form(sigma)
    assert list(kappa) == sorted(kappa, reverse=True)
    assert mu * sigma * mu.inverse() == sigma_kappa(kappa)


@given(perm())
def test_cycles_cover_points(sigma):
    pts = sorted(p for c in sigma.cycles for p in c)
    assert pts == list(range(1, sigma.k + 1))
    assert Permutation.parse(str(sigma), sigma.k) == sigma


RINGS = {name: load_ring(name) for name in ["Z2", "Z3", "Ising", "Fibonacci"]}


@st.composite
def fusion_case(draw):
    ring = RINGS[draw(st.sampled_from(sorted(RINGS)))]
    sigma = draw(perm())
    M = tuple(draw(st.sampled_from(ring.labels)) for _ in range(sigma.k))
    N = tuple(draw(st.sampled_from(ring.labels)) for _ in sigma.cycles)
    return ring, M, Twisted(sigma, N)


@settings(max_examples=60, deadline=None)
@given(fusion_case(), st.data())
def test_fusion_equivariance(case, data):
    ring, M, T = case
    mu = data.draw(perm(T.sigma.k))
    assert equivariance_holds(ring, M, T, mu)


@settings(max_examples=60, deadline=None)
@given(fusion_case())
def test_fusion_product_equals_iterate(case):
    ring, M, T = case
    assert orbifold_fuse(ring, M, T) == iterated_fuse(ring, M, T)


@settings(max_examples=40, deadline=None)
@given(fusion_case(), st.data())
def test_label_conjugation_round_trip(case, data):
    ring, M, T = case
    mu = data.draw(perm(T.sigma.k))
    moved = conjugate_label(T, mu)
    assert moved.sigma.cycle_type() == T.sigma.cycle_type()
    assert Counter(moved.labels) == Counter(T.labels)
    assert conjugate_label(moved, mu.inverse()) == T
