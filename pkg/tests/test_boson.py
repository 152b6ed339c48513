from fractions import Fraction

import pytest

from oracles import osc, virasoro_oracle
from orbifusion.boson import (FockIntertwiner, FockModule, GradedVector, WindowError, alpha, alpha_vector,
                              coefficient, conformal_vector, contragredient, contragredient_series,
                              fock_intertwiner, highest_weight, mode, module_basis, normal_ordered_mode,
                              pairing, partitions, vacuum, vertex_operator, virasoro)

F = Fraction


def as_dict(v: GradedVector) -> dict:
    return dict(v.terms)


def test_module_basis_examples():
    assert module_basis(0, 2) == [(), (1,), (2,), (1, 1)]
    assert module_basis(0, 0) == [()]
    assert module_basis(F(1, 2), F(9, 8)) == [(), (1,)]
    with pytest.raises(ValueError):
        module_basis(1, F(1, 4))


def test_partition_counts():
    assert [len(partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


def test_vacuum_operator_is_identity():
    ser = vertex_operator(vacuum(), F(1, 2), (-3, 3), F(1, 8) + 3)
    assert ser.exponents() == [0]
    for m, img in ser.entries[F(0)].items():
        assert img == GradedVector.monomial(F(1, 2), m)


def test_alpha_zero_mode_is_charge():
    lam = F(3, 5)
    ser = vertex_operator(alpha_vector(1), lam, (-1, -1), lam ** 2 / 2)
    assert ser.apply(-1, highest_weight(lam)) == highest_weight(lam) * lam


def test_omega_zero_mode_on_alpha():
    assert coefficient(conformal_vector(), -2, alpha_vector(1)) == alpha_vector(1)


def test_virasoro_examples():
    assert virasoro(0, alpha_vector(2)) == alpha_vector(2) * 2
    lam = F(1, 2)
    assert virasoro(1, alpha_vector(1, lam)) == highest_weight(lam) * lam
    assert not virasoro(-1, vacuum())


@pytest.mark.parametrize("lam", [F(0), F(1, 2), F(-2, 3)])
def test_virasoro_matches_oscillator_oracle(lam):
    for m in module_basis(lam, lam ** 2 / 2 + 4):
        for n in range(-3, 4):
            got = as_dict(virasoro(n, GradedVector.monomial(lam, m)))
            want = virasoro_oracle(n, {m: F(1)}, lam)
            assert got == want, (m, n)


def test_alpha_matches_oscillator_oracle():
    lam = F(1, 3)
    for m in module_basis(lam, lam ** 2 / 2 + 3):
        for n in range(-3, 4):
            assert as_dict(alpha(n, GradedVector.monomial(lam, m))) == osc(n, {m: F(1)}, lam)


@pytest.mark.parametrize("parts", [(1,), (2,), (1, 1), (2, 1), (3,), (1, 1, 1)])
def test_modes_match_normal_ordered_products(parts):
    s = GradedVector.monomial(F(1, 2), (2, 1)) + GradedVector.monomial(F(1, 2), ())
    v = GradedVector.monomial(0, parts)
    for q in range(-4, 5):
        assert mode(v, q, s) == normal_ordered_mode(parts, q, s)


def test_grading_of_modes():
    lam = F(1, 2)
    for vm in module_basis(0, 3):
        v = GradedVector.monomial(0, vm)
        for sm in module_basis(lam, lam ** 2 / 2 + 2):
            s = GradedVector.monomial(lam, sm)
            for q in range(-3, 4):
                img = mode(v, q, s)
                for w in img.weights():
                    assert w == v.weight() - q - 1 + s.weight()


def test_intertwiner_lam_zero_is_vertex_operator():
    a = fock_intertwiner(0, F(1, 2), conformal_vector(), (-4, 2), F(1, 8) + 2)
    b = vertex_operator(conformal_vector(), F(1, 2), (-4, 2), F(1, 8) + 2)
    assert a.entries == b.entries


def test_intertwiner_exponent_support():
    ser = fock_intertwiner(1, 1, alpha_vector(1, 1), (-4, 4), F(1, 2) + 2)
    assert ser.exponents() and all(e.denominator == 1 for e in ser.exponents())
    ser = fock_intertwiner(F(1, 2), F(1, 3), highest_weight(F(1, 2)), (-3, 3), F(1, 18) + 2)
    assert ser.exponents() and all((e - F(1, 6)).denominator == 1 for e in ser.exponents())


def test_intertwiner_leading_normalization():
    lam, mu = F(1, 2), F(1, 3)
    Y = FockIntertwiner(lam, mu)
    lead = Y.coeff((), lam * mu, ())
    assert lead == highest_weight(lam + mu)
    assert Y.lowest((), ()) == lam * mu
    assert not Y.coeff((), lam * mu - 1, ())


def test_intertwiner_derivative_property():
    lam, mu = F(1, 2), F(1, 3)
    Y = FockIntertwiner(lam, mu)
    for wm in module_basis(lam, lam ** 2 / 2 + 2):
        w = GradedVector.monomial(lam, wm)
        lw = virasoro(-1, w)
        for sm in module_basis(mu, mu ** 2 / 2 + 1):
            s = GradedVector.monomial(mu, sm)
            lo = Y.lowest(wm, sm)
            for i in range(6):
                a = lo + i - 1
                assert Y.apply(lw, a, s) == Y.apply(w, a + 1, s) * (a + 1)


def test_weak_commutativity_in_vertex_algebra():
    lam = F(1, 2)
    vecs = [alpha_vector(1), conformal_vector(), alpha_vector(2)]
    s = highest_weight(lam)
    for u in vecs:
        for v in vecs:
            p = u.weight() + v.weight()  # generous order
            p = int(p)
            for e1 in range(-5, 2):
                for e2 in range(-5, 2):
                    acc = GradedVector.zero(lam)
                    for l in range(p + 1):
                        c = F((-1) ** l) * __import__("math").comb(p, l)
                        acc = acc + (coefficient(u, e1 - p + l, coefficient(v, e2 - l, s))
                                     - coefficient(v, e2 - l, coefficient(u, e1 - p + l, s))) * c
                    assert not acc


def test_weak_associativity_in_vertex_algebra():
    # (z0+z2)^n Y(u,z0+z2)Y(v,z2)w = (z2+z0)^n Y(Y(u,z0)v,z2)w at z0^c z2^b
    from math import comb
    lam = F(1, 2)
    w = highest_weight(lam)
    for u in (alpha_vector(1), conformal_vector()):
        v = alpha_vector(1)
        n = int(u.weight() + w.weight() - lam ** 2 / 2) + 1
        for c in range(0, 3):
            for b in range(-4, 1):
                left = GradedVector.zero(lam)
                for f in range(-12, b + 1):
                    e = c + b - f - n
                    coef = F(comb(n + e, b - f)) if n + e >= 0 else \
                        F((-1) ** (b - f)) * comb(b - f - n - e - 1, b - f)
                    if coef:
                        left = left + coefficient(u, e, coefficient(v, f, w)) * coef
                right = GradedVector.zero(lam)
                for i in range(n + 1):
                    right = right + coefficient(coefficient(u, c - i, v), b - n + i, w) * comb(n, i)
                assert left == right, (u, c, b)


def test_window_error():
    with pytest.raises(WindowError):
        fock_intertwiner(F(1, 2), F(1, 3), highest_weight(F(1, 2)), (F(1, 2), F(1, 2)), F(1, 18))


# --- contragredient -------------------------------------------------------

def test_contragredient_vacuum_is_identity():
    ser = contragredient_series(F(1, 2), vacuum(), (-2, 2), F(1, 8) + 3)
    assert ser.exponents() == [0]
    for f, img in ser.entries[F(0)].items():
        assert img == GradedVector.monomial(F(1, 2), f)


def test_contragredient_l0_spectrum():
    lam = F(1, 2)
    con = contragredient(lam)
    for f in module_basis(lam, lam ** 2 / 2 + 3):
        img = con.coeff(conformal_vector(), -2, f)
        assert img == GradedVector.monomial(lam, f) * FockModule(lam).weight(f)


def test_contragredient_pairing_against_oscillator_adjoint():
    # alpha'(n) is minus the transpose of alpha(-n)
    lam = F(1, 3)
    con = contragredient(lam)
    basis = module_basis(lam, lam ** 2 / 2 + 3)
    samples = [((), 1), ((1,), -1), ((2,), 0), ((1, 1), 1), ((2, 1), 2)]
    for f, n in samples:
        img = con.coeff(alpha_vector(1), -n - 1, f)
        fv = GradedVector.monomial(lam, f)
        for u in basis:
            lhs = pairing(img, GradedVector.monomial(lam, u))
            rhs = -osc(-n, {u: F(1)}, lam).get(f, 0)
            assert lhs == rhs, (f, n, u)
        assert pairing(fv, GradedVector.monomial(lam, f)) == 1
