from fractions import Fraction

import pytest

from oracles import an_oracle
from orbifusion.boson import (GradedVector, alpha_vector, conformal_vector, highest_weight, vacuum,
                              virasoro)
from orbifusion.delta import (apply_delta, apply_phi, compose, flow, omega_image_expected, solve_an,
                              verify_delta_conjugation, verify_derivative_identity,
                              verify_l_minus_one_bracket, verify_phi_conjugation)

F = Fraction

# first coefficients, frozen from the vector-field oracle
FROZEN = {
    2: [F(-1, 2), F(1, 4), F(-3, 16), F(1, 6), F(-31, 192)],
    3: [F(-1), F(2, 3), F(-2, 3)],
    4: [F(-3, 2), F(5, 4), F(-25, 16)],
    5: [F(-2), F(2), F(-3)],
    6: [F(-5, 2), F(35, 12), F(-245, 48)],
}

SAMPLES = [vacuum(), alpha_vector(1), conformal_vector(), GradedVector.monomial(0, (1, 1))]


@pytest.mark.parametrize("k", range(1, 7))
def test_solver_matches_oracle(k):
    assert list(solve_an(k, 12).a) == an_oracle(k, 12)


@pytest.mark.parametrize("k", sorted(FROZEN))
def test_frozen_values(k):
    want = FROZEN[k]
    assert list(solve_an(k, len(want)).a) == want


def test_k_one_is_trivial():
    assert all(x == 0 for x in solve_an(1, 12).a)


@pytest.mark.parametrize("k", range(2, 7))
def test_first_coefficient(k):
    assert solve_an(k, 1)[1] == F(-(k - 1), 2)


def test_flow_reproduces_target():
    k, N = 3, 8
    got = flow(list(solve_an(k, N).a), N + 1)
    from math import comb
    assert got[1:] == [F(comb(k, m), k) for m in range(1, N + 2)]


def test_perturbation_breaks_identity():
    k, N = 4, 6
    a = list(solve_an(k, N).a)
    a[2] += F(1, 1000)
    from math import comb
    assert flow(a, N + 1)[4] != F(comb(k, 4), k)


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve_an(0, 3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_omega_image(k):
    assert apply_delta(k, conformal_vector()) == omega_image_expected(k)


def test_omega_image_constant_k2():
    img = omega_image_expected(2)
    assert img[F(-2)] == vacuum() * F(1, 32)


def test_vacuum_fixed():
    for k in (2, 3):
        assert apply_delta(k, vacuum()).entries == {F(0): vacuum()}
        assert apply_phi(k, vacuum()).entries == {F(0): vacuum()}


def test_alpha_image():
    # Delta_2(z) alpha(-1)1 = (1/2) z^{-1/2} alpha(-1)1: no lowering survives
    img = apply_delta(2, alpha_vector(1)).entries
    assert img == {F(-1, 2): alpha_vector(1) * F(1, 2)}


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("w", SAMPLES)
def test_derivative_identity(k, w):
    assert verify_derivative_identity(k, w, 5).passed


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("w", SAMPLES)
def test_l_minus_one_bracket(k, w):
    assert verify_l_minus_one_bracket(k, w, 5).passed


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("w", SAMPLES + [GradedVector.monomial(0, (2, 1))])
def test_inverse_round_trip(k, w):
    inv = lambda v: apply_delta(k, v, inverse=True)
    assert compose(inv, apply_delta(k, w)) == {F(0): w}
    assert compose(lambda v: apply_delta(k, v), inv(w)) == {F(0): w}


def test_round_trip_on_charged_module():
    lam = F(1, 2)
    w = GradedVector.monomial(lam, (2,)) + highest_weight(lam)
    got = compose(lambda v: apply_delta(3, v, inverse=True), apply_delta(3, w))
    assert got == {F(0): w}


def test_phi_is_delta_inverse_at_z_power():
    # Phi_k(z) v and Delta_k(y)^{-1} v agree after y = z^k
    k = 3
    for w in SAMPLES:
        inv = apply_delta(k, w, inverse=True).entries
        phi = apply_phi(k, w).entries
        assert {e * k: v for e, v in inv.items()} == phi


@pytest.mark.parametrize("k", [2, 3])
def test_delta_conjugation(k):
    assert verify_delta_conjugation(k, alpha_vector(1), highest_weight(F(1, 2)), 3).passed


@pytest.mark.parametrize("k", [2, 3])
def test_phi_conjugation(k):
    assert verify_phi_conjugation(k, alpha_vector(1), highest_weight(F(1, 2)), 3).passed
    assert verify_phi_conjugation(k, conformal_vector(), alpha_vector(1), 2).passed


def test_omega_comparison_detects_wrong_constant():
    img = dict(apply_delta(2, conformal_vector()).entries)
    img[F(-2)] = img[F(-2)] * 2
    assert not (apply_delta(2, conformal_vector()) == {**omega_image_expected(2), F(-2): vacuum()})
    assert img != omega_image_expected(2)
