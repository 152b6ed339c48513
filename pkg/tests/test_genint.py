from fractions import Fraction
from math import ceil

import pytest

from orbifusion.boson import FockIntertwiner, GradedVector, alpha_vector, conformal_vector, highest_weight
from orbifusion.genint import (GeneralizedIntertwiner, HImage, apply_YH, compare, exponent_window,
                               from_intertwiner, sources, verify_bracket, verify_homomorphism,
                               verify_technical_identity, verify_vacuum_identity, verify_vacuum_like,
                               verify_weak_commutativity, weak_commutativity_order)
from orbifusion.series import PuiseuxSeries, binomial, expand_binomial
from orbifusion.transport import ModuleMapInsertion, TransportedIntertwiner
from orbifusion.twisted import TensorVector, TwistedAction, eigencomponent, twisted_module

F = Fraction
LAM, MU = F(1, 2), F(1, 3)
A1, OMEGA = alpha_vector(1), conformal_vector()


def transported(k, lam=LAM, mu=MU):
    return TransportedIntertwiner(FockIntertwiner(lam, mu), k)


@pytest.fixture(scope="module")
def phi2():
    return GeneralizedIntertwiner(transported(2), highest_weight(LAM))


@pytest.fixture(scope="module")
def phi3():
    return GeneralizedIntertwiner(transported(3), highest_weight(LAM))


# --- residue oracle ----------------------------------------------------------

def residue_oracle(u: TensorVector, r: int, n: int, phi, K: int, a, s):
    """Coefficient of x^a in u^H_n phi applied to s, for u in the eta^r eigenspace,
    evaluated by multiplying out truncated two-variable series and taking Res_x1."""
    k = phi.k
    rT = F(r, k)
    step = F(1, k)
    act3, act2 = TwistedAction(phi.target), TwistedAction(phi.source)
    svec = GradedVector.monomial(phi.source.charge, s)
    lo_b = phi.lowest(s)
    lo_2 = min(act2.lowest(key, s) for key in u.terms)
    # largest power needed from the binomials, on either side
    span = max(a + rT + K - lo_b, ceil(-1 - rT - lo_2)) + 1

    def lattice(lo, hi):
        out, x = [], lo
        while x <= hi:
            out.append(x)
            x += step
        return out

    # Y_3(u, x1) phi(x) s
    e_hi = -1 - rT - n + span
    f3 = {}
    for b in lattice(lo_b, a + rT + K):
        vec = phi.coeff(b, s)
        if vec:
            for e in lattice(-1 - rT - K - 1, e_hi):
                img = act3.apply(u, e, vec)
                if img:
                    f3[(e, b)] = img
    F3 = PuiseuxSeries(("x1", "x"), f3, (e_hi, a + rT + K))
    # phi(x) Y_2(u, x1) s
    f2 = {}
    b_hi = a + rT + span - n
    for e in lattice(lo_2, -1 - rT):
        vec = act2.apply(u, e, svec)
        if vec:
            for b in lattice(lo_b - span, b_hi):
                img = phi.apply(b, vec)
                if img:
                    f2[(e, b)] = img
    F2 = PuiseuxSeries(("x1", "x"), f2, (None, b_hi))
    total = None
    for j in range(max(0, K - n)):
        N = n + j
        left = F3 * expand_binomial(N, "x1", "x", span)
        right = F2 * expand_binomial(N, "x1", "x", span, expand_in="x1").truncate("x", b_hi + N)
        piece = (left - right).shift("x1", rT).shift("x", -rT - j)
        c = binomial(-rT, j)
        got = piece.coefficient((-1, a), None)  # raises if outside the trusted window
        if got is not None and c:
            total = got * c if total is None else total + got * c
    return total if total is not None else GradedVector.zero(phi.target.charge)


@pytest.mark.parametrize("slot,r", [(1, 0), (1, 1), (2, 1)])
def test_H_action_matches_residue_oracle_k2(phi2, slot, r):
    u = eigencomponent(TensorVector.single(OMEGA, slot, 2), r)
    K = weak_commutativity_order(u, phi2)
    for n in (0, 1, -1):
        img = HImage(u, n, phi2, K)
        for s in sources(phi2, 1):
            for a in exponent_window(img, s, 3):
                assert img.coeff(a, s) == residue_oracle(u, r, n, phi2, K, a, s), (n, s, a)


def test_H_action_matches_residue_oracle_k3(phi3):
    u = eigencomponent(TensorVector.single(A1, 2, 3), 1)
    K = weak_commutativity_order(u, phi3)
    img = HImage(u, 0, phi3, K)
    for s in sources(phi3, 1):
        for a in exponent_window(img, s, 3):
            assert img.coeff(a, s) == residue_oracle(u, 1, 0, phi3, K, a, s)


# --- axioms and properties ---------------------------------------------------

def test_phi_from_fock_family_is_untwisted():
    phi = GeneralizedIntertwiner(FockIntertwiner(LAM, MU), highest_weight(LAM))
    assert phi.k == 1
    assert phi.coeff(LAM * MU, ()) == highest_weight(LAM + MU)


def test_vacuum_identity(phi2):
    for chk in verify_vacuum_identity(phi2):
        assert chk.passed, chk.to_dict()


def test_identity_on_module_map():
    mm = ModuleMapInsertion(twisted_module(MU, 2))
    phi = from_intertwiner(mm, GradedVector.monomial(0, ()))
    img = apply_YH(TensorVector.vacuum(2), -1, phi)
    assert compare("identity", img, phi, 1, 6).passed
    # phi itself is the identity series: coefficient of x^0 is the identity
    assert phi.coeff(0, (1,)) == GradedVector.monomial(MU, (1,))


@pytest.mark.parametrize("slot", [2])
@pytest.mark.parametrize("u", [A1, OMEGA, alpha_vector(2), GradedVector.monomial(0, (1, 1))])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_vacuum_like_slots_k2(phi2, slot, u, n):
    assert verify_vacuum_like(phi2, u, slot, n).passed


@pytest.mark.parametrize("slot", [2, 3])
@pytest.mark.parametrize("u", [A1, OMEGA])
def test_vacuum_like_slots_k3(phi3, slot, u):
    assert verify_vacuum_like(phi3, u, slot, 0).passed


def test_vacuum_like_fails_in_slot_one(phi2):
    assert not verify_vacuum_like(phi2, A1, 1, 0).passed


@pytest.mark.parametrize("u", [A1, OMEGA])
@pytest.mark.parametrize("n", [-2, -1, 0, 1])
def test_homomorphism(u, n):
    assert verify_homomorphism(transported(2), u, highest_weight(LAM), n).passed


def test_bracket(phi2, phi3):
    assert verify_bracket(phi2).passed
    assert verify_bracket(phi3).passed


def test_bracket_detects_mutant(phi2):
    class Shifted:
        def __init__(self, base):
            self.__dict__.update(base.__dict__)
            self.base = base

        def lowest(self, s):
            return self.base.lowest(s)

        def coeff(self, a, s):
            return self.base.coeff(a, s) * (2 if a == self.base.lowest(s) + 1 else 1)

        def apply(self, a, vec):
            out = GradedVector.zero(self.target.charge)
            for s, c in vec.terms.items():
                out = out + self.coeff(a, s) * c
            return out

    assert not verify_bracket(Shifted(phi2)).passed


@pytest.mark.parametrize("slot", [1, 2])
def test_weak_commutativity(phi2, slot):
    assert verify_weak_commutativity(phi2, TensorVector.single(OMEGA, slot, 2)).passed


def test_weak_commutativity_order_is_needed(phi2):
    u = TensorVector.single(OMEGA, 1, 2)
    assert not verify_weak_commutativity(phi2, u, K=0).passed


@pytest.mark.parametrize("slot,r", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_technical_identity_k2(phi2, slot, r):
    e = eigencomponent(TensorVector.single(OMEGA, slot, 2), r)
    assert verify_technical_identity(phi2, e, r, cutoff=4).passed


def test_technical_identity_k3(phi3):
    for r in range(3):
        e = eigencomponent(TensorVector.single(A1, 1, 3), r)
        assert verify_technical_identity(phi3, e, r, cutoff=4, count=3).passed


def test_result_independent_of_K(phi2):
    u = TensorVector.single(OMEGA, 2, 2)
    K = weak_commutativity_order(u, phi2)
    for n in (-1, 0, 1):
        assert compare("K independence", HImage(u, n, phi2, K), HImage(u, n, phi2, K + 2)).passed


def test_linearity_in_u(phi2):
    u = TensorVector.single(A1, 1, 2)
    v = TensorVector.single(OMEGA, 2, 2)
    lhs = HImage(u * 3 + v, 0, phi2)
    summed = HImage(u, 0, phi2, lhs.K)
    other = HImage(v, 0, phi2, lhs.K)
    for s in sources(phi2, 1):
        for a in exponent_window(lhs, s, 4):
            assert lhs.coeff(a, s) == summed.coeff(a, s) * 3 + other.coeff(a, s)
