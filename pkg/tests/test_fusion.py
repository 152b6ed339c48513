import json
from collections import Counter
from pathlib import Path

import pytest

from orbifusion.fusion import (FusionRing, LabelError, Permutation, RingError, Twisted, Untwisted,
                               all_permutations, all_untwisted, classify_twisted, conjugate_label,
                               cycle_normal_form, equivariance_holds, format_multiset, iterated_fuse,
                               load_ring, orbifold_fuse, shipped_rings, sigma_kappa, single_slot_fuse)

DATA = Path(__file__).parent / "data"
RINGS = ["Z2", "Z3", "Ising", "Fibonacci"]


def T(ring, perm, *labels, k=2):
    return Twisted(Permutation.parse(perm, k), tuple(ring.resolve(x) for x in labels))


def test_shipped_rings():
    assert set(RINGS) <= set(shipped_rings())


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "Z5", "Z6", "Ising", "Fibonacci"])
def test_ring_axioms(name):
    ring = load_ring(name)
    ring.validate()
    assert ring.fuse(ring.unit, ring.labels[-1]) == Counter({ring.labels[-1]: 1})


def _zn_label(i):
    return "1" if i == 0 else ("j" if i == 1 else f"j{i}")


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cyclic_rings_match_group_ring(n):
    ring = load_ring(f"Z{n}")
    for a in range(n):
        for b in range(n):
            assert ring.fuse(_zn_label(a), _zn_label(b)) == Counter({_zn_label((a + b) % n): 1})


def test_ising_and_fibonacci_rules():
    ising = load_ring("Ising")
    assert ising.fuse("σ", "σ") == Counter({"1": 1, "ε": 1})
    assert ising.fuse("sigma", "epsilon") == Counter({"σ": 1})
    fib = load_ring("Fibonacci")
    assert fib.fuse("τ", "τ") == Counter({"1": 1, "τ": 1})
    assert fib.fuse_many(["τ", "τ", "τ"]) == Counter({"1": 1, "τ": 2})


def test_corrupted_ring_names_quadruple():
    with pytest.raises(RingError, match=r"associativity fails for \(a,b,c,d\) = \(σ, σ, ε, 1\)"):
        FusionRing.load(DATA / "ising_corrupt.json")


def test_ring_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(RingError, match="invalid JSON"):
        FusionRing.load(bad)
    with pytest.raises(RingError, match="cannot read"):
        FusionRing.load(tmp_path / "missing.json")
    data = load_ring("Z2").to_dict()
    data["N"].append(["1", "q", "1", 1])
    with pytest.raises(RingError, match="unknown label"):
        FusionRing.from_dict(data)
    data = load_ring("Z2").to_dict()
    data["N"] = [row for row in data["N"] if row[:2] != ["1", "j"]]
    with pytest.raises(RingError, match="unit law"):
        FusionRing.from_dict(data)


def test_round_trip_to_dict():
    ring = load_ring("Ising")
    again = FusionRing.from_dict(json.loads(json.dumps(ring.to_dict())))
    assert again.N == ring.N and again.aliases == ring.aliases


def test_unknown_label():
    with pytest.raises(LabelError):
        load_ring("Ising").resolve("x")


# --- permutations -------------------------------------------------------------

def test_parse_and_cycles():
    p = Permutation.parse("(1 3)", 3)
    assert p.images == (3, 2, 1)
    assert p.cycles == ((1, 3), (2,))
    assert str(Permutation.parse("(2 3 1)", 3)) == "(1 2 3)"
    assert Permutation.parse("id", 2).is_identity()
    with pytest.raises(LabelError):
        Permutation.parse("(1 3)", 2)
    with pytest.raises(LabelError):
        Permutation.parse("(1 2", 3)
    with pytest.raises(LabelError):
        Permutation.parse("(1 1)", 3)


def test_cycle_normal_form_example():
    kappa, mu = cycle_normal_form(Permutation.parse("(1 3)", 3))
    assert kappa == (2, 1)
    assert mu == Permutation.parse("(2 3)", 3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_cycle_normal_form_conjugates_to_block(k):
    for sigma in all_permutations(k):
        kappa, mu = cycle_normal_form(sigma)
        assert mu * sigma * mu.inverse() == sigma_kappa(kappa)


def test_conjugation_convention():
    sigma = Permutation.parse("(1 2 3)", 3)
    mu = Permutation.parse("(1 2)", 3)
    assert sigma.conjugate_by(mu) == Permutation.parse("(1 3 2)", 3)


# --- orbifold fusion ----------------------------------------------------------

def test_ising_example():
    ring = load_ring("Ising")
    got = orbifold_fuse(ring, ["σ", "σ"], T(ring, "(1 2)", "1"))
    assert got == Counter({T(ring, "(1 2)", "1"): 1, T(ring, "(1 2)", "ε"): 1})
    assert format_multiset(got) == "T(1 2)(1) + T(1 2)(ε)"


def test_z2_example():
    ring = load_ring("Z2")
    assert orbifold_fuse(ring, ["j", "j"], T(ring, "(1 2)", "1")) == Counter({T(ring, "(1 2)", "1"): 1})


def test_fibonacci_multiplicity():
    ring = load_ring("Fibonacci")
    got = orbifold_fuse(ring, ["τ", "τ"], T(ring, "(1 2)", "τ"))
    assert got == Counter({T(ring, "(1 2)", "1"): 1, T(ring, "(1 2)", "τ"): 2})
    assert format_multiset(got) == "T(1 2)(1) + 2*T(1 2)(τ)"


def test_untwisted_sector_is_slotwise():
    ring = load_ring("Ising")
    got = orbifold_fuse(ring, ["σ", "ε"], T(ring, "()", "σ", "σ"))
    assert got == Counter({T(ring, "()", "1", "σ"): 1, T(ring, "()", "ε", "σ"): 1})


def test_label_count_mismatch():
    ring = load_ring("Z2")
    with pytest.raises(LabelError):
        T(ring, "()", "1")
    with pytest.raises(LabelError):
        orbifold_fuse(ring, ["j"], T(ring, "(1 2)", "1"))


@pytest.mark.parametrize("name", RINGS)
@pytest.mark.parametrize("k", [2, 3])
def test_classification_counts(name, k):
    ring = load_ring(name)
    for sigma in all_permutations(k):
        assert len(classify_twisted(ring, sigma)) == len(ring.labels) ** len(sigma.cycles)
    assert len(all_untwisted(ring, k)) == len(ring.labels) ** k


@pytest.mark.parametrize("name", RINGS)
@pytest.mark.parametrize("k", [2, 3])
def test_product_equals_iterate(name, k):
    ring = load_ring(name)
    for sigma in all_permutations(k):
        for tw in classify_twisted(ring, sigma):
            for M in all_untwisted(ring, k):
                assert orbifold_fuse(ring, M, tw) == iterated_fuse(ring, M, tw), (M, tw)


@pytest.mark.parametrize("name", RINGS)
def test_unit_laws(name):
    ring = load_ring(name)
    for k in (2, 3):
        ones = [ring.unit] * k
        for sigma in all_permutations(k):
            for tw in classify_twisted(ring, sigma):
                assert orbifold_fuse(ring, ones, tw) == Counter({tw: 1})


@pytest.mark.parametrize("name", ["Ising", "Fibonacci", "Z3"])
def test_conjugation_equivariance(name):
    ring = load_ring(name)
    k = 3
    for sigma in all_permutations(k):
        for tw in classify_twisted(ring, sigma):
            for mu in all_permutations(k):
                for M in all_untwisted(ring, k)[:9]:
                    assert equivariance_holds(ring, M, tw, mu)


def test_conjugate_label_moves_slots():
    ring = load_ring("Ising")
    mu = Permutation.parse("(1 2)", 3)
    assert conjugate_label(Untwisted(("σ", "1", "ε")), mu) == Untwisted(("1", "σ", "ε"))
    tw = T(ring, "(1 2)", "σ", "ε", k=3)
    moved = conjugate_label(tw, Permutation.parse("(2 3)", 3))
    assert moved.sigma == Permutation.parse("(1 3)", 3)
    assert moved.label_at(2) == "ε" and moved.label_at(1) == "σ"


def test_single_slot_fuse_touches_one_cycle():
    ring = load_ring("Ising")
    tw = T(ring, "(1 2)", "σ", "σ", k=3)
    got = single_slot_fuse(ring, 3, "σ", tw)
    assert got == Counter({T(ring, "(1 2)", "σ", "1", k=3): 1, T(ring, "(1 2)", "σ", "ε", k=3): 1})
