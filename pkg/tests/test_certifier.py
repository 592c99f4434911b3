import pytest
from hypothesis import given, settings, strategies as st

from nchinf import _linalg as la
from nchinf.algebra_core import MatrixAlgebra
from nchinf.certifier import (FALSE, INCONCLUSIVE, TRUE, condition_report, falsification_fuzz,
                              random_algebra, random_composition)
from nchinf.subalgebra import diagonal_algebra, make_nest, make_span


def exact_verdicts(rep):
    c = rep.conditions
    return c["a"], c["e"], c["f"]


def test_nest_report_all_true():
    rep = condition_report(make_nest(MatrixAlgebra(4), [1, 1, 2]))
    assert rep.all_true and rep.consistency
    assert rep.evidence["a"]["type"] == "exact"
    assert rep.evidence["d"]["type"] == "optimizer"
    assert rep.evidence["szego_implies_unique_extension"]


def test_diagonal_report_all_false(m2):
    rep = condition_report(diagonal_algebra(m2))
    assert rep.conditions == {"a": False, "b": FALSE, "c": FALSE, "d": FALSE, "e": False, "f": False}
    assert rep.consistency
    statuses = [s["status"] for s in rep.evidence["d"]["samples"]]
    assert "fails_certified" in statuses


def test_span_e12_report(m2):
    rep = condition_report(make_span(m2, [m2.unit(0, 1)]))
    assert exact_verdicts(rep) == (False, False, False)
    assert not rep.evidence["e"]["tau_maximal"]
    assert rep.consistency
    assert all(v in (FALSE, INCONCLUSIVE) for v in (rep.condition_b, rep.condition_c, rep.condition_d))


def test_report_serializes(m2):
    d = condition_report(make_nest(m2, [1, 1]), trials=3, szego_h_samples=1).to_dict()
    assert d["format"] == 1
    assert set(d["conditions"]) == set("abcdef")
    assert d["consistency"] is True


def test_random_algebra_families():
    S = random_algebra("nest", 4, 7)
    assert S.kind == "nest" and sum(S.block_sizes) == 4
    assert random_algebra("nest", 4, 7).block_sizes == S.block_sizes
    D = random_algebra("diagonal", 3, 0)
    assert D.dim_A == D.dim_D == 3
    P = random_algebra("span_perturbed_nest", 3, 5)
    N = random_algebra("nest", 3, 5)
    assert P.kind == "span" and (P.dim_A, P.dim_D) == (N.dim_A, N.dim_D)
    with pytest.raises(ValueError):
        random_algebra("triangle", 3, 0)
    with pytest.raises(ValueError):
        random_algebra("nest", 13, 0)


def test_random_composition_is_uniform():
    counts = {}
    for t in range(4000):
        c = tuple(random_composition(4, la.rng_for(t)))
        counts[c] = counts.get(c, 0) + 1
    assert len(counts) == 8
    assert all(abs(v - 500) < 120 for v in counts.values())
    assert all(sum(c) == 4 for c in counts)


@settings(max_examples=8)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_unitary_invariance(n, seed):
    nest = random_algebra("nest", n, seed)
    conj = random_algebra("span_perturbed_nest", n, seed)
    r1 = condition_report(nest, trials=5, seed=seed, szego_h_samples=2)
    r2 = condition_report(conj, trials=5, seed=seed, szego_h_samples=2)
    assert r1.conditions == r2.conditions
    assert r1.consistency and r2.consistency


@settings(max_examples=8)
@given(st.sampled_from(["nest", "diagonal"]), st.integers(1, 4), st.integers(0, 10**6))
def test_exact_true_forbids_certified_failure(family, n, seed):
    rep = condition_report(random_algebra(family, n, seed), trials=5, seed=seed, szego_h_samples=2)
    if rep.condition_e:
        assert rep.condition_b != FALSE
        assert rep.condition_d != FALSE
    assert rep.consistency


def test_fuzz_summary():
    s = falsification_fuzz(("nest", "diagonal"), (2, 3), trials=3, seed=1,
                           report_trials=4, szego_h_samples=1)
    assert s["reports"] == 6 and s["falsifications"] == 0
    assert s["per_family"]["nest"]["all_true"] == 3
    assert s["per_family"]["diagonal"]["consistent_false"] == 3
    empty = falsification_fuzz(("nest",), (2, 3), trials=0)
    assert empty["reports"] == 0 and empty["falsifications"] == 0


def test_one_dimensional_algebra_is_trivially_all_true():
    rep = condition_report(make_nest(MatrixAlgebra(1), [1]), trials=2, szego_h_samples=1)
    assert rep.all_true and rep.consistency
    assert TRUE == rep.condition_b
