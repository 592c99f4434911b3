import numpy as np
import pytest
from hypothesis import given, strategies as st

from nchinf import _linalg as la
from nchinf.algebra_core import (MatrixAlgebra, NotPositiveError, adjoint, fk_determinant, fro,
                                 modulus, spectral_apply)
from nchinf.certifier import random_algebra
from nchinf.factorization import (FactorizationError, NotInDError, factor_cholesky,
                                  factor_failure_ratio, factor_projection, logmodularity_check,
                                  partial_factorization_certificate, s2_inclusion_check,
                                  unique_state_extension_check)
from nchinf.subalgebra import diagonal_algebra, l2_density_check, make_nest, make_span, \
    tau_maximality_check

from conftest import nests, random_spd

B = np.array([[2.0, 1.0], [1.0, 1.0]])


def _agreement(S, proj, chol):
    """The D-unitary relating two factors of the same b, and its defect."""
    if proj.side == "right":
        w = proj.factor @ np.linalg.inv(chol.factor)
    else:
        w = np.linalg.inv(chol.factor) @ proj.factor
    return fro(adjoint(w) @ w - np.eye(S.n)), S.distance_to("D", w)


# -- block Cholesky ---------------------------------------------------------

def test_cholesky_examples(m2, nest11):
    res = factor_cholesky(nest11, B, "right")
    expected = np.array([[np.sqrt(2), 1 / np.sqrt(2)], [0.0, 1 / np.sqrt(2)]])
    assert np.allclose(res.factor, expected, atol=1e-14)
    assert res.residual <= 1e-10
    assert np.allclose(factor_cholesky(nest11, m2.identity()).factor, np.eye(2))
    assert np.allclose(factor_cholesky(nest11, np.diag([4.0, 9.0])).factor, np.diag([2.0, 3.0]))


def test_cholesky_errors(m2, nest11):
    with pytest.raises(FactorizationError):
        factor_cholesky(diagonal_algebra(m2), B)
    with pytest.raises(NotPositiveError):
        factor_cholesky(nest11, np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        factor_cholesky(nest11, B, "middle")


@given(nests(n_max=8), st.integers(0, 10**6), st.sampled_from(["right", "left"]))
def test_cholesky_is_exact_factorization(S, seed, side):
    b = random_spd(la.rng_for(seed), S.n, 1e3)
    res = factor_cholesky(S, b, side)
    assert res.residual <= 1e-10
    assert res.membership_a <= 1e-12 and res.membership_a_inv <= 1e-8
    recon = adjoint(res.factor) @ res.factor if side == "right" else res.factor @ adjoint(res.factor)
    assert fro(recon - b) == pytest.approx(res.residual * fro(b), rel=1e-6, abs=1e-13)


# -- projection construction ------------------------------------------------

def test_projection_example_agrees_with_cholesky(nest11):
    for side in ("right", "left"):
        proj = factor_projection(nest11, B, side)
        chol = factor_cholesky(nest11, B, side)
        defect, off_d = _agreement(nest11, proj, chol)
        assert defect <= 1e-7 and off_d <= 1e-8
    assert np.allclose(factor_projection(nest11, B, "left").factor, [[1.0, 1.0], [0.0, 1.0]])


def test_projection_identity(m2, nest11):
    res, steps = factor_projection(nest11, m2.identity(), return_steps=True)
    assert np.allclose(res.factor, np.eye(2))
    assert np.allclose(steps["p"], 0) and np.allclose(steps["e"], np.eye(2))


def test_projection_fails_on_diagonal_algebra(m2):
    with pytest.raises(NotInDError) as info:
        factor_projection(diagonal_algebra(m2), np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert info.value.off_diagonal > 0.1


@given(nests(n_max=8), st.integers(0, 10**6), st.sampled_from(["right", "left"]))
def test_projection_matches_cholesky(S, seed, side):
    b = random_spd(la.rng_for(seed), S.n, 1e3)
    proj, steps = factor_projection(S, b, side, return_steps=True)
    chol = factor_cholesky(S, b, side)
    assert proj.residual <= 1e-7
    assert proj.membership_a <= 1e-8 and proj.membership_a_inv <= 1e-8
    assert proj.phi_certificate <= 1e-7
    defect, off_d = _agreement(S, proj, chol)
    assert defect <= 1e-7 and off_d <= 1e-7
    # proof-step assertions: w in D and bounded below
    assert steps["off_diagonal"] <= 1e-9
    assert steps["w_min_eig"] > 0
    # Phi(a) = e and it is positive after phase normalization
    assert fro(S.phi(proj.factor) - steps["e"]) <= 1e-8 * fro(steps["e"])
    pa = S.phi(proj.factor)
    assert np.linalg.eigvalsh(0.5 * (pa + adjoint(pa)))[0] > 0


def test_failure_ratio(m2, nest11):
    assert factor_failure_ratio(nest11, B) <= 1.0
    assert factor_failure_ratio(diagonal_algebra(m2), B) > 1e3


def test_to_dict_is_scalar_serializable(nest11):
    d = factor_projection(nest11, B).to_dict()
    assert d["side"] == "right" and d["factor"]["n"] == 2
    assert isinstance(d["residual"], float)


# -- partial factorization --------------------------------------------------

def test_partial_certificate_examples(m2, nest11):
    a, c = partial_factorization_certificate(nest11, m2.identity())
    assert np.allclose(a.factor, np.eye(2)) and np.allclose(c.factor, np.eye(2))
    a, c = partial_factorization_certificate(nest11, np.diag([2.0, 3.0]))
    assert np.allclose(a.factor, np.diag([2.0, 3.0])) and np.allclose(c.factor, np.diag([2.0, 3.0]))
    root = spectral_apply(m2, np.sqrt, B)
    a, c = partial_factorization_certificate(nest11, root)
    assert fro(modulus(m2, a.factor) - root) <= 1e-8
    assert fro(modulus(m2, adjoint(c.factor)) - root) <= 1e-8
    assert a.phi_certificate <= 1e-7 and c.phi_certificate <= 1e-7


# -- logmodularity ----------------------------------------------------------

def test_logmodularity_examples(m2):
    ok, worst = logmodularity_check(make_nest(MatrixAlgebra(4), [1, 2, 1]))
    assert ok and worst <= 1.0
    ok, worst = logmodularity_check(diagonal_algebra(m2))
    assert not ok and worst > 1e3
    assert logmodularity_check(make_nest(m2, [2]))[0]


@given(nests(n_max=6), st.integers(0, 1000))
def test_nests_are_logmodular(S, seed):
    assert logmodularity_check(S, trials=5, seed=seed)[0]
    assert s2_inclusion_check(S, trials=5, seed=seed)


def test_s2_inclusion_examples(m2, nest11):
    assert s2_inclusion_check(nest11)
    a = np.array([[1.0, 3.0], [0.0, 1.0]])
    for m in (1, 10, 100):
        assert fk_determinant(m2, adjoint(a) @ a + np.eye(2) / m) > 1.0


# -- unique state extension -------------------------------------------------

def test_unique_extension_examples(m2, nest11):
    assert unique_state_extension_check(nest11)
    assert unique_state_extension_check(make_nest(m2, [2]))
    res = unique_state_extension_check(make_span(m2, [m2.unit(0, 1)]))
    assert not res
    g = res.witness
    assert np.allclose(g, np.diag(np.diag(g)))  # diag(1 + eps, 1 - eps)
    assert np.trace(g).real / 2 == pytest.approx(1.0)
    assert abs(np.trace(g @ m2.unit(0, 1))) < 1e-14
    assert res.witness_checks["min_eigenvalue"] > 0
    assert res.witness_checks["distance_from_one"] > 0.1
    assert not unique_state_extension_check(diagonal_algebra(m2))


@given(st.sampled_from(["nest", "span_perturbed_nest", "diagonal"]), st.integers(1, 5),
       st.integers(0, 10**6))
def test_unique_extension_witness_certified(family, n, seed):
    S = random_algebra(family, n, seed)
    res = unique_state_extension_check(S)  # raises if the two reductions disagree
    if not res:
        chk = res.witness_checks
        assert chk["min_eigenvalue"] >= 0.0
        assert chk["max_pairing_defect"] <= 1e-10
        assert chk["distance_from_one"] > 0


@given(nests(n_max=6))
def test_unique_extension_and_maximality_imply_density(S):
    if unique_state_extension_check(S) and tau_maximality_check(S):
        assert l2_density_check(S)
