"""Factorization of strictly positive matrices through a tracial subalgebra.

``factor_projection`` is the weighted-projection construction: project 1 onto
A_0 in the b^{-1}-weighted inner product, compress, and normalize by an
element of D.  ``factor_cholesky`` is an independent block Cholesky used as an
oracle on nest algebras.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from . import tolerances
from .algebra_core import (
    MatrixAlgebra,
    NotPositiveError,
    adjoint,
    fk_determinant,
    fro,
    hermitian_part,
    polar,
    spectral_apply,
)
from .determinant import random_invertible, random_unit_positive
from .subalgebra import TracialSubalgebra, annihilator, random_element


class FactorizationError(ValueError):
    pass


class NotInDError(FactorizationError):
    """The compressed weight (1-p) b (1-p)* is not in D."""

    def __init__(self, message, off_diagonal: float):
        super().__init__(message)
        self.off_diagonal = off_diagonal


class ConsistencyError(RuntimeError):
    pass


@dataclass
class FactorizationResult:
    factor: np.ndarray
    side: str
    residual: float
    membership_a: float
    membership_a_inv: float
    phi_certificate: float

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "factor": matrix_to_json(self.factor),
            "side": self.side,
            "residual": self.residual,
            "membership_a": self.membership_a,
            "membership_a_inv": self.membership_a_inv,
            "phi_certificate": self.phi_certificate,
        }


def _check_side(side: str) -> None:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _positive_definite(alg: MatrixAlgebra, b) -> np.ndarray:
    b = hermitian_part(alg, b)
    lam = np.linalg.eigvalsh(b)
    if lam[0] <= tolerances.current().eig_clamp * max(1.0, abs(lam[-1])):
        raise NotPositiveError("b must be strictly positive")
    return b


def _relative_membership(S: TracialSubalgebra, x) -> float:
    return S.distance_to("A", x) / (1.0 + fro(x))


def _phase_normalize(S: TracialSubalgebra, a: np.ndarray, side: str) -> np.ndarray:
    # make Phi(a) positive by a unitary of D on the side that leaves b unchanged
    v, _ = polar(S.alg, S.phi(a))
    return adjoint(v) @ a if side == "right" else a @ adjoint(v)


def _result(S: TracialSubalgebra, a: np.ndarray, b: np.ndarray, side: str) -> FactorizationResult:
    recon = adjoint(a) @ a if side == "right" else a @ adjoint(a)
    a_inv = np.linalg.inv(a)
    one = S.alg.identity()
    return FactorizationResult(
        factor=a,
        side=side,
        residual=fro(recon - b) / fro(b),
        membership_a=_relative_membership(S, a),
        membership_a_inv=_relative_membership(S, a_inv),
        phi_certificate=fro(S.phi(a) @ S.phi(a_inv) - one),
    )


def factor_cholesky(S: TracialSubalgebra, b, side: str = "right") -> FactorizationResult:
    """Block Cholesky along the nest's flag.

    Returns block upper-triangular a with positive definite diagonal blocks and
    a* a = b (right) or a a* = b (left).
    """
    _check_side(side)
    if S.kind != "nest":
        raise FactorizationError("block Cholesky needs a nest algebra")
    alg = S.alg
    b = _positive_definite(alg, b)
    edges = np.concatenate([[0], np.cumsum(S.block_sizes)])
    blocks = [slice(edges[k], edges[k + 1]) for k in range(len(S.block_sizes))]
    work = b.copy()
    a = np.zeros_like(b)
    order = blocks if side == "right" else blocks[::-1]
    for blk in order:
        piv = work[blk, blk]
        piv = 0.5 * (piv + adjoint(piv))
        root = spectral_apply(MatrixAlgebra(piv.shape[0]), np.sqrt, piv)
        root_inv = np.linalg.inv(root)
        if side == "right":
            # row block: b[k, :] = a_kk* a[k, :]
            row = root_inv @ work[blk, :]
            row[:, : blk.start] = 0.0
            row[:, blk] = root
            a[blk, :] = row
            work = work - adjoint(row) @ row
        else:
            # column block: b[:, k] = a[:, k] a_kk*
            col = work[:, blk] @ root_inv
            col[blk.stop:, :] = 0.0
            col[blk, :] = root
            a[:, blk] = col
            work = work - col @ adjoint(col)
    return _result(S, a, b, side)


def _weighted_gram(S: TracialSubalgebra, weight: np.ndarray, side: str):
    """Gram matrix of the A0 basis and the right-hand side for projecting 1.

    right: <f, g> = tau(f w g*);  left: <f, g> = tau(g* w f).
    """
    n = S.n
    C = S.mats("A0")
    Cc = np.conj(C.reshape(C.shape[0], -1))
    if side == "right":
        prod = (C @ weight).reshape(C.shape[0], -1)
    else:
        prod = (weight @ C).reshape(C.shape[0], -1)
    G = Cc @ prod.T / n
    r = Cc @ weight.reshape(-1) / n
    return G, r


def _solve_gram(G: np.ndarray, r: np.ndarray) -> np.ndarray:
    m = G.shape[0]
    reg = 1e-12 * np.trace(G).real / m
    return np.linalg.solve(G + reg * np.eye(m), r)


def projection_of_one(S: TracialSubalgebra, weight, side: str = "right") -> np.ndarray:
    """The weighted-orthogonal projection p of 1 onto A0."""
    if S.dim_A0 == 0:
        return np.zeros((S.n, S.n), dtype=complex)
    G, r = _weighted_gram(S, weight, side)
    x = _solve_gram(G, r)
    return np.tensordot(x, S.mats("A0"), axes=1)


def factor_projection(S: TracialSubalgebra, b, side: str = "right",
                      return_steps: bool = False):
    """Factor b = a* a (right) or b = a a* (left) with a in A by weighted projection.

    With w' = b^{-1}: p projects 1 onto A0, w = (1-p) w' (1-p)* (right) or
    (1-p)* w' (1-p) (left) must lie in D, e = w^{-1/2}, and a = e (1-p) or
    (1-p) e.  Then a w' a* = 1, i.e. b = a* a (and symmetrically on the left);
    Phi(a) = e.  Raises ``NotInDError`` when w leaves D, which happens exactly
    when A lacks the unique normal state extension property for this b.
    """
    _check_side(side)
    alg = S.alg
    b = _positive_definite(alg, b)
    tol = tolerances.current()
    weight = np.linalg.inv(b)
    weight = 0.5 * (weight + adjoint(weight))
    one = alg.identity()
    p = projection_of_one(S, weight, side)
    q = one - p
    w = q @ weight @ adjoint(q) if side == "right" else adjoint(q) @ weight @ q
    w = 0.5 * (w + adjoint(w))
    w_d = S.phi(w)
    off = fro(w - w_d) / fro(w)
    if off > tol.factor:
        raise NotInDError(f"compressed weight is not in D (off-D part {off:.3e})", off)
    w_d = 0.5 * (w_d + adjoint(w_d))
    lam = np.linalg.eigvalsh(w_d)
    if lam[0] <= 0:
        raise FactorizationError("compressed weight is not strictly positive")
    e = spectral_apply(alg, lambda t: t ** -0.5, w_d)
    a = e @ q if side == "right" else q @ e
    a = _phase_normalize(S, a, side)
    res = _result(S, a, b, side)
    if return_steps:
        return res, {"p": p, "w": w, "e": e, "off_diagonal": off, "w_min_eig": float(lam[0])}
    return res


def factor_failure_ratio(S: TracialSubalgebra, b, side: str = "right") -> float:
    """Worst certificate divided by its tolerance for one factorization attempt.

    <= 1 means the factorization of b passed every check.
    """
    tol = tolerances.current()
    try:
        res = factor_projection(S, b, side)
    except NotInDError as exc:
        return exc.off_diagonal / tol.factor
    except (FactorizationError, np.linalg.LinAlgError):
        return np.inf
    return max(res.residual / tol.factor, res.phi_certificate / tol.factor,
               res.membership_a / tol.membership, res.membership_a_inv / tol.membership)


def partial_factorization_certificate(S: TracialSubalgebra, b):
    """(a, c) with |a| = b = |c*|, from factoring b^2 on both sides."""
    alg = S.alg
    b = _positive_definite(alg, b)
    b2 = b @ b
    return factor_projection(S, b2, "right"), factor_projection(S, b2, "left")


def logmodularity_check(S: TracialSubalgebra, trials: int = 20, seed: int = 0):
    """Every sampled b in S_1 factors as d* d with d in A^{-1}, Delta(d) = 1,
    and every sampled a* a (a in A^{-1}, Delta(a) = 1) lies in S_1.

    Returns ``(ok, worst)`` where ``worst`` is the largest failure ratio seen
    (certificate / tolerance; <= 1 everywhere on success).
    """
    alg = S.alg
    tol = tolerances.current()
    worst = 0.0
    ok = True
    for t in range(trials):
        b = random_unit_positive(alg, la.rng_for(seed, t))
        ratio = factor_failure_ratio(S, b, "right")
        if ratio <= 1.0:
            res = factor_projection(S, b, "right")
            d = res.factor * np.sqrt(fk_determinant(alg, b)) / fk_determinant(alg, res.factor)
            err = fro(adjoint(d) @ d - b) / fro(b)
            ratio = max(ratio, err / tol.factor, abs(fk_determinant(alg, d) - 1.0) / tol.factor)
        worst = max(worst, ratio)
        ok = ok and ratio <= 1.0
    # S_3 ⊂ S_1
    for t in range(trials):
        a = random_invertible(S, la.rng_for(seed, trials + t))
        a = a / fk_determinant(alg, a)
        g = adjoint(a) @ a
        if np.linalg.eigvalsh(0.5 * (g + adjoint(g)))[0] <= 0 or fk_determinant(alg, g) < 1 - 1e-10:
            ok = False
    return bool(ok), float(worst)


def s2_inclusion_check(S: TracialSubalgebra, trials: int = 20, seed: int = 0) -> bool:
    """a in A with Delta(Phi(a)) >= 1 gives Delta(a* a + 1/m) >= 1 for m = 1, 10, 100."""
    alg = S.alg
    one = alg.identity()
    for t in range(trials):
        rng = la.rng_for(seed, t)
        for _ in range(100):
            a = random_element(S, rng)
            dp = fk_determinant(alg, S.phi(a))
            if dp > 1e-8:
                break
        else:
            continue
        a = a / dp
        g = adjoint(a) @ a
        for m in (1, 10, 100):
            if fk_determinant(alg, g + one / m) < 1.0 - 1e-8:
                return False
    return True


@dataclass
class UniqueExtensionResult:
    holds: bool
    witness: np.ndarray | None
    dim_selfadjoint_annihilator: int
    witness_checks: dict

    def __bool__(self):
        return self.holds


def _star_closed_part(S: TracialSubalgebra, rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    adj = la.orth(la.flatten(adjoint(la.unflatten(rows, S.n))))
    return la.intersect(rows, adj, S.alg.dim)


def unique_state_extension_check(S: TracialSubalgebra) -> UniqueExtensionResult:
    """g >= 0 and tau(f g) = tau(f) on A force g = 1?

    Decided exactly: it holds iff the annihilator of A contains no nonzero
    self-adjoint element.  Cross-checked against the A0 reformulation (every
    self-adjoint element annihilating A0 lies in D).
    """
    alg, n = S.alg, S.n
    tol = tolerances.current()
    NA = annihilator(S, "full_A")
    sa = _star_closed_part(S, NA)
    holds = sa.shape[0] == 0

    NA0 = annihilator(S, "A0_only")
    sa0 = _star_closed_part(S, NA0)
    holds_a0 = bool(np.all(la.distance(S.basis_D, sa0) <= tol.subspace)) if sa0.shape[0] else True
    if holds != holds_a0:
        raise ConsistencyError("the two reductions of the unique extension property disagree")

    if holds:
        return UniqueExtensionResult(True, None, 0, {})
    v = sa[0].reshape(n, n)
    x = v + adjoint(v)
    if fro(x) < 1e-6:
        x = 1j * (v - adjoint(v))
    x = x / fro(x)
    eps = 1.0 / (2.0 * np.linalg.norm(x, 2))
    g = alg.identity() + eps * x
    A = S.mats("A")
    pair = np.abs(np.einsum("aij,ji->a", A, g) - np.einsum("aii->a", A)) / n
    checks = {
        "min_eigenvalue": float(np.linalg.eigvalsh(g)[0]),
        "distance_from_one": fro(g - alg.identity()),
        "max_pairing_defect": float(pair.max()),
    }
    return UniqueExtensionResult(False, g, sa.shape[0], checks)
