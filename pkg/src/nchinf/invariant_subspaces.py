"""Right-invariant subspaces of L^2(M) = M_n and Beurling-type witnesses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from . import _linalg as la
from . import tolerances
from .algebra_core import MatrixAlgebra, adjoint, fro, polar, singular_values
from .subalgebra import TracialSubalgebra


class NotInvariantError(ValueError):
    pass


class _NotFound:
    def __repr__(self):
        return "NotFound"

    def __bool__(self):
        return False


NOT_FOUND = _NotFound()


@dataclass(frozen=True, eq=False)
class Subspace:
    alg: MatrixAlgebra
    basis: np.ndarray  # (k, n, n), Frobenius-orthonormal

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex).reshape(-1, self.alg.n, self.alg.n)
        object.__setattr__(self, "basis", b)
        rows = la.flatten(b) if b.shape[0] else np.zeros((0, self.alg.dim), complex)
        gram = rows.conj() @ rows.T
        if not np.allclose(gram, np.eye(rows.shape[0]), atol=1e-10):
            raise ValueError("subspace basis is not orthonormal")

    @classmethod
    def span(cls, alg: MatrixAlgebra, mats) -> "Subspace":
        mats = np.asarray(mats, dtype=complex).reshape(-1, alg.n, alg.n)
        rows = la.orth(la.flatten(mats)) if mats.shape[0] else np.zeros((0, alg.dim), complex)
        return cls(alg, la.unflatten(rows, alg.n))

    @property
    def rows(self) -> np.ndarray:
        return la.flatten(self.basis) if self.dim else np.zeros((0, self.alg.dim), complex)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, x) -> np.ndarray:
        return la.project(self.rows, la.flatten(x)).reshape(self.alg.n, self.alg.n)

    def left_multiply(self, u) -> "Subspace":
        return Subspace.span(self.alg, [u @ w for w in self.basis])


def _products(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return np.einsum("aij,bjk->abik", left, right).reshape(-1, left.shape[-1], left.shape[-1])


def algebra_subspace(S: TracialSubalgebra) -> Subspace:
    return Subspace(S.alg, S.mats("A"))


def is_right_invariant(S: TracialSubalgebra, W: Subspace) -> bool:
    if W.dim == 0:
        return True
    prods = _products(W.basis, S.mats("A"))
    return bool(la.distance(W.rows, la.flatten(prods)).max() <= 1e-9)


def is_simply_invariant(S: TracialSubalgebra, W: Subspace):
    """Returns ``(simply_invariant, wandering)`` with wandering = W ⊖ [W A0]."""
    if not is_right_invariant(S, W):
        raise NotInvariantError("subspace is not right-invariant under A")
    n = S.n
    if S.dim_A0 and W.dim:
        WA0 = la.orth(la.flatten(_products(W.basis, S.mats("A0"))))
    else:
        WA0 = np.zeros((0, S.alg.dim), complex)
    rest = W.rows - la.project(WA0, W.rows) if WA0.shape[0] else W.rows
    omega = la.orth(rest, scale=1.0) if W.dim else rest
    wandering = Subspace(S.alg, la.unflatten(omega, n))
    return WA0.shape[0] < W.dim, wandering


def beurling_witness(S: TracialSubalgebra, W: Subspace, seed: int = 0, retries: int = 16):
    """A unitary u with W = u A, found from the polar part of a generic wandering vector."""
    simple, omega = is_simply_invariant(S, W)
    if not simple:
        raise NotInvariantError("subspace is not simply invariant")
    alg = S.alg
    tol = tolerances.current().subspace
    A = S.mats("A")
    if W.dim != S.dim_A:
        return NOT_FOUND
    for t in range(retries):
        rng = la.rng_for(seed, t)
        v = unitary_group.rvs(alg.n, random_state=rng) if alg.n > 1 else np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
        xi = omega.project(v)
        s = singular_values(xi)
        if s[0] == 0.0 or s[-1] / s[0] <= 1e-8:
            continue
        u, _ = polar(alg, xi)
        uA = la.flatten(u @ A)
        if la.distance(W.rows, uA).max() <= tol:
            return u
    return NOT_FOUND


def subspace_distance(U: Subspace, V: Subspace) -> float:
    return la.subspace_distance(U.rows, V.rows)


def bn_factor(S: TracialSubalgebra, f, seed: int = 0, retries: int = 16):
    """f = u h with u unitary in [f A] and [h A] = A; ``NOT_FOUND`` otherwise."""
    alg = S.alg
    f = alg.element(f)
    A = S.mats("A")
    if S.dim_A0:
        fA0 = la.orth(la.flatten(f @ S.mats("A0")))
        resid = fro(f - la.project(fA0, la.flatten(f)).reshape(alg.n, alg.n)) if fA0.shape[0] else fro(f)
    else:
        resid = fro(f)
    if resid <= 1e-8 * max(1.0, fro(f)):
        raise NotInvariantError("f lies in [f A0]")
    W = Subspace.span(alg, f @ A)
    u = beurling_witness(S, W, seed=seed, retries=retries)
    if u is NOT_FOUND:
        return NOT_FOUND
    h = adjoint(u) @ f
    tol = tolerances.current().subspace
    hA = Subspace.span(alg, h @ A)
    if la.distance(W.rows, la.flatten(u))[0] > tol or hA.dim != S.dim_A \
            or la.subspace_distance(hA.rows, S.basis_A) > tol:
        return NOT_FOUND
    return u, h
