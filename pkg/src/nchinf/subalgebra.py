"""Tracial subalgebras A of M_n.

A ``TracialSubalgebra`` keeps Frobenius-orthonormal bases of A, of its diagonal
D = A ∩ A*, and of A_0 = A ∩ Ker Phi, together with Phi as an n^2 x n^2
matrix acting on row-major flattened matrices.  Phi is the orthogonal
projection of M_n onto D.  For a unital *-subalgebra that is the unique
trace-preserving conditional expectation; it is the same linear map whether
one reads it on M, on L^1(M) or on L^2(M), since all of these are M_n here.
Multiplicativity of Phi on A is checked at construction and a candidate that
fails is rejected with ``NotTracialError``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _linalg as la
from . import tolerances
from .algebra_core import DimensionError, MatrixAlgebra, adjoint, fro


class NotTracialError(ValueError):
    """Phi restricted to A is not multiplicative (or A is not an algebra)."""

    def __init__(self, message, x=None, y=None, residual=None):
        super().__init__(message)
        self.x = x
        self.y = y
        self.residual = residual


@dataclass(frozen=True, eq=False)
class TracialSubalgebra:
    alg: MatrixAlgebra
    kind: str
    basis_A: np.ndarray
    basis_D: np.ndarray
    basis_A0: np.ndarray
    phi_matrix: np.ndarray
    block_sizes: tuple[int, ...] | None = None
    generators: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.alg.n

    @property
    def dim_A(self) -> int:
        return self.basis_A.shape[0]

    @property
    def dim_D(self) -> int:
        return self.basis_D.shape[0]

    @property
    def dim_A0(self) -> int:
        return self.basis_A0.shape[0]

    def mats(self, which: str = "A") -> np.ndarray:
        rows = {"A": self.basis_A, "D": self.basis_D, "A0": self.basis_A0}[which]
        return la.unflatten(rows, self.n)

    def phi(self, x) -> np.ndarray:
        return conditional_expectation(self, x)

    def distance_to(self, which: str, x) -> float:
        """Frobenius distance from x to A, D or A0."""
        rows = {"A": self.basis_A, "D": self.basis_D, "A0": self.basis_A0}[which]
        return float(la.distance(rows, la.flatten(x))[0])

    def contains(self, x, which: str = "A") -> bool:
        tol = tolerances.current().membership
        return self.distance_to(which, x) <= tol * (1.0 + fro(x))

    def conjugate(self, u) -> "TracialSubalgebra":
        """u A u* for a unitary u (stored as a span algebra)."""
        u = self.alg.element(u)
        gens = [u @ a @ adjoint(u) for a in self.mats("A")]
        return make_span(self.alg, gens)


def _projector(rows: np.ndarray) -> np.ndarray:
    # acts on column vectors: P @ vec(x) = vec(proj(x))
    return rows.T @ rows.conj()


def _finish(alg, kind, basis_A, basis_D, *, block_sizes=None, generators=None, check=True):
    nn = alg.dim
    phi_matrix = _projector(basis_D) if basis_D.shape[0] else np.zeros((nn, nn), complex)
    # A0 = A ∩ Ker Phi; coordinates c with sum c_i Phi(a_i) = 0
    images = basis_A @ phi_matrix.T
    coeffs = la.null_space(images.T, basis_A.shape[0])
    basis_A0 = la.orth(coeffs @ basis_A) if coeffs.shape[0] else np.zeros((0, nn), complex)
    S = TracialSubalgebra(alg, kind, basis_A, basis_D, basis_A0, phi_matrix,
                          block_sizes=block_sizes, generators=generators)
    if check:
        validate(S)
    return S


def make_nest(alg: MatrixAlgebra, block_sizes: Sequence[int]) -> TracialSubalgebra:
    """Block upper-triangular matrices for the flag given by ``block_sizes``."""
    blocks = [int(b) for b in block_sizes]
    if not blocks or any(b <= 0 for b in blocks) or sum(blocks) != alg.n:
        raise ValueError(f"block sizes {list(block_sizes)} do not partition n={alg.n}")
    label = np.repeat(np.arange(len(blocks)), blocks)
    upper, diag = [], []
    for i in range(alg.n):
        for j in range(alg.n):
            if label[i] <= label[j]:
                upper.append(alg.unit(i, j))
            if label[i] == label[j]:
                diag.append(alg.unit(i, j))
    return _finish(alg, "nest", la.flatten(upper), la.flatten(diag),
                   block_sizes=tuple(blocks))


def _algebra_closure(alg: MatrixAlgebra, generators) -> np.ndarray:
    rows = la.orth(np.vstack([la.flatten(alg.identity()), la.flatten(generators)]))
    for _ in range(alg.dim):
        mats = la.unflatten(rows, alg.n)
        prods = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, alg.dim)
        grown = la.orth(np.vstack([rows, prods]))
        if grown.shape[0] == rows.shape[0]:
            return rows
        rows = grown
    return rows


def make_span(alg: MatrixAlgebra, generators) -> TracialSubalgebra:
    """Unital algebra generated by ``generators``; validated as tracial."""
    gens = np.asarray(generators, dtype=complex)
    if gens.ndim == 2:
        gens = gens[None]
    if gens.shape[0] == 0:
        raise ValueError("need at least one generator")
    if gens.shape[1:] != (alg.n, alg.n):
        raise DimensionError(f"generators must be {alg.n}x{alg.n}")
    if not np.all(np.isfinite(gens)):
        raise ValueError("generator has non-finite entries")
    basis_A = _algebra_closure(alg, gens)
    adj = la.flatten(adjoint(la.unflatten(basis_A, alg.n)))
    basis_D = la.orth(la.intersect(basis_A, la.orth(adj), alg.dim))
    return _finish(alg, "span", basis_A, basis_D, generators=gens)


def conditional_expectation(S: TracialSubalgebra, x) -> np.ndarray:
    x = S.alg.element(x)
    return (S.phi_matrix @ x.reshape(-1)).reshape(S.n, S.n)


def _phi_many(S: TracialSubalgebra, mats: np.ndarray) -> np.ndarray:
    return (mats.reshape(mats.shape[0], -1) @ S.phi_matrix.T).reshape(mats.shape)


def validate(S: TracialSubalgebra) -> None:
    """Raise ``NotTracialError`` unless every TracialSubalgebra invariant holds."""
    tol = 1e-9
    alg, n = S.alg, S.n
    one = la.flatten(alg.identity())
    if la.distance(S.basis_A, one)[0] > tol:
        raise NotTracialError("A does not contain the identity")
    A = S.mats("A")
    prods = np.einsum("aij,bjk->abik", A, A).reshape(-1, n, n)
    far = la.distance(S.basis_A, la.flatten(prods))
    if far.max(initial=0.0) > tol * np.sqrt(n):
        raise NotTracialError("A is not closed under multiplication", residual=float(far.max()))
    D = S.mats("D")
    if S.dim_D == 0 or la.distance(S.basis_D, one)[0] > tol:
        raise NotTracialError("D does not contain the identity")
    dprods = np.einsum("aij,bjk->abik", D, D).reshape(-1, n, n)
    if la.distance(S.basis_D, la.flatten(dprods)).max(initial=0.0) > tol * np.sqrt(n):
        raise NotTracialError("D is not closed under multiplication")
    if la.distance(S.basis_D, la.flatten(adjoint(D))).max(initial=0.0) > tol:
        raise NotTracialError("D is not closed under adjoints")
    if S.dim_A0 + S.dim_D != S.dim_A:
        raise NotTracialError("dim A0 + dim D != dim A")
    # Phi(xy) = Phi(x) Phi(y) on basis pairs of A
    pa = _phi_many(S, A)
    lhs = _phi_many(S, prods).reshape(S.dim_A, S.dim_A, n, n)
    rhs = np.einsum("aij,bjk->abik", pa, pa)
    res = np.linalg.norm(lhs - rhs, axis=(2, 3))
    worst = np.unravel_index(np.argmax(res), res.shape)
    if res[worst] > tol * np.sqrt(n):
        i, j = worst
        raise NotTracialError(
            f"Phi is not multiplicative on A (residual {res[worst]:.3e})",
            x=A[i], y=A[j], residual=float(res[worst]),
        )


def annihilator(S: TracialSubalgebra, which: str = "A0_only") -> np.ndarray:
    """Basis rows of {x : tau(x a) = 0 for a in A (full_A) or A0 (A0_only)}."""
    if which not in ("full_A", "A0_only"):
        raise ValueError(f"unknown annihilator selector {which!r}")
    rows = S.basis_A if which == "full_A" else S.basis_A0
    # tau(x a) = (1/n) sum_ij x_ij a_ji = vec(a^T) . vec(x) / n
    constraints = la.flatten(np.swapaxes(la.unflatten(rows, S.n), -1, -2)) if rows.shape[0] else rows
    return la.null_space(constraints, S.alg.dim)


@dataclass
class MaximalityReport:
    maximal: bool
    dim_annihilator: int
    dim_A: int
    distance: float
    extra: np.ndarray  # basis rows of N ⊖ A

    def __bool__(self):
        return self.maximal


def tau_maximality_check(S: TracialSubalgebra) -> MaximalityReport:
    """A == {x : tau(x A0) = 0}?  A is always contained in that space."""
    N = annihilator(S, "A0_only")
    dist = la.subspace_distance(N, S.basis_A)
    extra = la.orth(N - la.project(S.basis_A, N), scale=1.0) if N.shape[0] else N
    ok = N.shape[0] == S.dim_A and dist <= tolerances.current().subspace
    return MaximalityReport(ok, N.shape[0], S.dim_A, dist, extra)


def l2_density_check(S: TracialSubalgebra) -> bool:
    """A + A* spans M_n.

    In finite dimensions this is also weak* density of A + A*, so one check
    decides both conditions.
    """
    adj = la.flatten(adjoint(S.mats("A")))
    return la.rank(np.vstack([S.basis_A, adj])) == S.alg.dim


def a_infinity(S: TracialSubalgebra) -> TracialSubalgebra:
    """[A]_2 ∩ M.  Finite-dimensional subspaces are closed, so this is S itself."""
    assert la.subspace_distance(S.basis_A, S.basis_A) == 0.0
    return S


def random_coords(rng: np.random.Generator, k: int) -> np.ndarray:
    return (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2)


def random_element(S: TracialSubalgebra, rng: np.random.Generator, which: str = "A") -> np.ndarray:
    rows = {"A": S.basis_A, "D": S.basis_D, "A0": S.basis_A0}[which]
    return (random_coords(rng, rows.shape[0]) @ rows).reshape(S.n, S.n)


def modular_identity_check(S: TracialSubalgebra, trials: int = 20, seed: int = 0) -> bool:
    """Phi(b y) = Phi(b) Phi(y) for y annihilating A0 and b in A."""
    N = annihilator(S, "A0_only")
    for t in range(trials):
        rng = la.rng_for(seed, t)
        y = (random_coords(rng, N.shape[0]) @ N).reshape(S.n, S.n)
        b = random_element(S, rng)
        res = fro(S.phi(b @ y) - S.phi(b) @ S.phi(y))
        if res > 1e-9 * (1.0 + fro(b) * fro(y)):
            return False
    return True


def diagonal_algebra(alg: MatrixAlgebra) -> TracialSubalgebra:
    return make_span(alg, [alg.unit(i, i) for i in range(alg.n)])
