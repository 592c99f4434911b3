"""Subspace arithmetic on flattened matrices.

A subspace of M_n is stored as a (k, n*n) complex array whose rows are
orthonormal in the Frobenius inner product <x, y> = sum conj(y_ij) x_ij.
All numerical rank decisions use the single relative SVD threshold from
``tolerances.current().rank_rtol``.
"""
from __future__ import annotations

import numpy as np

from . import tolerances


def flatten(mats) -> np.ndarray:
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim == 2:
        mats = mats[None]
    return mats.reshape(mats.shape[0], -1)


def unflatten(rows: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(rows).reshape(-1, n, n)


def _rank(s: np.ndarray, rtol: float | None, scale: float | None = None) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    rtol = tolerances.current().rank_rtol if rtol is None else rtol
    ref = s[0] if scale is None else scale
    return int(np.count_nonzero(s > rtol * ref))


def orth(rows: np.ndarray, rtol: float | None = None, scale: float | None = None) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``rows``.

    ``scale`` fixes the reference magnitude for the rank cut; pass it when the
    input may be pure rounding residue (e.g. after projecting something out).
    """
    rows = np.atleast_2d(np.asarray(rows))
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1])
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    return vh[: _rank(s, rtol, scale)]


def rank(rows: np.ndarray, rtol: float | None = None) -> int:
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    if rows.shape[0] == 0:
        return 0
    return _rank(np.linalg.svd(rows, compute_uv=False), rtol)


def null_space(constraints: np.ndarray, dim: int, rtol: float | None = None) -> np.ndarray:
    """Orthonormal rows v with ``constraints @ v = 0``."""
    constraints = np.asarray(constraints, dtype=complex).reshape(-1, dim)
    if constraints.shape[0] == 0:
        return np.eye(dim, dtype=complex)
    _, s, vh = np.linalg.svd(constraints, full_matrices=True)
    r = _rank(s, rtol)
    return vh[r:].conj()


def complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis)."""
    # <x, b> = b^H x = 0  <=>  conj(b) . x = 0
    return null_space(np.conj(basis), dim)


def intersect(u: np.ndarray, v: np.ndarray, dim: int) -> np.ndarray:
    """span(u) ∩ span(v), via the null space of stacked complements."""
    stacked = np.vstack([np.conj(complement(u, dim)), np.conj(complement(v, dim))])
    return null_space(stacked, dim)


def project(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Orthogonal projection of flat vectors ``x`` (rows) onto span(basis)."""
    x = np.atleast_2d(x)
    if basis.shape[0] == 0:
        return np.zeros_like(x)
    return (x @ basis.conj().T) @ basis


def distance(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Frobenius distance of each row of ``x`` to span(basis)."""
    x = np.atleast_2d(x)
    return np.linalg.norm(x - project(basis, x), axis=1)


def subspace_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral norm of the difference of orthogonal projectors (1 if dims differ)."""
    if u.shape[0] != v.shape[0]:
        return 1.0
    if u.shape[0] == 0:
        return 0.0
    pu = u.T @ u.conj()
    pv = v.T @ v.conj()
    return float(np.linalg.norm(pu - pv, 2))


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator keyed by (seed, stream...)."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, *[int(s) for s in stream]])
