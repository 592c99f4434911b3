"""Dense matrix kernel for M_n with its normalized trace.

Elements are plain ``(n, n)`` complex numpy arrays.  ``MatrixAlgebra`` only
carries the dimension and validates that arguments belong to it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import tolerances


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    """A function was applied outside its domain (e.g. log at a zero eigenvalue)."""


class NotPositiveError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MatrixAlgebra:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"matrix dimension must be a positive integer, got {self.n!r}")

    @property
    def dim(self) -> int:
        return self.n * self.n

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=complex)

    def unit(self, i: int, j: int) -> np.ndarray:
        """Matrix unit E_ij (0-based)."""
        e = np.zeros((self.n, self.n), dtype=complex)
        e[i, j] = 1.0
        return e

    def element(self, x) -> np.ndarray:
        """Coerce ``x`` to a finite complex element of this algebra."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.n, self.n):
            raise DimensionError(f"expected a {self.n}x{self.n} matrix, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("matrix has non-finite entries")
        return x


def adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def fro(x) -> float:
    return float(np.linalg.norm(x))


def trace(alg: MatrixAlgebra, x) -> complex:
    """Normalized trace tr(x)/n."""
    x = alg.element(x)
    return complex(np.trace(x)) / alg.n


def hermitian_part(alg: MatrixAlgebra, h) -> np.ndarray:
    """Symmetrize ``h`` after checking it is Hermitian to tolerance."""
    h = alg.element(h)
    tol = tolerances.current().hermitian
    if fro(h - adjoint(h)) > tol * max(1.0, fro(h)):
        raise DomainError("matrix is not Hermitian within tolerance")
    return 0.5 * (h + adjoint(h))


def _clamped_eigh(h: np.ndarray):
    lam, u = np.linalg.eigh(h)
    scale = max(float(np.max(np.abs(lam))), 0.0) if lam.size else 0.0
    clamp = tolerances.current().eig_clamp * scale
    lam = np.where((lam < 0) & (lam >= -clamp), 0.0, lam)
    return lam, u


def spectral_apply(alg: MatrixAlgebra, f: Callable, h) -> np.ndarray:
    """U diag(f(lambda)) U* for Hermitian h = U diag(lambda) U*.

    Tiny negative eigenvalues (relative 1e-12) are clamped to zero first; if
    ``f`` then produces non-finite values a ``DomainError`` is raised.
    """
    h = hermitian_part(alg, h)
    lam, u = _clamped_eigh(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(f(lam))
    if vals.shape != lam.shape or not np.all(np.isfinite(vals)):
        raise DomainError("function undefined on the spectrum")
    return (u * vals) @ adjoint(u)


def sqrt_psd(alg: MatrixAlgebra, h) -> np.ndarray:
    h = hermitian_part(alg, h)
    lam, u = _clamped_eigh(h)
    if np.any(lam < 0):
        raise NotPositiveError("matrix is not positive semidefinite")
    return (u * np.sqrt(lam)) @ adjoint(u)


def modulus(alg: MatrixAlgebra, x) -> np.ndarray:
    """|x| = (x* x)^{1/2}, computed from the SVD."""
    x = alg.element(x)
    _, s, vh = np.linalg.svd(x)
    return (adjoint(vh) * s) @ vh


def polar(alg: MatrixAlgebra, x) -> tuple[np.ndarray, np.ndarray]:
    """x = u |x| with u unitary (a unitary extension of the partial isometry)."""
    x = alg.element(x)
    w, s, vh = np.linalg.svd(x)
    return w @ vh, (adjoint(vh) * s) @ vh


def singular_values(x) -> np.ndarray:
    return np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)


def fk_determinant(alg: MatrixAlgebra, x) -> float:
    """Fuglede-Kadison determinant exp tau(log|x|) = (prod of singular values)^(1/n).

    Returns 0 exactly when a singular value is 0 (the epsilon-shift infimum).
    """
    x = alg.element(x)
    s = singular_values(x)
    if np.any(s == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(s))))


def log_fk_determinant(alg: MatrixAlgebra, x) -> float:
    s = singular_values(alg.element(x))
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(s)))


def trace_abs(alg: MatrixAlgebra, x) -> float:
    """tau(|x|), the normalized trace norm."""
    return float(np.sum(singular_values(alg.element(x)))) / alg.n


def weighted_inner(alg: MatrixAlgebra, b, f, g) -> complex:
    """<f, g>_b = tau(b^{1/2} g* f b^{1/2}) = tau(b g* f)."""
    b = hermitian_part(alg, b)
    lam = np.linalg.eigvalsh(b)
    if lam.size and lam[0] < -tolerances.current().eig_clamp * max(1.0, abs(lam[-1])):
        raise NotPositiveError("weight is not positive semidefinite")
    f = alg.element(f)
    g = alg.element(g)
    return complex(np.trace(b @ adjoint(g) @ f)) / alg.n


def heron_iterates(alg: MatrixAlgebra, h, tol: float = 1e-13, max_iter: int = 60) -> list[np.ndarray]:
    """Iterates x_1 = h, x_{m+1} = (x_m + h x_m^{-1}) / 2 up to convergence.

    The last entry is the first x_{m+1} with
    ||x_{m+1} - x_m||_F <= tol * max(1, ||x_{m+1}||_F), so the stopping rule is
    absolute for small h and relative for large h.  The
    products are evaluated in the coupled (Denman-Beavers) form
    y_{m+1} = (y_m + z_m^{-1})/2, z_{m+1} = (z_m + y_m^{-1})/2 with
    y_m = x_m, z_m = h^{-1} x_m, which produces the same iterates in exact
    arithmetic but does not amplify rounding errors on ill-conditioned h.
    """
    h = hermitian_part(alg, h)
    lam = np.linalg.eigvalsh(h)
    if lam[0] <= tolerances.current().eig_clamp * max(1.0, abs(lam[-1])):
        raise NotPositiveError("Heron iteration needs a strictly positive matrix")
    one = alg.identity()
    y, z = h, one
    iterates = [y]
    for _ in range(max_iter):
        y_next = 0.5 * (y + np.linalg.inv(z))
        z_next = 0.5 * (z + np.linalg.inv(y))
        y_next = 0.5 * (y_next + adjoint(y_next))
        z_next = 0.5 * (z_next + adjoint(z_next))
        step = fro(y_next - y)
        y, z = y_next, z_next
        if step <= tol * max(1.0, fro(y)):
            return iterates + [y] if step > 0.0 else iterates
        iterates.append(y)
    raise ConvergenceError(f"Heron iteration did not reach tol={tol:g} in {max_iter} steps")


def heron_sqrt(alg: MatrixAlgebra, h, tol: float = 1e-13, max_iter: int = 60) -> np.ndarray:
    return heron_iterates(alg, h, tol, max_iter)[-1]
