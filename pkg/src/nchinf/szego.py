"""Szego infimum inf { tau(h |a + d|^2) : a in A0, d in D^{-1}, Delta(d) >= 1 }.

Inner stage: for fixed d the minimum over a in A0 is a weighted least-squares
problem with Gram matrix tau(h c_j* c_k), solved in closed form.  Outer stage:
by homogeneity and the polar reduction it suffices to take d = exp(s) with s
self-adjoint in D and tau(s) = 0, so Delta(d) = 1.  The outer problem is
searched with Powell's method from several starts; an optional brute-force
grid gives a lower bound when D is small.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import _linalg as la
from . import tolerances
from .algebra_core import adjoint, fk_determinant, fro, hermitian_part, spectral_apply
from .subalgebra import TracialSubalgebra


class SzegoNumericsError(RuntimeError):
    """An evaluated objective undercut Delta(h) although Delta(a + d) >= 1."""


@dataclass
class SzegoOptions:
    starts: int = 3
    max_iter: int = 20000
    tol: float = 1e-12
    seed: int = 0
    grid_lower_bound: bool = True
    warm_start: bool = True


@dataclass
class SzegoResult:
    upper_bound: float
    argmin_a: np.ndarray
    argmin_d: np.ndarray
    lower_bound: float | None
    status: str
    delta_h: float
    evidence: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.upper_bound - self.delta_h

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "status": self.status,
            "upper_bound": self.upper_bound,
            "lower_bound": self.lower_bound,
            "delta_h": self.delta_h,
            "gap": self.gap,
            "argmin_a": matrix_to_json(self.argmin_a),
            "argmin_d": matrix_to_json(self.argmin_d),
            "evidence": self.evidence,
        }


def selfadjoint_traceless_basis(S: TracialSubalgebra) -> np.ndarray:
    """Real basis of {s in D : s = s*, tau(s) = 0}, orthonormal for tau(x y)."""
    n = S.n
    D = S.mats("D")
    herm = np.concatenate([(D + adjoint(D)) / 2, (D - adjoint(D)) / 2j])
    flat = herm.reshape(herm.shape[0], -1)
    real = np.hstack([flat.real, flat.imag])
    one = np.concatenate([np.eye(n).reshape(-1), np.zeros(n * n)]) / np.sqrt(n)
    real = real - np.outer(real @ one, one)
    rows = la.orth(real, scale=1.0)
    mats = (rows[:, : n * n] + 1j * rows[:, n * n:]).reshape(-1, n, n)
    mats = 0.5 * (mats + adjoint(mats))
    return mats * np.sqrt(n)


class SzegoObjective:
    """theta -> min over a in A0 of tau(h |a + exp(sum theta_k X_k)|^2)."""

    def __init__(self, S: TracialSubalgebra, h: np.ndarray):
        self.S = S
        self.n = S.n
        self.h = h
        self.X = selfadjoint_traceless_basis(S)
        C = S.mats("A0")
        self.C = C
        n = self.n
        self.ht = h.T.reshape(-1) / n
        if C.shape[0]:
            hc = h @ adjoint(C)  # h c_j*
            self.G = np.einsum("jil,kli->jk", hc, C) / n  # tau(h c_j* c_k)
            self.G = 0.5 * (self.G + adjoint(self.G))
            m = self.G.shape[0]
            self.G += 1e-12 * np.trace(self.G).real / m * np.eye(m)
            self.K = np.swapaxes(hc, -1, -2).reshape(C.shape[0], -1) / n
            self.Gchol = np.linalg.cholesky(self.G)
        self.evaluations = 0

    @property
    def dim(self) -> int:
        return self.X.shape[0]

    def d_of(self, theta) -> np.ndarray:
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        s = np.tensordot(theta, self.X, axes=1) if self.dim else np.zeros((theta.shape[0], self.n, self.n))
        lam, u = np.linalg.eigh(s)
        return (u * np.exp(lam)[:, None, :]) @ adjoint(u)

    def values(self, theta) -> np.ndarray:
        d = self.d_of(theta)
        self.evaluations += d.shape[0]
        d2 = d @ d
        val = (d2.reshape(d.shape[0], -1) @ self.ht).real
        if self.C.shape[0]:
            r = d.reshape(d.shape[0], -1) @ self.K.T  # r_j = tau(h c_j* d)
            y = np.linalg.solve(self.Gchol, r.T)
            val = val - np.sum(np.abs(y) ** 2, axis=0)
        return val

    def __call__(self, theta) -> float:
        return float(self.values(theta)[0])

    def minimizer_a(self, d: np.ndarray) -> np.ndarray:
        if not self.C.shape[0]:
            return np.zeros_like(d)
        r = self.K @ d.reshape(-1)
        x = -np.linalg.solve(self.G, r)
        return np.tensordot(x, self.C, axes=1)

    def coords(self, s: np.ndarray) -> np.ndarray:
        """Coordinates of the traceless self-adjoint part of s in D."""
        return np.array([np.trace(x @ s).real / self.n for x in self.X])


def _warm_starts(S: TracialSubalgebra, obj: SzegoObjective, h: np.ndarray) -> list[np.ndarray]:
    # exact when h lies in D: d^2 proportional to Phi(h)^{-1}
    try:
        return [obj.coords(spectral_apply(S.alg, lambda t: -0.5 * np.log(t), S.phi(h)))]
    except ValueError:
        return []


def _grid_lower_bound(obj: SzegoObjective, points: int = 17, half_width: float = 3.0,
                      refinements: int = 3):
    k = obj.dim
    if k == 0:
        v = obj(np.zeros(0))
        return v, {"grid_min": v, "variation": 0.0, "free_coordinates": 0}
    center = np.zeros(k)
    r = half_width
    for level in range(refinements + 1):
        axis = np.linspace(-r, r, points)
        grid = np.array(list(itertools.product(axis, repeat=k))) + center
        vals = obj.values(grid)
        idx = int(np.argmin(vals))
        fmin = float(vals[idx])
        if level == refinements:
            break
        center = grid[idx]
        r = r / 2.0
    # local variation: spread between the grid minimum and its grid neighbours
    shape = (points,) * k
    cell = np.unravel_index(idx, shape)
    nbrs = []
    for off in itertools.product((-1, 0, 1), repeat=k):
        j = tuple(c + o for c, o in zip(cell, off))
        if all(0 <= t < points for t in j):
            nbrs.append(np.ravel_multi_index(j, shape))
    variation = float(np.max(np.abs(vals[nbrs] - fmin)))
    return fmin - variation, {"grid_min": fmin, "variation": variation, "free_coordinates": k}


def szego_infimum(S: TracialSubalgebra, h, options: SzegoOptions | None = None) -> SzegoResult:
    opts = options or SzegoOptions()
    tol = tolerances.current()
    alg = S.alg
    h = hermitian_part(alg, h)
    lam = np.linalg.eigvalsh(h)
    if lam[0] < -tol.eig_clamp * max(1.0, abs(lam[-1])):
        raise ValueError("h must be positive semidefinite")
    delta_h = fk_determinant(alg, h)
    h_reg = h
    if lam[0] <= 0:
        h_reg = h + 1e-10 * fro(h) * alg.identity()
    obj = SzegoObjective(S, h_reg)

    starts = [np.zeros(obj.dim)]
    if opts.warm_start:
        starts += _warm_starts(S, obj, h_reg)
    for t in range(opts.starts):
        starts.append(la.rng_for(opts.seed, t).standard_normal(obj.dim))

    best_val, best_theta = np.inf, np.zeros(obj.dim)
    sanity_min = np.inf
    runs = []
    increased = 0
    for x0 in starts:
        v0 = obj(x0)
        if obj.dim:
            out = optimize.minimize(obj, x0, method="Powell",
                                    options={"xtol": 1e-10, "ftol": opts.tol, "maxiter": opts.max_iter})
            theta, val = out.x, float(out.fun)
        else:
            theta, val = x0, v0
        if not np.isfinite(val) or val > v0:
            increased += 1
            theta, val = x0, v0
        runs.append(val)
        d = obj.d_of(theta)[0]
        a = obj.minimizer_a(d)
        if fk_determinant(alg, a + d) >= 1.0 - 1e-12:
            sanity_min = min(sanity_min, val)
        if val < best_val:
            best_val, best_theta = val, theta
        # nothing below Delta(h) is reachable when Jensen holds along the run
        if best_val <= delta_h * (1.0 + 1e-10):
            break

    d_best = obj.d_of(best_theta)[0]
    a_best = obj.minimizer_a(d_best)
    lower = None
    evidence = {"starts_run": len(runs), "start_values": runs,
                "free_coordinates": obj.dim, "evaluations": 0}
    if opts.grid_lower_bound and S.dim_D <= 4:
        lower, grid_info = _grid_lower_bound(obj)
        evidence["grid"] = grid_info
    evidence["evaluations"] = obj.evaluations
    evidence["sanity_min"] = None if not np.isfinite(sanity_min) else float(sanity_min)

    scale = max(delta_h, 1e-300)
    if abs(best_val - delta_h) <= tol.szego_rel * scale:
        status = "holds"
    elif lower is not None and lower > delta_h * (1.0 + tol.szego_margin):
        status = "fails_certified"
    else:
        status = "inconclusive"
    if increased == len(starts) and obj.dim:
        status = "inconclusive"
        evidence["diverged"] = True
    return SzegoResult(float(best_val), a_best, d_best, lower, status, float(delta_h), evidence)


def checked_szego_infimum(S: TracialSubalgebra, h, options: SzegoOptions | None = None) -> SzegoResult:
    """``szego_infimum`` plus a one-sided sanity check.

    Any evaluated tau(h |a + d|^2) with Delta(a + d) >= 1 is bounded below by
    Delta(h); a violation is a numerical bug and raises ``SzegoNumericsError``.
    """
    res = szego_infimum(S, h, options)
    floor = res.delta_h - 1e-9 * max(1.0, res.delta_h)
    sanity = res.evidence.get("sanity_min")
    if sanity is not None and sanity < floor:
        raise SzegoNumericsError(f"objective {sanity!r} below Delta(h) = {res.delta_h!r}")
    return res


def szego_check(S: TracialSubalgebra, h, options: SzegoOptions | None = None) -> str:
    """Status of the Szego equality for this h ("holds", "fails_certified" or "inconclusive")."""
    return checked_szego_infimum(S, h, options).status
