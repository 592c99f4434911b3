"""Variational formulas and Jensen-type checks for the FK determinant.

Sampling checks are deterministic in ``(inputs, seed)``: trial ``t`` draws from
its own generator keyed by ``(seed, t)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra_core import (
    MatrixAlgebra,
    NotPositiveError,
    adjoint,
    fk_determinant,
    fro,
    hermitian_part,
    modulus,
    singular_values,
    spectral_apply,
    trace,
    trace_abs,
)
from .subalgebra import TracialSubalgebra, random_element


class NotInAlgebraError(ValueError):
    pass


class SearchExhaustedError(RuntimeError):
    pass


class _ZeroElement:
    """Marker returned by ``hoffman_witness`` for h = 0."""

    def __repr__(self):
        return "ZeroElement"


ZERO_ELEMENT = _ZeroElement()


@dataclass(frozen=True)
class DeltaSchedule:
    deltas: tuple[float, ...] = (1.0, 0.1, 0.01, 0.001, 1e-4, 1e-5)

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if d.size == 0 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise ValueError("deltas must be positive and strictly decreasing")


def _strictly_positive(alg: MatrixAlgebra, h) -> np.ndarray:
    h = hermitian_part(alg, h)
    lam = np.linalg.eigvalsh(h)
    if lam[0] <= 0:
        raise NotPositiveError("h must be strictly positive")
    return h


def attaining_element(alg: MatrixAlgebra, h, delta: float) -> np.ndarray:
    """b_delta = Delta(h) (h^{-1} + delta 1)."""
    h = _strictly_positive(alg, h)
    return fk_determinant(alg, h) * (np.linalg.inv(h) + delta * alg.identity())


def variational_upper_sequence(alg: MatrixAlgebra, h, sched: DeltaSchedule = DeltaSchedule()):
    """[(delta, tau(h b_delta))] along the schedule; each b_delta has Delta >= 1."""
    h = _strictly_positive(alg, h)
    out = []
    for delta in sched.deltas:
        b = attaining_element(alg, h, delta)
        det_b = fk_determinant(alg, b)
        if det_b < 1.0 - 1e-10:
            raise AssertionError(f"Delta(b_delta) = {det_b!r} < 1 at delta={delta}")
        out.append((delta, trace(alg, h @ b).real))
    return out


def extrapolate_to_zero(sequence) -> float:
    """Linear extrapolation of the last two points to delta = 0.

    tau(h b_delta) = Delta(h)(1 + delta tau(h)) is affine in delta, so this is
    exact up to rounding.
    """
    (d1, v1), (d2, v2) = sequence[-2], sequence[-1]
    return v2 - d2 * (v1 - v2) / (d1 - d2)


def random_unit_positive(alg: MatrixAlgebra, rng: np.random.Generator) -> np.ndarray:
    """b = exp(s)/Delta(exp(s)) with s a scaled Hermitian Gaussian."""
    n = alg.n
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    s = (g + adjoint(g)) / (2.0 * np.sqrt(n))
    s = s - np.trace(s).real / n * np.eye(n)
    return spectral_apply(alg, np.exp, s)


def variational_sample_check(alg: MatrixAlgebra, h, trials: int = 100, seed: int = 0):
    """Every sampled unit-determinant positive b has tau(h b) >= Delta(h).

    Returns ``(ok, min_observed)``.
    """
    h = hermitian_part(alg, h)
    target = fk_determinant(alg, h)
    lo = np.inf
    for t in range(trials):
        b = random_unit_positive(alg, la.rng_for(seed, t))
        lo = min(lo, trace(alg, h @ b).real)
    return bool(lo >= target - 1e-9), float(lo)


def variational_abs_check(alg: MatrixAlgebra, h, trials: int = 100, seed: int = 0):
    """Same sampling as ``variational_sample_check`` with tau(|h b|).

    Also checks tau(|h b|) = tau(||h| b|) on every sample.  Returns
    ``(ok, min_observed)``.
    """
    h = alg.element(h)
    target = fk_determinant(alg, h)
    abs_h = modulus(alg, h)
    lo = np.inf
    ok = True
    for t in range(trials):
        b = random_unit_positive(alg, la.rng_for(seed, t))
        v = trace_abs(alg, h @ b)
        if abs(v - trace_abs(alg, abs_h @ b)) > 1e-10 * max(1.0, v):
            ok = False
        lo = min(lo, v)
    return bool(ok and lo >= target - 1e-9), float(lo)


def hoffman_witness(alg: MatrixAlgebra, h, delta: float = 1.0):
    """A t with |t| <= delta and Delta(1 - t h) < 1, or ``ZERO_ELEMENT`` if h = 0."""
    h = hermitian_part(alg, h)
    if fro(h) <= 1e-12:
        return ZERO_ELEMENT
    one = alg.identity()
    for k in range(60):
        for t in (delta * 2.0 ** -k, -delta * 2.0 ** -k):
            if fk_determinant(alg, one - t * h) < 1.0 - 1e-12:
                return t
    raise SearchExhaustedError("no t with Delta(1 - t h) < 1 found; h is numerically degenerate")


def _require_member(S: TracialSubalgebra, a) -> np.ndarray:
    a = S.alg.element(a)
    if S.distance_to("A", a) > 1e-8 * (1.0 + fro(a)):
        raise NotInAlgebraError("element is not in A within tolerance")
    return a


def jensen_inequality_check(S: TracialSubalgebra, a):
    """Delta(Phi(a)) <= Delta(a).  Returns ``(ok, (Delta(Phi(a)), Delta(a)))``."""
    a = _require_member(S, a)
    dp, da = fk_determinant(S.alg, S.phi(a)), fk_determinant(S.alg, a)
    return bool(dp <= da + 1e-9 * (1.0 + da)), (dp, da)


def jensen_formula_check(S: TracialSubalgebra, a) -> bool:
    """Delta(Phi(a)) == Delta(a) for invertible a in A."""
    a = _require_member(S, a)
    s = singular_values(a)
    if s[-1] == 0.0 or s[0] / s[-1] > 1e8:
        raise NotInAlgebraError("element is singular (condition number > 1e8)")
    dp, da = fk_determinant(S.alg, S.phi(a)), fk_determinant(S.alg, a)
    return bool(abs(dp - da) <= 1e-8 * max(da, 1.0))


def random_invertible(S: TracialSubalgebra, rng: np.random.Generator, which: str = "A",
                      max_cond: float = 1e6) -> np.ndarray:
    for _ in range(100):
        a = random_element(S, rng, which)
        s = singular_values(a)
        if s[-1] > 0 and s[0] / s[-1] <= max_cond:
            return a
    raise RuntimeError("could not sample a well-conditioned invertible element")


def islo_check(S: TracialSubalgebra, h, trials: int = 50, seed: int = 0, delta: float = 1e-4):
    """tau(|h a|) >= Delta(h) over sampled a in A^{-1} with Delta(a) = 1.

    When A factors b_delta^2 (b_delta the attaining element for |h|) the
    resulting near-optimal a must come within 5% of Delta(h).  Returns
    ``(ok, min_observed)``.
    """
    from .factorization import FactorizationError, factor_projection

    alg = S.alg
    h = alg.element(h)
    target = fk_determinant(alg, h)
    lo = np.inf
    for t in range(trials):
        a = random_invertible(S, la.rng_for(seed, t))
        a = a / fk_determinant(alg, a)
        lo = min(lo, trace_abs(alg, h @ a))
    ok = lo >= target - 1e-9
    abs_h = modulus(alg, h)
    if target > 0 and np.linalg.eigvalsh(abs_h)[0] > 0:
        b0 = attaining_element(alg, abs_h, delta)
        try:
            res = factor_projection(S, b0 @ b0, side="left")
        except FactorizationError:
            res = None
        if res is not None:
            # a a* = b0^2, so |a*| = b0 and tau(|h a|) = tau(|h| b0)
            value = trace_abs(alg, h @ res.factor)
            lo = min(lo, value)
            ok = ok and value - target <= 0.05 * max(target, 1.0)
    return bool(ok), float(lo)
