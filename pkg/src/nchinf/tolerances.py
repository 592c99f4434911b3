"""Repo-wide numerical tolerances.

Every threshold that decides a verdict lives here so that checks in different
modules cannot disagree about, say, what counts as "in A".  The active set is
held in a context variable; ``use_tolerances`` swaps it for the duration of a
``with`` block (the CLI's ``--tol`` goes through this).
"""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # singular values below rank_rtol * sigma_max count as zero
    rank_rtol: float = 1e-9
    # ||h - h*||_F <= hermitian * max(1, ||h||_F)
    hermitian: float = 1e-10
    # eigenvalues in [-eig_clamp * ||h||, 0] are treated as zero
    eig_clamp: float = 1e-12
    # dist(a, A) <= membership * (1 + ||a||_F)
    membership: float = 1e-8
    # factorization residual / phi certificate / off-D part of w
    factor: float = 1e-7
    # Szego status: relative tolerance for "holds" and margin for "fails"
    szego_rel: float = 1e-3
    szego_margin: float = 0.05
    # generic identity checks (modular identity, subspace equality)
    identity: float = 1e-9
    subspace: float = 1e-8


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "nchinf_tolerances", default=Tolerances()
)


def current() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def use_tolerances(tol: Tolerances | None = None, **overrides):
    """Temporarily replace the active tolerances."""
    base = tol if tol is not None else current()
    token = _current.set(dataclasses.replace(base, **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)


def uniform(value: float) -> Tolerances:
    """Verdict tolerances all set to ``value``; rank/eigen policy untouched."""
    return Tolerances(membership=value, factor=value, identity=value, subspace=value)
