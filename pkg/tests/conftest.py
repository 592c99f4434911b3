import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from nchinf import _linalg as la
from nchinf.algebra_core import MatrixAlgebra
from nchinf.certifier import random_composition
from nchinf.subalgebra import make_nest

settings.register_profile(
    "repo", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_matrix(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_spd(rng, n, cond=1e3):
    lam = np.exp(rng.uniform(0.0, np.log(cond), n))
    lam[0], lam[-1] = 1.0, cond if n > 1 else 1.0
    u = random_unitary(rng, n)
    return (u * lam) @ u.conj().T


def random_nest(rng, n):
    return make_nest(MatrixAlgebra(n), random_composition(n, rng))


@st.composite
def seeds(draw):
    return draw(st.integers(0, 2**31 - 1))


@st.composite
def nests(draw, n_min=1, n_max=6):
    n = draw(st.integers(n_min, n_max))
    return random_nest(la.rng_for(draw(seeds()), 0), n)


@pytest.fixture
def m2():
    return MatrixAlgebra(2)


@pytest.fixture
def nest11(m2):
    return make_nest(m2, [1, 1])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
