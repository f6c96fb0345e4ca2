import sys

import numpy as np
import pytest

from telegraph.exprlang import compile_fn
from telegraph.problem import BoundaryKind, MixedProblem, zero


def bump_np(x, c, w):
    """Independent numpy implementation of the mollifier bump."""
    x = np.asarray(x, dtype=float)
    r = (x - c) / w
    out = np.zeros_like(x)
    m = np.abs(r) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - r[m] ** 2))
    return out


def bump_prime_np(x, c, w):
    # d/dx exp(1 - 1/(1 - r^2)) = bump * (-2 r / (w (1 - r^2)^2))
    x = np.asarray(x, dtype=float)
    r = (x - c) / w
    out = np.zeros_like(x)
    m = np.abs(r) < 1
    rm = r[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - rm ** 2)) * (-2.0 * rm / (w * (1.0 - rm ** 2) ** 2))
    return out


def midpoint(fn, lo, hi, n=10 ** 6):
    h = (hi - lo) / n
    x = lo + (np.arange(n) + 0.5) * h
    return float(np.sum(fn(x)) * h)


def dalembert_dirichlet(x, t, L, c, w, a=1.0):
    """Exact solution of u_tt = a^2 u_xx, u = 0 at x = 0 and x = L, u(0) = bump, u_t(0) = 0.

    Uses the odd, 2L-periodic extension of the initial profile.
    """
    def ext(y):
        y = np.mod(y, 2 * L)
        sign = np.where(y > L, -1.0, 1.0)
        y = np.where(y > L, 2 * L - y, y)
        return sign * bump_np(y, c, w)

    return 0.5 * (ext(x + a * t) + ext(x - a * t))


def make_problem(a=1.0, f="0", F="0", phi="0", psi="0", mu="0", boundary=BoundaryKind.DIRICHLET):
    return MixedProblem(
        a,
        compile_fn(f, ("t", "x", "z")),
        compile_fn(F, ("t", "x")),
        compile_fn(phi, ("x",)),
        compile_fn(psi, ("x",)),
        compile_fn(mu, ("t",)),
        boundary,
    )


@pytest.fixture
def zero_problem():
    return MixedProblem(1.0, zero(3), zero(2), zero(1), zero(1), zero(1), BoundaryKind.DIRICHLET)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
