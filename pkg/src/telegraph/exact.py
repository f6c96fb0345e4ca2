"""Closed-form power-law solutions of ``u_tt - a^2 u_xx = u^alpha``, ``0 < alpha < 1``.

With zero data and a homogeneous Neumann condition, ``u = beta t^gamma``
solves the problem when ``gamma = 2 / (1 - alpha)`` and
``beta gamma (gamma - 1) = beta^alpha``.  Shifting by any ``s >= 0`` and
gluing to zero for ``t < s`` gives another classical solution, since
``gamma > 2`` makes the seam twice continuously differentiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange
from .exprlang import compile_fn
from .problem import BoundaryKind, MixedProblem, zero


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")


def power_params(alpha: float) -> tuple:
    """``(beta, gamma)`` of the power solution, via the cancellation-free form."""
    _check_alpha(alpha)
    gamma = 2.0 / (1.0 - alpha)
    beta = (gamma * (gamma - 1.0)) ** (1.0 / (alpha - 1.0))
    return beta, gamma


def beta_forms(alpha: float) -> tuple:
    """Three independent evaluations of beta; they must agree.

    1. ``(gamma (gamma - 1))^(1/(alpha-1))``
    2. ``2^(1/(alpha-1)) (alpha - 3 + 4/(alpha+1))^(1/(1-alpha))``
    3. ``2^(1/(alpha-1)) ((alpha+1)/(alpha^2 - 2 alpha + 1))^(1/(alpha-1))``
    """
    _check_alpha(alpha)
    stable, _ = power_params(alpha)
    e = 1.0 / (alpha - 1.0)
    via_bracket = 2.0 ** e * (alpha - 3.0 + 4.0 / (alpha + 1.0)) ** (-e)
    via_ratio = 2.0 ** e * ((alpha + 1.0) / (alpha * alpha - 2.0 * alpha + 1.0)) ** e
    return stable, via_bracket, via_ratio


@dataclass(frozen=True)
class PowerSolution:
    alpha: float
    beta: float
    gamma: float
    s: float = 0.0

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.s < 0:
            raise ValueError(f"shift must be non-negative, got {self.s}")
        if self.beta < 0 or self.gamma <= 2:
            raise ValueError("need beta >= 0 and gamma > 2")

    @classmethod
    def from_alpha(cls, alpha: float, s: float = 0.0) -> "PowerSolution":
        beta, gamma = power_params(alpha)
        return cls(alpha, beta, gamma, float(s))

    @classmethod
    def trivial(cls, alpha: float) -> "PowerSolution":
        """The zero solution ``u = 0`` of the same problem."""
        _, gamma = power_params(alpha)
        return cls(alpha, 0.0, gamma, 0.0)

    def __call__(self, t, deriv: int = 0):
        return evaluate(self, t, deriv)


def evaluate(ps: PowerSolution, t, deriv: int = 0):
    """Value or time derivative (0, 1, 2) of the glued solution at ``t``.

    Accepts scalars or arrays.  Every x-derivative is identically zero.
    """
    if deriv not in (0, 1, 2):
        raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")
    tau = np.asarray(t, dtype=float) - ps.s
    tau = np.where(tau > 0.0, tau, 0.0)
    b, g = ps.beta, ps.gamma
    if deriv == 0:
        out = b * tau ** g
    elif deriv == 1:
        out = b * g * tau ** (g - 1.0)
    else:
        out = b * g * (g - 1.0) * tau ** (g - 2.0)
    return float(out) if out.ndim == 0 else out


def pde_residual(ps: PowerSolution, a: float, t_grid) -> float:
    """``max |u_tt - a^2 u_xx - u^alpha|`` over ``t_grid`` (u_xx = 0)."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise ValueError("t_grid must be non-negative")
    u = evaluate(ps, t, 0)
    utt = evaluate(ps, t, 2)
    # the family is x-independent, so the a^2 u_xx term vanishes for every a
    return float(np.max(np.abs(utt - np.power(u, ps.alpha))))


def seam_gap(ps: PowerSolution, h: float) -> tuple:
    """Right-side jumps of value, first and second derivative at ``t = s``."""
    if not (ps.s > 0 and 0 < h < ps.s):
        raise ValueError("need s > 0 and 0 < h < s")
    return tuple(abs(evaluate(ps, ps.s + h, k)) for k in (0, 1, 2))


def nonuniqueness_problem(alpha: float, a: float = 1.0,
                          boundary: BoundaryKind = BoundaryKind.NEUMANN) -> MixedProblem:
    """Zero data, ``f = z^alpha``, ``F = 0``, homogeneous Neumann condition.

    The power family only solves the Neumann problem (``u(t, 0) != 0`` for
    ``t > s``), so any other boundary kind is rejected.
    """
    _check_alpha(alpha)
    if boundary is not BoundaryKind.NEUMANN:
        raise ValueError("the power-law family solves only the Neumann problem")
    f = compile_fn(f"z^{alpha!r}", ("t", "x", "z"))
    return MixedProblem(a, f, zero(2), zero(1), zero(1), zero(1), BoundaryKind.NEUMANN)


def sample_levels(ps: PowerSolution, t0: float, dt: float, nx: int) -> tuple:
    """Fields at ``t0 - dt`` and ``t0`` on ``nx + 1`` points, for injection into the solver."""
    return (np.full(nx + 1, evaluate(ps, t0 - dt)), np.full(nx + 1, evaluate(ps, t0)))

