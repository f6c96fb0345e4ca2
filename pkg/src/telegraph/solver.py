"""Explicit leapfrog finite differences on a truncated quarter plane ``[0, T] x [0, L]``.

Interior update::

    u[n+1, j] = 2 u[n, j] - u[n-1, j] + nu^2 (u[n, j+1] - 2 u[n, j] + u[n, j-1])
                + dt^2 (f(t_n, x_j, u[n, j]) + F(t_n, x_j))

with ``nu = a dt / dx <= 1``.  The nonlinearity is explicit.  Blow-up is
a numerical proxy: ``max |u|`` exceeding a threshold or becoming infinite.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels, numerics
from .errors import CflViolation, DomainError
from .numerics import QuadConfig
from .problem import BoundaryKind, MixedProblem, ScalarFn

log = logging.getLogger(__name__)

_CFL_SLACK = 1e-12


@dataclass(frozen=True)
class GridSpec:
    T: float
    L: float
    nt: int
    nx: int

    def __post_init__(self):
        if not (self.T > 0 and self.L > 0):
            raise ValueError("T and L must be positive")
        if self.nt < 2 or self.nx < 2:
            raise ValueError("need nt >= 2 and nx >= 2")

    @property
    def dt(self) -> float:
        return self.T / self.nt

    @property
    def dx(self) -> float:
        return self.L / self.nx

    def courant(self, a: float) -> float:
        return a * self.dt / self.dx

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.nx + 1)

    def t(self, n: int) -> float:
        return n * self.dt

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.T, self.L, self.nt * factor, self.nx * factor)

    @classmethod
    def with_courant(cls, T: float, L: float, nx: int, a: float, nu: float = 0.9) -> "GridSpec":
        """Smallest ``nt`` giving a Courant number no larger than ``nu``."""
        nt = max(2, math.ceil(a * T * nx / (nu * L) - 1e-9))
        return cls(T, L, nt, nx)


class FarBoundary(enum.Enum):
    DIRICHLET_ZERO = "dirichlet"
    NEUMANN_ZERO = "neumann"

    @classmethod
    def parse(cls, text: str) -> "FarBoundary":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown far boundary {text!r}; expected dirichlet or neumann") from None


@dataclass(frozen=True)
class Completed:
    def __str__(self):
        return "Completed"


@dataclass(frozen=True)
class BlowUpDetected:
    t_detect: float

    def __str__(self):
        return "BlowUpDetected"


@dataclass(frozen=True)
class NumericalFailure:
    t: float
    reason: str

    def __str__(self):
        return "NumericalFailure"


Status = Union[Completed, BlowUpDetected, NumericalFailure]


@dataclass(frozen=True)
class RunOptions:
    """``g`` adds the potential term to the energy series; ``support_bound``
    enables the domain-of-dependence warning for a truncated domain."""

    blowup_threshold: float = 1e6
    snapshot_stride: int = 1
    g: Optional[ScalarFn] = None
    quad: QuadConfig = QuadConfig()
    support_bound: Optional[float] = None

    def __post_init__(self):
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


@dataclass
class Trajectory:
    grid: GridSpec
    snapshots: list = field(default_factory=list)
    energy_series: list = field(default_factory=list)
    status: Status = Completed()
    max_abs_u: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    @property
    def final(self) -> tuple:
        return self.snapshots[-1]

    def at(self, t: float, tol: float = 1e-9) -> np.ndarray:
        for ts, u in self.snapshots:
            if abs(ts - t) <= tol * max(1.0, abs(t)):
                return u
        raise KeyError(f"no snapshot at t={t}")


def _check_cfl(p: MixedProblem, grid: GridSpec) -> float:
    nu = grid.courant(p.a)
    if nu > 1.0 + _CFL_SLACK:
        raise CflViolation(nu)
    return nu


def _second_derivative(p: MixedProblem, grid: GridSpec, u0: np.ndarray) -> np.ndarray:
    d2 = p.phi.derivative(0, 2)
    x = grid.x
    if d2 is not None:
        return np.array([d2(float(xj)) for xj in x])
    dx2 = grid.dx ** 2
    out = np.empty_like(u0)
    out[1:-1] = (u0[2:] - 2.0 * u0[1:-1] + u0[:-2]) / dx2
    if len(u0) >= 4:
        out[0] = (2.0 * u0[0] - 5.0 * u0[1] + 4.0 * u0[2] - u0[3]) / dx2
        out[-1] = (2.0 * u0[-1] - 5.0 * u0[-2] + 4.0 * u0[-3] - u0[-4]) / dx2
    else:
        out[0] = out[-1] = out[1]
    return out


def _source(p: MixedProblem, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    tt = np.full_like(x, t)
    try:
        return p.f.many(tt, x, u) + p.F.many(tt, x)
    except DomainError as exc:
        raise DomainError(f"evaluating the source at t={t:.6g}: {exc}") from None


def init_levels(p: MixedProblem, grid: GridSpec) -> tuple:
    """Levels at ``t = 0`` and ``t = dt`` from the data and a second-order Taylor start."""
    _check_cfl(p, grid)
    x = grid.x
    dt = grid.dt
    u0 = p.phi.many(x)
    psi = p.psi.many(x)
    acc = p.a ** 2 * _second_derivative(p, grid, u0) + _source(p, 0.0, x, u0)
    u1 = u0 + dt * psi + 0.5 * dt * dt * acc
    return u0, u1


def _boundary_args(p: MixedProblem, grid: GridSpec, far: FarBoundary, n: int) -> tuple:
    if p.boundary is BoundaryKind.NEUMANN:
        left_neumann, left_value = True, 2.0 * grid.dx * p.mu(grid.t(n))
    else:
        left_neumann, left_value = False, p.mu(grid.t(n + 1))
    return left_neumann, left_value, far is FarBoundary.NEUMANN_ZERO


def step(p: MixedProblem, grid: GridSpec, far: FarBoundary, n: int,
         u_prev: np.ndarray, u_cur: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
    """Level ``n + 1`` from levels ``n - 1`` and ``n``."""
    if u_prev.shape != (grid.nx + 1,) or u_cur.shape != (grid.nx + 1,):
        raise ValueError(f"fields must have {grid.nx + 1} entries")
    nu = grid.courant(p.a)
    src = grid.dt ** 2 * _source(p, grid.t(n), grid.x, u_cur)
    if out is None:
        out = np.empty_like(u_cur)
    left_neumann, left_value, right_neumann = _boundary_args(p, grid, far, n)
    kernels.leapfrog_step(
        np.ascontiguousarray(u_prev, dtype=float), np.ascontiguousarray(u_cur, dtype=float),
        src, nu * nu, left_neumann, left_value, right_neumann, out,
    )
    return out


def _potential_sum(g: ScalarFn, mid: np.ndarray, quad: QuadConfig) -> float:
    # G(0) = 0 exactly, so zero entries are skipped
    total = 0.0
    for z in mid[mid != 0.0]:
        total += numerics.potential(g, float(z), quad)
    return total


def half_step_energy(p: MixedProblem, grid: GridSpec, u_cur: np.ndarray, u_next: np.ndarray,
                     g: Optional[ScalarFn] = None, quad: QuadConfig = QuadConfig()) -> float:
    """Discrete energy between two consecutive levels (G term only when ``g`` is given)."""
    e = kernels.quadratic_energy(u_cur, u_next, grid.dt, grid.dx, p.a)
    if g is not None:
        e += grid.dx * _potential_sum(g, 0.5 * (u_cur + u_next), quad)
    return e


def _march(p, grid, far, n0, u_prev, u_cur, opts: RunOptions) -> Trajectory:
    traj = Trajectory(grid)
    stride = opts.snapshot_stride

    def record(n, u):
        traj.snapshots.append((grid.t(n), u.copy()))

    def energy(n, a, b):
        traj.energy_series.append(
            (grid.t(n) + 0.5 * grid.dt, half_step_energy(p, grid, a, b, opts.g, opts.quad)))

    def blown(n, u) -> bool:
        m = kernels.max_abs(u)
        if math.isnan(m):
            traj.status = NumericalFailure(grid.t(n), "nan in solution field")
            return True
        if m > opts.blowup_threshold or math.isinf(m):
            traj.status = BlowUpDetected(grid.t(n))
            return True
        traj.max_abs_u = max(traj.max_abs_u, m)
        return False

    if blown(n0 - 1, u_prev) or blown(n0, u_cur):
        return traj
    if n0 == 1:
        record(0, u_prev)
    if n0 % stride == 0 or n0 == grid.nt:
        record(n0, u_cur)
    energy(n0 - 1, u_prev, u_cur)

    u_prev, u_cur = u_prev.copy(), u_cur.copy()
    buf = np.empty_like(u_cur)
    for n in range(n0, grid.nt):
        u_next = step(p, grid, far, n, u_prev, u_cur, out=buf)
        if blown(n + 1, u_next):
            log.info("stopped at t=%.6g: %s", grid.t(n + 1), traj.status)
            return traj
        energy(n, u_cur, u_next)
        if (n + 1) % stride == 0 or n + 1 == grid.nt:
            record(n + 1, u_next)
        u_prev, u_cur, buf = u_cur, u_next, u_prev
    return traj


def _warn_domain_of_dependence(p: MixedProblem, grid: GridSpec, opts: RunOptions, t0: float = 0.0):
    X = opts.support_bound
    if X is not None and grid.L < X + p.a * (grid.T - t0):
        warnings.warn(
            f"L = {grid.L:g} < X + a*T = {X + p.a * (grid.T - t0):g}: the far boundary can "
            "influence the solution", RuntimeWarning, stacklevel=3)


def run(p: MixedProblem, grid: GridSpec, far: FarBoundary = FarBoundary.DIRICHLET_ZERO,
        opts: RunOptions = RunOptions()) -> Trajectory:
    """March from the initial data to ``T`` or until blow-up is detected."""
    _check_cfl(p, grid)
    _warn_domain_of_dependence(p, grid, opts)
    u0, u1 = init_levels(p, grid)
    return _march(p, grid, far, 1, u0, u1, opts)


def run_from_state(p: MixedProblem, grid: GridSpec, far: FarBoundary, t0: float,
                   levels: tuple, opts: RunOptions = RunOptions()) -> Trajectory:
    """March from injected levels at ``t0 - dt`` and ``t0``; ``t0`` must be a grid time."""
    _check_cfl(p, grid)
    n0 = round(t0 / grid.dt)
    if n0 < 1 or n0 > grid.nt or abs(n0 * grid.dt - t0) > 1e-9 * max(1.0, abs(t0)):
        raise ValueError(f"t0={t0} is not a grid time in (0, T] for dt={grid.dt}")
    u_prev, u_cur = (np.asarray(u, dtype=float) for u in levels)
    if u_prev.shape != (grid.nx + 1,) or u_cur.shape != (grid.nx + 1,):
        raise ValueError(f"levels must have {grid.nx + 1} entries")
    _warn_domain_of_dependence(p, grid, opts, t0)
    return _march(p, grid, far, n0, u_prev, u_cur, opts)
