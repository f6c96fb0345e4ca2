import math
import warnings

import numpy as np
import pytest

from conftest import dalembert_dirichlet, make_problem
from telegraph.energy import minus
from telegraph.errors import CflViolation, DomainError
from telegraph.exact import PowerSolution, nonuniqueness_problem, sample_levels
from telegraph.exprlang import compile_fn
from telegraph.problem import BoundaryKind, MixedProblem, ScalarFn, zero
from telegraph.solver import (BlowUpDetected, Completed, FarBoundary, GridSpec,
                              NumericalFailure, RunOptions, init_levels, run, run_from_state,
                              step)

D, N = BoundaryKind.DIRICHLET, BoundaryKind.NEUMANN
FD, FN = FarBoundary.DIRICHLET_ZERO, FarBoundary.NEUMANN_ZERO


class TestGrid:
    def test_derived(self):
        g = GridSpec(2.0, 4.0, 10, 20)
        assert (g.dt, g.dx, g.courant(1.0)) == (0.2, 0.2, 1.0)
        assert g.x.shape == (21,) and g.x[-1] == 4.0

    def test_with_courant(self):
        g = GridSpec.with_courant(5.0, 10.0, 400, 1.0)
        assert g.courant(1.0) <= 0.9
        assert GridSpec(5.0, 10.0, g.nt - 1, 400).courant(1.0) > 0.9

    @pytest.mark.parametrize("args", [(0, 1, 2, 2), (1, -1, 2, 2), (1, 1, 1, 2), (1, 1, 2, 1)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            GridSpec(*args)

    def test_far_parse(self):
        assert FarBoundary.parse(" Neumann") is FN
        with pytest.raises(ValueError):
            FarBoundary.parse("robin")


class TestInitLevels:
    def test_zero(self, zero_problem):
        u0, u1 = init_levels(zero_problem, GridSpec(1, 1, 10, 10))
        assert not u0.any() and not u1.any()

    def test_velocity(self):
        grid = GridSpec(1, 1, 10, 10)
        u0, u1 = init_levels(make_problem(psi="1"), grid)
        assert not u0.any()
        assert np.allclose(u1, grid.dt, rtol=0, atol=1e-15)

    def test_sin_taylor(self):
        grid = GridSpec(1.0, 3.0, 100, 300)
        dt, dx = grid.dt, grid.dx
        _, u1 = init_levels(make_problem(phi="sin(x)"), grid)
        want = np.sin(grid.x) * (1 - dt * dt / 2)
        assert np.max(np.abs(u1 - want)) <= dt ** 4 + dt ** 2 * dx ** 2

    def test_analytic_second_derivative(self):
        phi = ScalarFn(math.sin, 1, derivatives={(0, 2): lambda x: -math.sin(x)})
        p = MixedProblem(1.0, zero(3), zero(2), phi, zero(1), zero(1), D)
        grid = GridSpec(1.0, 3.0, 100, 300)
        _, u1 = init_levels(p, grid)
        want = np.sin(grid.x) * (1 - grid.dt ** 2 / 2)
        assert np.max(np.abs(u1 - want)) <= 1e-15

    def test_source_included(self):
        grid = GridSpec(1, 1, 10, 10)
        _, u1 = init_levels(make_problem(F="2"), grid)
        assert np.allclose(u1, grid.dt ** 2)


class TestStep:
    def test_zero_preserved(self, zero_problem):
        grid = GridSpec(1, 1, 10, 10)
        z = np.zeros(11)
        assert not step(zero_problem, grid, FD, 1, z, z).any()

    def test_unit_cfl_transport(self, zero_problem):
        grid = GridSpec(1.0, 1.0, 20, 20)
        j0 = 5
        prev, cur = np.zeros(21), np.zeros(21)
        prev[j0 - 1] = cur[j0] = 1.0
        nxt = step(zero_problem, grid, FD, 1, prev, cur)
        want = np.zeros(21)
        want[j0 + 1] = 1.0
        assert np.array_equal(nxt, want)
        nxt2 = step(zero_problem, grid, FD, 2, cur, nxt)
        want2 = np.zeros(21)
        want2[j0 + 2] = 1.0
        assert np.array_equal(nxt2, want2)

    def test_constant_neumann_state(self):
        p = nonuniqueness_problem(0.5)
        grid = GridSpec(1.0, 1.0, 20, 10)
        c, prev = 0.09, 0.08
        out = step(p, grid, FN, 3, np.full(11, prev), np.full(11, c))
        assert np.allclose(out, 2 * c - prev + grid.dt ** 2 * c ** 0.5, rtol=1e-15, atol=0)

    def test_dirichlet_boundary_value(self):
        p = make_problem(mu="t")
        grid = GridSpec(1.0, 1.0, 10, 10)
        out = step(p, grid, FD, 4, np.zeros(11), np.zeros(11))
        assert out[0] == pytest.approx(0.5) and out[-1] == 0.0

    def test_neumann_ghost(self):
        # mu = 1: ghost u_{-1} = u_1 - 2 dx, so out_0 = nu^2 (-2 dx) from a zero state
        p = make_problem(mu="1", boundary=N)
        grid = GridSpec(1.0, 1.0, 10, 10)
        out = step(p, grid, FN, 1, np.zeros(11), np.zeros(11))
        assert out[0] == pytest.approx(-2 * grid.dx)
        assert not out[1:].any()

    def test_shape_check(self, zero_problem):
        with pytest.raises(ValueError):
            step(zero_problem, GridSpec(1, 1, 10, 10), FD, 1, np.zeros(5), np.zeros(5))


@pytest.mark.parametrize("boundary,far", [(D, FD), (N, FN), (D, FN), (N, FD)])
def test_zero_preservation_bitwise(boundary, far):
    p = make_problem(f="z^0.5 + sin(t*x)*z", boundary=boundary)
    traj = run(p, GridSpec(2.0, 1.0, 100, 40), far)
    assert isinstance(traj.status, Completed)
    assert all(not u.any() for _, u in traj.snapshots)
    assert traj.max_abs_u == 0.0
    assert all(e == 0.0 for _, e in traj.energy_series)


def test_dalembert_second_order():
    c, w, L, T = 2.2, 1.8, 40 / 9, 2.0
    p = make_problem(phi=f"bump(x,{c},{w})")
    errs = []
    for nx in (200, 400):
        grid = GridSpec(T, L, nx // 2, nx)
        traj = run(p, grid, FD)
        t, u = traj.final
        errs.append(np.max(np.abs(u - dalembert_dirichlet(grid.x, t, L, c, w))))
    assert errs[0] < 5e-4
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_domain_of_dependence():
    p = make_problem(phi="bump(x,2,1)", psi="0.5*bump(x,2,1)")
    grid = GridSpec.with_courant(1.0, 5.0, 200, 1.0)
    a = run(p, grid, FD, RunOptions(support_bound=3.0))
    b = run(p, grid, FN, RunOptions(support_bound=3.0))
    keep = grid.x <= grid.L - 1.0
    for (_, ua), (_, ub) in zip(a.snapshots, b.snapshots):
        assert np.max(np.abs(ua[keep] - ub[keep])) <= 1e-12


def test_domain_of_dependence_warning():
    p = make_problem(phi="bump(x,2,1)")
    with pytest.warns(RuntimeWarning, match="far boundary"):
        run(p, GridSpec(2.0, 3.0, 40, 20), FD, RunOptions(support_bound=3.0))


def test_blowup_detected():
    g = compile_fn("-z^3", ("z",))
    p = MixedProblem(1.0, minus(g), zero(2), compile_fn("5*bump(x,2,1)", ("x",)),
                     zero(1), zero(1), D)
    traj = run(p, GridSpec.with_courant(1.0, 6.0, 400, 1.0), FD, RunOptions(g=g))
    assert isinstance(traj.status, BlowUpDetected)
    assert 0.3 < traj.status.t_detect < 0.5
    assert traj.max_abs_u <= 1e6
    assert traj.times[-1] < traj.status.t_detect


def test_infinite_threshold_surfaces_overflow():
    # without a cutoff the cubic source overflows first, reported with the time
    p = make_problem(f="z^3", phi="5*bump(x,2,1)")
    with pytest.raises(DomainError, match="t="):
        run(p, GridSpec.with_courant(1.0, 6.0, 100, 1.0), FD,
            RunOptions(blowup_threshold=math.inf))


def test_cfl_violation():
    with pytest.raises(CflViolation) as err:
        run(make_problem(a=2.0), GridSpec(1.0, 1.0, 10, 10))
    assert err.value.nu == pytest.approx(2.0)


def test_unit_cfl_allowed(zero_problem):
    assert isinstance(run(zero_problem, GridSpec(1, 1, 10, 10)).status, Completed)


def test_domain_error_on_negative_root():
    p = make_problem(f="z^0.5", phi="-bump(x,0.5,0.3)")
    with pytest.raises(DomainError):
        run(p, GridSpec(1.0, 1.0, 20, 20), FD)


def test_nan_is_numerical_failure(zero_problem):
    grid = GridSpec(1.0, 1.0, 10, 10)
    cur = np.zeros(11)
    cur[3] = np.nan
    traj = run_from_state(zero_problem, grid, FD, 0.5, (np.zeros(11), cur))
    assert isinstance(traj.status, NumericalFailure)
    assert traj.snapshots == []


class TestRunFromState:
    def test_zero_continuation(self):
        p = nonuniqueness_problem(0.5)
        grid = GridSpec(2.0, 1.0, 40, 10)
        traj = run_from_state(p, grid, FN, 1.0, (np.zeros(11), np.zeros(11)))
        assert isinstance(traj.status, Completed)
        assert traj.times[0] == pytest.approx(1.0)
        assert all(not u.any() for _, u in traj.snapshots)

    def glued_error(self, scale, boundary=N):
        p = nonuniqueness_problem(0.5).with_boundary(boundary)
        ps = PowerSolution.from_alpha(0.5, 1.0)
        grid = GridSpec(2.5, 1.0, 100 * scale, 20 * scale)
        traj = run_from_state(p, grid, FN, 1.5, sample_levels(ps, 1.5, grid.dt, grid.nx))
        assert isinstance(traj.status, Completed)
        t, u = traj.final
        assert t == pytest.approx(2.5)
        return np.max(np.abs(u - ps(2.5)))

    def test_glued_converges(self):
        e1, e2 = self.glued_error(1), self.glued_error(2)
        assert e1 < 1e-5
        assert 3.5 <= e1 / e2 <= 4.5

    def test_dirichlet_diverges(self):
        assert self.glued_error(1, D) > 1e-3

    def test_not_grid_time(self, zero_problem):
        with pytest.raises(ValueError):
            run_from_state(zero_problem, GridSpec(1, 1, 10, 10), FD, 0.55,
                           (np.zeros(11), np.zeros(11)))

    def test_level_shape(self, zero_problem):
        with pytest.raises(ValueError):
            run_from_state(zero_problem, GridSpec(1, 1, 10, 10), FD, 0.5,
                           (np.zeros(3), np.zeros(3)))


class TestTrajectory:
    def test_invariants(self):
        p = make_problem(phi="bump(x,1,0.5)")
        grid = GridSpec(1.0, 3.0, 50, 60)
        traj = run(p, grid, FD, RunOptions(snapshot_stride=7))
        ts = traj.times
        assert ts[0] == 0.0 and ts[-1] == pytest.approx(1.0)
        assert np.all(np.diff(ts) > 0)
        assert len(ts) == 1 + 50 // 7 + 1
        for _, u in traj.snapshots:
            assert u.shape == (61,) and np.all(np.isfinite(u))
        assert len(traj.energy_series) == 50
        assert traj.at(0.0) is traj.snapshots[0][1]
        with pytest.raises(KeyError):
            traj.at(0.5)

    def test_energy_drift_small(self):
        g = compile_fn("z", ("z",))
        p = MixedProblem(1.0, minus(g), zero(2), compile_fn("bump(x,5,2)", ("x",)),
                         zero(1), zero(1), N)
        traj = run(p, GridSpec.with_courant(2.0, 10.0, 200, 1.0), FN, RunOptions(g=g))
        e = np.array([v for _, v in traj.energy_series])
        assert np.max(np.abs(e - e[0])) <= 0.01 * abs(e[0])

    def test_bad_stride(self):
        with pytest.raises(ValueError):
            RunOptions(snapshot_stride=0)


def test_no_warnings_for_safe_domain(zero_problem):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        run(zero_problem, GridSpec(1.0, 5.0, 20, 20), FD, RunOptions(support_bound=1.0))
