import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bump_np, midpoint
from telegraph.errors import MaxDepthExceeded
from telegraph.exprlang import compile_fn
from telegraph.numerics import (FdConfig, QuadConfig, Scheme, derivative, fd_derivative,
                                integrate, potential)
from telegraph.problem import ScalarFn

CENTRAL = Scheme.CENTRAL
FORWARD = Scheme.FORWARD_ONE_SIDED


class TestFiniteDifferences:
    def test_quadratic_second_derivative_exact(self):
        assert fd_derivative(lambda x: x * x, 0.7, 2, FdConfig(None, CENTRAL)) == pytest.approx(2.0, abs=1e-6)

    def test_forward_sin(self):
        assert abs(fd_derivative(math.sin, 0.0, 1, FdConfig(1e-4, FORWARD)) - 1.0) < 1e-7

    def test_forward_exp_second(self):
        # analytic exp''(0) = 1
        assert abs(fd_derivative(math.exp, 0.0, 2, FdConfig(1e-3, FORWARD)) - 1.0) < 1e-5

    @pytest.mark.parametrize("scheme", [CENTRAL, FORWARD])
    @pytest.mark.parametrize("order", [1, 2])
    @given(c0=st.floats(-5, 5), c1=st.floats(-5, 5), c2=st.floats(-5, 5), x=st.floats(0, 3))
    @settings(max_examples=50, deadline=None)
    def test_exact_on_quadratics(self, scheme, order, c0, c1, c2, x):
        fn = lambda y: c0 + c1 * y + c2 * y * y  # noqa: E731
        want = c1 + 2 * c2 * x if order == 1 else 2 * c2
        h = 1e-2
        got = fd_derivative(fn, x, order, FdConfig(h, scheme))
        # exact up to rounding, which scales like eps * |f| / h^order
        scale = (abs(c0) + abs(c1) * 4 + abs(c2) * 16 + 1) * 1e-16 / h ** order
        assert abs(got - want) <= 50 * scale

    def test_analytic_handle_takes_precedence(self):
        fn = ScalarFn(math.sin, 1, derivatives={(0, 1): lambda x: 42.0})
        assert derivative(fn, 0.0, 1) == 42.0

    def test_default_switches_to_forward_near_zero(self):
        calls = []

        def half_line(x):
            calls.append(x)
            if x < 0:
                raise AssertionError("evaluated below zero")
            return math.sin(x)

        fn = ScalarFn(half_line, 1)
        assert abs(derivative(fn, 0.0, 1) - 1.0) < 1e-9
        assert min(calls) >= 0

    def test_bad_config(self):
        with pytest.raises(ValueError):
            FdConfig(0.0)
        with pytest.raises(ValueError):
            fd_derivative(math.sin, 0.0, 3)


class TestIntegrate:
    def test_polynomial(self):
        assert integrate(lambda x: x * x, 0, 1) == pytest.approx(1 / 3, rel=1e-10)

    def test_sin(self):
        assert integrate(math.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-10)

    def test_bump_against_midpoint_oracle(self):
        ref = midpoint(lambda x: bump_np(x, 2, 1), 1.0, 3.0)
        got = integrate(compile_fn("bump(x,2,1)", ["x"]), 1.0, 3.0)
        assert abs(got - ref) < 1e-9

    def test_empty_interval(self):
        assert integrate(math.exp, 2.0, 2.0) == 0.0

    def test_reversed_bounds(self):
        with pytest.raises(ValueError):
            integrate(math.exp, 1.0, 0.0)

    def test_max_depth(self):
        def singular(x):
            return 1.0 / math.sqrt(x) if x > 0 else 0.0

        with pytest.raises(MaxDepthExceeded) as err:
            integrate(singular, 0.0, 1.0, QuadConfig(1e-14, 8))
        assert 1.5 < err.value.estimate < 2.0

    @given(st.floats(-2, 2), st.floats(0, 1), st.floats(0, 2))
    @settings(max_examples=60, deadline=None)
    def test_additive(self, a, frac, width):
        c = a + width
        b = a + frac * width
        f = lambda x: math.exp(x) + math.cos(3 * x) + 2.0  # noqa: E731
        cfg = QuadConfig()
        whole = integrate(f, a, c, cfg)
        parts = integrate(f, a, b, cfg) + integrate(f, b, c, cfg)
        assert abs(whole - parts) <= 10 * cfg.rel_tol * abs(whole) + 1e-300


class TestPotential:
    def test_examples(self):
        assert potential(lambda z: z, 2.0) == pytest.approx(2.0, rel=1e-12)
        assert potential(lambda z: -z ** 3, 1.0) == pytest.approx(-0.25, rel=1e-12)
        assert potential(lambda z: -z ** 3, -1.0) == pytest.approx(-0.25, rel=1e-12)

    def test_zero_is_exact(self):
        assert potential(lambda z: 1 / 0, 0.0) == 0.0

    @given(st.floats(0.01, 5))
    @settings(max_examples=50, deadline=None)
    def test_even_for_odd_g(self, z):
        g = lambda s: math.sin(s) + s ** 3  # noqa: E731
        assert potential(g, -z) == pytest.approx(potential(g, z), rel=1e-9)
