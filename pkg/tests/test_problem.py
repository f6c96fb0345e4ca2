import math

import numpy as np
import pytest

from telegraph.errors import ArityMismatch, DomainError, NonPositiveSpeed
from telegraph.problem import BoundaryKind, MixedProblem, ScalarFn, validate, zero


def test_validate_accepts_zero_problem(zero_problem):
    assert validate(zero_problem) is None


@pytest.mark.parametrize("a", [0.0, -1.0, math.nan, math.inf])
def test_validate_rejects_bad_speed(zero_problem, a):
    p = MixedProblem(a, *(getattr(zero_problem, k) for k in ("f", "F", "phi", "psi", "mu")),
                     zero_problem.boundary)
    with pytest.raises(NonPositiveSpeed):
        validate(p)


def test_validate_rejects_wrong_arity(zero_problem):
    p = MixedProblem(1.0, zero(2), zero(2), zero(1), zero(1), zero(1), BoundaryKind.NEUMANN)
    with pytest.raises(ArityMismatch):
        validate(p)


def test_validate_is_idempotent(zero_problem):
    validate(zero_problem)
    validate(zero_problem)
    assert zero_problem.a == 1.0


def test_scalarfn_rejects_non_finite():
    fn = ScalarFn(lambda x: 1.0 / x if x else math.inf, 1, name="recip")
    assert fn(2.0) == 0.5
    with pytest.raises(DomainError):
        fn(0.0)
    with pytest.raises(DomainError):
        fn.many(np.array([1.0, 0.0]))


def test_scalarfn_call_checks_arity():
    with pytest.raises(ArityMismatch):
        zero(2)(1.0)
    with pytest.raises(ArityMismatch):
        ScalarFn(lambda x: x, 4)


def test_scalarfn_derivative_handles():
    fn = ScalarFn(math.sin, 1, derivatives={(0, 1): math.cos, (0, 2): lambda x: -math.sin(x)})
    assert fn.derivative(0, 1)(0.0) == 1.0
    assert fn.derivative(0, 2)(0.0) == 0.0
    assert ScalarFn(math.sin, 1).derivative(0, 1) is None
    with pytest.raises(ArityMismatch):
        ScalarFn(math.sin, 1, derivatives={(1, 1): math.cos})


def test_many_without_vectorized_matches_scalar():
    fn = ScalarFn(lambda t, x: t * x + 1.0, 2)
    out = fn.many(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
    assert out.tolist() == [4.0, 9.0]


def test_boundary_parse():
    assert BoundaryKind.parse(" Neumann ") is BoundaryKind.NEUMANN
    with pytest.raises(ValueError):
        BoundaryKind.parse("robin")
