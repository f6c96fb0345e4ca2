"""Problem instances for the telegraph equation with a nonlinear potential.

The equation is ``u_tt - a^2 u_xx - f(t, x, u) = F(t, x)`` on the quarter
plane ``t > 0, x > 0`` with initial data ``u(0, x) = phi(x)``,
``u_t(0, x) = psi(x)`` and a boundary condition ``B[u](t, 0) = mu(t)``
where ``B`` is either the identity (Dirichlet) or ``d/dx`` (Neumann).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ArityMismatch, DomainError, NonPositiveSpeed


class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, text: str) -> "BoundaryKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown boundary kind {text!r}; expected dirichlet or neumann") from None


@dataclass(frozen=True)
class ScalarFn:
    """A real function of ``arity`` real variables.

    ``derivatives`` maps ``(variable_index, order)`` with order 1 or 2 to a
    callable of the same arity.  ``vectorized``, when given, evaluates the
    function elementwise on numpy arrays and is used by the solver.
    """

    func: Callable[..., float]
    arity: int
    derivatives: Mapping[tuple, Callable[..., float]] = field(default_factory=dict)
    vectorized: Optional[Callable[..., np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        if self.arity not in (1, 2, 3):
            raise ArityMismatch(f"arity must be 1, 2 or 3, got {self.arity}")
        for var, order in self.derivatives:
            if not 0 <= var < self.arity or order not in (1, 2):
                raise ArityMismatch(f"bad derivative key {(var, order)} for arity {self.arity}")

    def __call__(self, *args: float) -> float:
        if len(args) != self.arity:
            raise ArityMismatch(f"{self.label} expects {self.arity} arguments, got {len(args)}")
        return _checked(self.func(*args), self.label, args)

    @property
    def label(self) -> str:
        return self.name or getattr(self.func, "__name__", "function")

    def derivative(self, var: int = 0, order: int = 1) -> Optional["ScalarFn"]:
        """Analytic derivative as a ScalarFn, or None when no handle was supplied."""
        d = self.derivatives.get((var, order))
        if d is None:
            return None
        return ScalarFn(d, self.arity, name=f"d{order}/dv{var} {self.label}")

    def many(self, *arrays) -> np.ndarray:
        """Evaluate elementwise over broadcastable arrays."""
        if len(arrays) != self.arity:
            raise ArityMismatch(f"{self.label} expects {self.arity} arguments, got {len(arrays)}")
        arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in arrays))
        if self.vectorized is not None:
            with np.errstate(all="ignore"):
                out = np.asarray(self.vectorized(*arrays), dtype=float)
            out = np.broadcast_to(out, arrays[0].shape).copy()
        else:
            out = np.empty(arrays[0].shape)
            flat = [a.ravel() for a in arrays]
            res = out.ravel()
            for i in range(res.size):
                res[i] = self.func(*(a[i] for a in flat))
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.flatnonzero(bad.ravel())[0])
            where = tuple(float(a.ravel()[i]) for a in arrays)
            raise DomainError(f"{self.label} produced a non-finite value", where)
        return out

    @classmethod
    def constant(cls, value: float, arity: int) -> "ScalarFn":
        value = float(value)
        zero = (lambda *args: 0.0)
        derivs = {(v, k): zero for v in range(arity) for k in (1, 2)}
        return cls(
            lambda *args: value,
            arity,
            derivatives=derivs,
            vectorized=lambda *arrays: np.full(np.shape(arrays[0]), value),
            name=repr(value),
        )


def _checked(value, label, args) -> float:
    try:
        value = float(value)
    except (TypeError, OverflowError) as exc:
        raise DomainError(f"{label} did not return a real number: {exc}", args) from None
    if not math.isfinite(value):
        raise DomainError(f"{label} returned {value}", args)
    return value


def zero(arity: int) -> ScalarFn:
    return ScalarFn.constant(0.0, arity)


@dataclass(frozen=True)
class MixedProblem:
    """Full problem instance; ``f`` takes ``(t, x, z)`` and ``F`` takes ``(t, x)``."""

    a: float
    f: ScalarFn
    F: ScalarFn
    phi: ScalarFn
    psi: ScalarFn
    mu: ScalarFn
    boundary: BoundaryKind

    def with_boundary(self, boundary: BoundaryKind) -> "MixedProblem":
        return MixedProblem(self.a, self.f, self.F, self.phi, self.psi, self.mu, boundary)


_ARITIES = {"f": 3, "F": 2, "phi": 1, "psi": 1, "mu": 1}


def validate(p: MixedProblem) -> None:
    """Raise if ``p`` violates an instance invariant; otherwise return None."""
    if not (isinstance(p.a, (int, float)) and math.isfinite(p.a) and p.a > 0):
        raise NonPositiveSpeed(f"wave speed must be a finite positive real, got {p.a!r}")
    for name, arity in _ARITIES.items():
        fn = getattr(p, name)
        if not isinstance(fn, ScalarFn):
            raise ArityMismatch(f"{name} must be a ScalarFn, got {type(fn).__name__}")
        if fn.arity != arity:
            raise ArityMismatch(f"{name} must have arity {arity}, got {fn.arity}")
    if not isinstance(p.boundary, BoundaryKind):
        raise TypeError(f"boundary must be a BoundaryKind, got {p.boundary!r}")
