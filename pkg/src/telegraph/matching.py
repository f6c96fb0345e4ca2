"""Corner matching conditions for the first and second mixed problems.

A classical solution on the closed quarter plane must satisfy identities
among the data at the corner ``(0, 0)``.  A violated identity certifies
that no classical solution exists.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import numerics
from .numerics import FdConfig, Scheme
from .problem import BoundaryKind, MixedProblem

TOL_ANALYTIC = 1e-8
TOL_FD = 1e-5

FIRST_PROBLEM_CRITERION = "dirichlet corner matching criterion"
SECOND_PROBLEM_CRITERION = "neumann corner matching criterion"


class SecondOrderForm(enum.Enum):
    """Which second-order Dirichlet condition to check.

    DERIVED uses ``a^2 phi''(0)`` (the corner identity of the equation);
    LITERAL uses ``a^2 phi(0)`` and the averaged nonlinearity
    ``(f(0,0,phi(0)) + f(0,0,mu(0))) / 2``; kept selectable for comparison.
    """

    DERIVED = "derived"
    LITERAL = "literal"


@dataclass(frozen=True)
class Compatible:
    def __str__(self):
        return "Compatible"


@dataclass(frozen=True)
class NonexistenceCertificate:
    order: int
    text: str

    def __str__(self):
        return f"NonexistenceCertificate({self.order})"


Verdict = Union[Compatible, NonexistenceCertificate]

_CONDITIONS = {
    BoundaryKind.DIRICHLET: {
        0: ("mu(0) = phi(0)", FIRST_PROBLEM_CRITERION),
        1: ("mu'(0) = psi(0)", FIRST_PROBLEM_CRITERION),
        2: ("mu''(0) = f(0,0,phi(0)) + F(0,0) + a^2 phi''(0)", FIRST_PROBLEM_CRITERION),
    },
    BoundaryKind.NEUMANN: {
        0: ("mu(0) = phi'(0)", SECOND_PROBLEM_CRITERION),
        1: ("mu'(0) = psi'(0)", SECOND_PROBLEM_CRITERION),
    },
}

_LITERAL_R2 = "mu''(0) = (f(0,0,phi(0)) + f(0,0,mu(0)))/2 + F(0,0) + a^2 phi(0)"


@dataclass(frozen=True)
class MatchingReport:
    boundary: BoundaryKind
    residuals: tuple
    tol: float
    verdict: Verdict
    form: Optional[SecondOrderForm] = None

    @property
    def assertion_cited(self) -> str:
        return FIRST_PROBLEM_CRITERION if self.boundary is BoundaryKind.DIRICHLET else SECOND_PROBLEM_CRITERION


def _corner(fn, order, fd: Optional[FdConfig]) -> float:
    # data live on [0, inf): the FD stencil at the corner must be one-sided
    if fd is None:
        fd = FdConfig(None, Scheme.FORWARD_ONE_SIDED)
    return numerics.derivative(fn, 0.0, order, fd)


def residuals_dirichlet(p: MixedProblem, form: SecondOrderForm = SecondOrderForm.DERIVED,
                        fd: Optional[FdConfig] = None) -> list:
    if p.boundary is not BoundaryKind.DIRICHLET:
        raise ValueError("residuals_dirichlet needs a Dirichlet problem")
    mu0 = p.mu(0.0)
    phi0 = p.phi(0.0)
    r0 = mu0 - phi0
    r1 = _corner(p.mu, 1, fd) - p.psi(0.0)
    mu2 = _corner(p.mu, 2, fd)
    if form is SecondOrderForm.DERIVED:
        rhs = p.f(0.0, 0.0, phi0) + p.F(0.0, 0.0) + p.a ** 2 * _corner(p.phi, 2, fd)
    else:
        rhs = 0.5 * (p.f(0.0, 0.0, phi0) + p.f(0.0, 0.0, mu0)) + p.F(0.0, 0.0) + p.a ** 2 * phi0
    return [(0, r0), (1, r1), (2, mu2 - rhs)]


def residuals_neumann(p: MixedProblem, fd: Optional[FdConfig] = None) -> list:
    if p.boundary is not BoundaryKind.NEUMANN:
        raise ValueError("residuals_neumann needs a Neumann problem")
    r0 = p.mu(0.0) - _corner(p.phi, 1, fd)
    r1 = _corner(p.mu, 1, fd) - _corner(p.psi, 1, fd)
    return [(0, r0), (1, r1)]


def classify(residuals: Sequence, tol: float,
             boundary: BoundaryKind = BoundaryKind.DIRICHLET,
             form: SecondOrderForm = SecondOrderForm.DERIVED) -> Verdict:
    """Certificate for the lowest order whose residual exceeds ``tol`` in magnitude."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    for order, value in sorted(residuals):
        if not abs(value) <= tol:
            cond, assertion = _CONDITIONS[boundary][order]
            if boundary is BoundaryKind.DIRICHLET and order == 2 and form is SecondOrderForm.LITERAL:
                cond = _LITERAL_R2
            problem = "first" if boundary is BoundaryKind.DIRICHLET else "second"
            text = (
                f"matching condition of order {order} fails: {cond} "
                f"(residual {value:.6g}, tol {tol:.3g}); by the {assertion} the {problem} "
                f"mixed problem has no classical solution on the closed quarter plane"
            )
            return NonexistenceCertificate(order, text)
    return Compatible()


def _uses_fd(p: MixedProblem) -> bool:
    if p.boundary is BoundaryKind.DIRICHLET:
        needed = [(p.mu, 1), (p.mu, 2), (p.phi, 2)]
    else:
        needed = [(p.phi, 1), (p.mu, 1), (p.psi, 1)]
    return not all(numerics.has_analytic(fn, k) for fn, k in needed)


def check(p: MixedProblem, form: SecondOrderForm = SecondOrderForm.DERIVED,
          tol: Optional[float] = None, fd: Optional[FdConfig] = None) -> MatchingReport:
    """Residuals plus verdict; ``tol`` defaults by whether FD derivatives were needed."""
    if tol is None:
        tol = TOL_FD if _uses_fd(p) else TOL_ANALYTIC
    if p.boundary is BoundaryKind.DIRICHLET:
        res = residuals_dirichlet(p, form, fd)
        verdict = classify(res, tol, p.boundary, form)
        return MatchingReport(p.boundary, tuple(res), tol, verdict, form)
    res = residuals_neumann(p, fd)
    return MatchingReport(p.boundary, tuple(res), tol, classify(res, tol, p.boundary))
