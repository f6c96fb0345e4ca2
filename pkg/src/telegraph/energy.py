"""Negative-energy nonexistence criterion.

With ``F = 0``, ``mu = 0`` and ``f(t, x, z) = -g(z)`` where ``g(0) = 0``,
a classical solution cannot exist on the whole quarter plane when the
initial energy

    E0 = int_0^X  psi^2/2 + a^2 phi'^2/2 + G(phi)  dx,   G(z) = int_0^z g,

is negative and ``z g(z) <= lambda G(z)`` for all real ``z``.  The sign
condition is only ever checked on a finite sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import numerics
from .numerics import QuadConfig
from .problem import BoundaryKind, MixedProblem, ScalarFn, zero

CRITERION = "negative-energy blow-up criterion"
STRUCTURAL_TOL = 1e-12
SIGN_TOL = 1e-10

ENERGY_FORM_NOTE = (
    "E0 integrates psi^2/2 + a^2*phi'^2/2 + G(phi), i.e. the energy functional "
    "evaluated at t=0 (u_t = psi, u_x = phi'); the variant phi'^2/2 + a^2*psi^2/2 "
    "differs when a != 1 and is not used"
)
SAMPLING_NOTE = "sign condition checked on a finite sample only; not a proof for all z"


def minus(g: ScalarFn) -> ScalarFn:
    """The arity-3 nonlinearity ``f(t, x, z) = -g(z)``."""
    vec = None
    if g.vectorized is not None:
        vec = lambda t, x, z: -g.vectorized(z)  # noqa: E731
    return ScalarFn(lambda t, x, z: -g(z), 3, vectorized=vec, name=f"-({g.label})")


@dataclass(frozen=True)
class EnergyProblem:
    base: MixedProblem
    g: ScalarFn
    support_bound: float

    def __post_init__(self):
        if not self.support_bound > 0:
            raise ValueError(f"support bound must be positive, got {self.support_bound}")
        if self.g.arity != 1:
            raise ValueError("g must have arity 1")

    @classmethod
    def build(cls, a: float, g: ScalarFn, phi: ScalarFn, psi: Optional[ScalarFn] = None,
              support_bound: float = 1.0,
              boundary: BoundaryKind = BoundaryKind.DIRICHLET) -> "EnergyProblem":
        base = MixedProblem(a, minus(g), zero(2), phi, psi or zero(1), zero(1), boundary)
        return cls(base, g, float(support_bound))


@dataclass(frozen=True)
class CertificateOfNonexistence:
    text: str

    def __str__(self):
        return "CertificateOfNonexistence"


@dataclass(frozen=True)
class CriteriaNotMet:
    reasons: tuple

    def __str__(self):
        return "CriteriaNotMet"


@dataclass(frozen=True)
class BlowupReport:
    E0: float
    lam: float
    z_range: tuple
    samples: int
    sign_violations: tuple
    structural: dict
    verdict: object
    notes: tuple = field(default=())

    @property
    def structural_ok(self) -> bool:
        return all(self.structural.values())


def structural_checks(ep: EnergyProblem, n: int = 41) -> dict:
    """Sampled checks that the problem has the required shape."""
    p, X = ep.base, ep.support_bound
    ts = np.linspace(0.0, 2.0 * X / p.a, n)
    xs = np.linspace(0.0, X, n)
    zs = np.linspace(-2.0, 2.0, 17)
    outside = np.linspace(X, 3.0 * X, n)

    def small(values, scale=1.0):
        return bool(np.all(np.abs(values) <= STRUCTURAL_TOL * scale))

    g_z = np.array([ep.g(z) for z in zs])
    f_dev = [p.f(t, x, z) + gz for t in ts[::10] for x in xs[::10] for z, gz in zip(zs, g_z)]
    return {
        "g_vanishes_at_zero": small([ep.g(0.0)]),
        "f_is_minus_g": small(f_dev, 1.0 + float(np.max(np.abs(g_z)))),
        "F_vanishes": small([p.F(t, x) for t in ts[::4] for x in xs[::4]]),
        "mu_vanishes": small([p.mu(t) for t in ts]),
        "phi_supported": small([p.phi(x) for x in outside]),
        "psi_supported": small([p.psi(x) for x in outside]),
    }


def initial_energy(ep: EnergyProblem, quad: QuadConfig = QuadConfig()) -> float:
    p = ep.base
    a2 = p.a * p.a

    def density(x):
        phi = p.phi(x)
        dphi = numerics.derivative(p.phi, x, 1)
        psi = p.psi(x)
        return 0.5 * (psi * psi + a2 * dphi * dphi) + numerics.potential(ep.g, phi, quad)

    return numerics.integrate(density, 0.0, ep.support_bound, quad)


def sign_condition(g: ScalarFn, lam: float, z_lo: float, z_hi: float, n: int,
                   quad: QuadConfig = QuadConfig()) -> list:
    """Sampled points where ``z g(z) > lam G(z)`` beyond a relative 1e-10 slack."""
    if n < 2 or not z_lo < z_hi:
        raise ValueError("need n >= 2 and z_lo < z_hi")
    out = []
    for z in np.linspace(z_lo, z_hi, n):
        z = float(z)
        lam_G = lam * numerics.potential(g, z, quad)
        gap = z * g(z) - lam_G
        if gap > SIGN_TOL * (1.0 + abs(lam_G)):
            out.append((z, gap))
    return out


def blowup_certificate(ep: EnergyProblem, lam: float, samples: int = 201,
                       quad: QuadConfig = QuadConfig(), z_range: Optional[tuple] = None,
                       structural_samples: int = 41) -> BlowupReport:
    structural = structural_checks(ep, structural_samples)
    if z_range is None:
        xs = np.linspace(0.0, ep.support_bound, 2001)
        amp = max(abs(ep.base.phi(float(x))) for x in xs)
        span = 1.5 * amp if amp > 0 else 1.0
        z_range = (-span, span)
    violations = sign_condition(ep.g, lam, z_range[0], z_range[1], samples, quad)
    E0 = initial_energy(ep, quad)

    reasons = [f"structural check failed: {k}" for k, ok in structural.items() if not ok]
    if violations:
        reasons.append(f"sign condition z*g(z) <= lambda*G(z) violated at {len(violations)} sampled z")
    if not E0 < 0:
        reasons.append(f"E0 = {E0:.6g} is not negative")
    if reasons:
        verdict = CriteriaNotMet(tuple(reasons))
    else:
        verdict = CertificateOfNonexistence(
            f"E0 = {E0:.6g} < 0, structural checks pass on samples and "
            f"z*g(z) <= {lam:g}*G(z) on {samples} samples of [{z_range[0]:.6g}, {z_range[1]:.6g}]; "
            f"by the {CRITERION} the problem has no classical solution on the closed quarter plane"
        )
    notes = (
        ENERGY_FORM_NOTE,
        SAMPLING_NOTE,
        f"boundary kind {ep.base.boundary.value} with mu = 0; the criterion is applied to either kind",
        "no admissible range for lambda is enforced",
    )
    return BlowupReport(E0, lam, tuple(z_range), samples, tuple(violations), structural, verdict, notes)
