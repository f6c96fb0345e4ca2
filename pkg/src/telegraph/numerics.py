"""Finite-difference derivatives and adaptive Simpson quadrature."""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import MaxDepthExceeded

DEFAULT_H = {1: 1e-5, 2: 1e-4}


class Scheme(enum.Enum):
    CENTRAL = "central"
    FORWARD_ONE_SIDED = "forward"


@dataclass(frozen=True)
class FdConfig:
    """Step and stencil for finite differences.

    ``h=None`` picks 1e-5 for first and 1e-4 for second derivatives.
    """

    h: Optional[float] = None
    scheme: Scheme = Scheme.CENTRAL

    def __post_init__(self):
        if self.h is not None and not self.h > 0:
            raise ValueError(f"FD step must be positive, got {self.h}")

    def step(self, order: int) -> float:
        return self.h if self.h is not None else DEFAULT_H[order]


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    max_depth: int = 50

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")


def fd_derivative(fn: Callable[[float], float], x: float, order: int,
                  cfg: FdConfig = FdConfig()) -> float:
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    h = cfg.step(order)
    if cfg.scheme is Scheme.CENTRAL:
        if order == 1:
            return (fn(x + h) - fn(x - h)) / (2 * h)
        return (fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h)
    if order == 1:
        return (-3 * fn(x) + 4 * fn(x + h) - fn(x + 2 * h)) / (2 * h)
    return (2 * fn(x) - 5 * fn(x + h) + 4 * fn(x + 2 * h) - fn(x + 3 * h)) / (h * h)


def derivative(fn, x: float, order: int, cfg: Optional[FdConfig] = None) -> float:
    """Derivative of an arity-1 ScalarFn: the analytic handle if present, else FD.

    Without an explicit config the stencil is central, switching to the
    forward one-sided stencil when a central one would reach below zero.
    """
    handle = fn.derivative(0, order) if hasattr(fn, "derivative") else None
    if handle is not None:
        return handle(x)
    if cfg is None:
        h = DEFAULT_H[order]
        scheme = Scheme.CENTRAL if x - h >= 0 else Scheme.FORWARD_ONE_SIDED
        cfg = FdConfig(None, scheme)
    return fd_derivative(fn, x, order, cfg)


def has_analytic(fn, order: int) -> bool:
    return hasattr(fn, "derivative") and fn.derivative(0, order) is not None


def _simpson(h2: float, fa: float, fm: float, fb: float) -> float:
    # h2 = half the panel width
    return h2 / 3.0 * (fa + 4.0 * fm + fb)


_INITIAL_PANELS = 4
_EPS = 2.220446049250313e-16


def integrate(fn: Callable[[float], float], lo: float, hi: float,
              cfg: QuadConfig = QuadConfig()) -> float:
    """Globally adaptive Simpson quadrature of ``fn`` over ``[lo, hi]``.

    Panels are bisected worst-first until the summed error estimate
    ``|S_left + S_right - S_whole| / 15`` drops below ``rel_tol * |I|``.
    Raises MaxDepthExceeded (carrying the best estimate) if a panel that
    still needs refining is already ``max_depth`` bisections deep.
    """
    if not lo <= hi:
        raise ValueError(f"integration bounds out of order: {lo} > {hi}")
    if lo == hi:
        return 0.0

    # heap entries: (-err, seq, a, b, fa, fq1, fm, fq3, fb, s_left, s_right, depth)
    heap = []
    seq = 0
    total = 0.0
    err_total = 0.0
    abs_total = 0.0

    def panel(a, b, fa, fm, fb, depth):
        nonlocal seq, total, err_total, abs_total
        m = 0.5 * (a + b)
        q = 0.25 * (b - a)
        fq1 = fn(a + q)
        fq3 = fn(m + q)
        whole = _simpson(2 * q, fa, fm, fb)
        left = _simpson(q, fa, fq1, fm)
        right = _simpson(q, fm, fq3, fb)
        err = abs(left + right - whole) / 15.0
        total += left + right
        err_total += err
        abs_total += abs(left) + abs(right)
        heapq.heappush(heap, (-err, seq, a, b, fa, fq1, fm, fq3, fb, left, right, depth))
        seq += 1

    width = (hi - lo) / _INITIAL_PANELS
    xs = [lo + k * width for k in range(_INITIAL_PANELS)] + [hi]
    fx = [fn(x) for x in xs]
    for k in range(_INITIAL_PANELS):
        a, b = xs[k], xs[k + 1]
        panel(a, b, fx[k], fn(0.5 * (a + b)), fx[k + 1], 0)

    frozen = []
    while heap:
        tol = max(cfg.rel_tol * abs(total), 50 * _EPS * abs_total)
        if err_total <= tol:
            break
        entry = heapq.heappop(heap)
        neg_err, _, a, b, fa, fq1, fm, fq3, fb, left, right, depth = entry
        if depth >= cfg.max_depth:
            # keep its contribution, stop refining it
            frozen.append(entry)
            continue
        total -= left + right
        err_total -= -neg_err
        abs_total -= abs(left) + abs(right)
        m = 0.5 * (a + b)
        panel(a, m, fa, fq1, fm, depth + 1)
        panel(m, b, fm, fq3, fb, depth + 1)

    # recompute from the panels to shed accumulated rounding in the running sum
    result = math.fsum(e[9] + e[10] for e in heap + frozen)
    if frozen and err_total > max(cfg.rel_tol * abs(total), 50 * _EPS * abs_total):
        raise MaxDepthExceeded(result, err_total)
    return result


def potential(g: Callable[[float], float], z: float, cfg: QuadConfig = QuadConfig()) -> float:
    """Antiderivative of ``g`` vanishing at zero, by quadrature."""
    if z == 0:
        return 0.0
    if z > 0:
        return integrate(g, 0.0, z, cfg)
    return -integrate(g, z, 0.0, cfg)
