"""Pure numpy leapfrog kernels (fallback backend)."""

import numpy as np


def leapfrog_step(u_prev, u_cur, src, nu2, left_neumann, left_value, right_neumann, out):
    """One explicit step of the three-point scheme, written into ``out``.

    ``src`` holds ``dt^2 * (f + F)`` at the current level.  At ``x = 0`` a
    Dirichlet condition assigns ``left_value`` to ``out[0]``; a Neumann
    condition uses the ghost value ``u_cur[1] - left_value`` (so
    ``left_value = 2 dx mu``).  At the far end a Neumann condition mirrors
    ``u_cur[nx - 1]``; a Dirichlet condition pins zero.
    """
    n = u_cur.shape[0] - 1
    out[1:n] = (2.0 * u_cur[1:n] - u_prev[1:n]
                + nu2 * (u_cur[2:] - 2.0 * u_cur[1:n] + u_cur[:n - 1]) + src[1:n])
    if left_neumann:
        ghost = u_cur[1] - left_value
        out[0] = 2.0 * u_cur[0] - u_prev[0] + nu2 * (u_cur[1] - 2.0 * u_cur[0] + ghost) + src[0]
    else:
        out[0] = left_value
    if right_neumann:
        ghost = u_cur[n - 1]
        out[n] = 2.0 * u_cur[n] - u_prev[n] + nu2 * (ghost - 2.0 * u_cur[n] + u_cur[n - 1]) + src[n]
    else:
        out[n] = 0.0
    return out


def quadratic_energy(u_cur, u_next, dt, dx, a):
    """Kinetic plus gradient part of the half-step discrete energy."""
    vel = (u_next - u_cur) / dt
    mid = 0.5 * (u_next + u_cur)
    grad = np.diff(mid) / dx
    return dx * (0.5 * np.dot(vel, vel) + 0.5 * a * a * np.dot(grad, grad))


def max_abs(u):
    """Largest magnitude; inf if any entry is infinite, nan if any is nan."""
    if np.isnan(u).any():
        return float("nan")
    return float(np.max(np.abs(u)))
