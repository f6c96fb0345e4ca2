# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled leapfrog kernels; same contracts as ``_kernels_py``."""

from libc.math cimport fabs, isnan


def leapfrog_step(const double[::1] u_prev, const double[::1] u_cur, const double[::1] src,
                  double nu2, bint left_neumann, double left_value, bint right_neumann,
                  double[::1] out):
    cdef Py_ssize_t n = u_cur.shape[0] - 1
    cdef Py_ssize_t j
    cdef double ghost
    for j in range(1, n):
        out[j] = (2.0 * u_cur[j] - u_prev[j]
                  + nu2 * (u_cur[j + 1] - 2.0 * u_cur[j] + u_cur[j - 1]) + src[j])
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
    return out.base if out.base is not None else out


def quadratic_energy(const double[::1] u_cur, const double[::1] u_next,
                     double dt, double dx, double a):
    cdef Py_ssize_t n = u_cur.shape[0]
    cdef Py_ssize_t j
    cdef double kin = 0.0, grad = 0.0, v, g, m0, m1
    m0 = 0.5 * (u_next[0] + u_cur[0])
    for j in range(n):
        v = (u_next[j] - u_cur[j]) / dt
        kin += v * v
        if j + 1 < n:
            m1 = 0.5 * (u_next[j + 1] + u_cur[j + 1])
            g = (m1 - m0) / dx
            grad += g * g
            m0 = m1
    return dx * (0.5 * kin + 0.5 * a * a * grad)


def max_abs(const double[::1] u):
    cdef Py_ssize_t j
    cdef double m = 0.0, v
    for j in range(u.shape[0]):
        if isnan(u[j]):
            return float("nan")
        v = fabs(u[j])
        if v > m:
            m = v
    return m
