# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: segment-wise RK4 with vertex jumps, leapfrog stepping."""
from libc.math cimport fabs, isnan


cdef inline void _rhs(double u, double p, double eps2, double cubic,
                      double* du, double* dp) nogil:
    du[0] = p
    dp[0] = eps2 * u - cubic * u * u * u


def integrate_segments(double u0, double p0, double eps2, double cubic,
                       const double[:] h, const long[:] steps, const double[:] jumps,
                       double[:] u_out, double[:] pl_out, double[:] pr_out,
                       int stop=0, double escape=0.0):
    cdef Py_ssize_t nseg = steps.shape[0]
    cdef Py_ssize_t s, j, k = 0
    cdef double u = u0, p = p0, hs, k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p
    cdef int seen_neg = 0, status = 0
    u_out[0] = u
    pl_out[0] = p
    pr_out[0] = p
    with nogil:
        for s in range(nseg):
            hs = h[s]
            for j in range(steps[s]):
                _rhs(u, p, eps2, cubic, &k1u, &k1p)
                _rhs(u + 0.5 * hs * k1u, p + 0.5 * hs * k1p, eps2, cubic, &k2u, &k2p)
                _rhs(u + 0.5 * hs * k2u, p + 0.5 * hs * k2p, eps2, cubic, &k3u, &k3p)
                _rhs(u + hs * k3u, p + hs * k3p, eps2, cubic, &k4u, &k4p)
                u = u + hs * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
                p = p + hs * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
                k += 1
                u_out[k] = u
                pl_out[k] = p
                pr_out[k] = p
                if isnan(u) or isnan(p):
                    status = 4
                    break
                if stop:
                    if p < 0.0:
                        seen_neg = 1
                    if u < 0.0:
                        status = 1
                        break
                    if seen_neg and p > 0.0:
                        status = 2
                        break
                    if escape > 0.0 and fabs(u) > escape:
                        status = 3
                        break
            if status:
                break
            p = p * jumps[s]
            pr_out[k] = p
    return status, k + 1


def leapfrog(double[:] u, double[:] v, const double[:] w_edge, const double[:] inv_mass,
             double kappa, double dt, double dx, long nsteps, int nonlinear=1):
    """Stormer-Verlet steps in place; end nodes are clamped to zero."""
    cdef Py_ssize_t n = u.shape[0], i
    cdef long it
    cdef double hdt = 0.5 * dt, inv_dx2 = 1.0 / (dx * dx), ui, acc
    cdef double[::1] a
    import numpy as np
    a = np.zeros(n)
    with nogil:
        for i in range(1, n - 1):
            ui = u[i]
            acc = (w_edge[i] * (u[i + 1] - ui) + w_edge[i - 1] * (u[i - 1] - ui)) * inv_dx2 * inv_mass[i] - kappa * ui
            if nonlinear:
                acc = acc + ui * ui * ui
            a[i] = acc
        for it in range(nsteps):
            for i in range(1, n - 1):
                v[i] = v[i] + hdt * a[i]
                u[i] = u[i] + dt * v[i]
            for i in range(1, n - 1):
                ui = u[i]
                acc = (w_edge[i] * (u[i + 1] - ui) + w_edge[i - 1] * (u[i - 1] - ui)) * inv_dx2 * inv_mass[i] - kappa * ui
                if nonlinear:
                    acc = acc + ui * ui * ui
                a[i] = acc
                v[i] = v[i] + hdt * acc
    return 0
