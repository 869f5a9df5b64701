"""Pure-Python versions of the compiled kernels (same signatures)."""
import math

import numpy as np


def integrate_segments(u0, p0, eps2, cubic, h, steps, jumps, u_out, pl_out, pr_out,
                       stop=0, escape=0.0):
    u, p = float(u0), float(p0)
    k = 0
    seen_neg = False
    status = 0
    u_out[0], pl_out[0], pr_out[0] = u, p, p
    for s in range(len(steps)):
        hs = float(h[s])
        half = 0.5 * hs
        for _ in range(int(steps[s])):
            k1u, k1p = p, eps2 * u - cubic * u * u * u
            a = u + half * k1u
            k2u, k2p = p + half * k1p, eps2 * a - cubic * a * a * a
            a = u + half * k2u
            k3u, k3p = p + half * k2p, eps2 * a - cubic * a * a * a
            a = u + hs * k3u
            k4u, k4p = p + hs * k3p, eps2 * a - cubic * a * a * a
            u = u + hs * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
            p = p + hs * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
            k += 1
            u_out[k] = u
            pl_out[k] = p
            pr_out[k] = p
            if math.isnan(u) or math.isnan(p):
                status = 4
                break
            if stop:
                if p < 0.0:
                    seen_neg = True
                if u < 0.0:
                    status = 1
                    break
                if seen_neg and p > 0.0:
                    status = 2
                    break
                if escape > 0.0 and abs(u) > escape:
                    status = 3
                    break
        if status:
            break
        p = p * jumps[s]
        pr_out[k] = p
    return status, k + 1


def _accel(u, w_edge, inv_mass, kappa, inv_dx2, nonlinear):
    flux = w_edge * np.diff(u)
    a = np.zeros_like(u)
    a[1:-1] = (flux[1:] - flux[:-1]) * inv_dx2 * inv_mass[1:-1] - kappa * u[1:-1]
    if nonlinear:
        a[1:-1] += u[1:-1] ** 3
    return a


def leapfrog(u, v, w_edge, inv_mass, kappa, dt, dx, nsteps, nonlinear=1):
    w_edge = np.asarray(w_edge)
    inv_mass = np.asarray(inv_mass)
    inv_dx2 = 1.0 / (dx * dx)
    a = _accel(u, w_edge, inv_mass, kappa, inv_dx2, nonlinear)
    for _ in range(int(nsteps)):
        v[1:-1] += 0.5 * dt * a[1:-1]
        u[1:-1] += dt * v[1:-1]
        a = _accel(u, w_edge, inv_mass, kappa, inv_dx2, nonlinear)
        v[1:-1] += 0.5 * dt * a[1:-1]
    return 0
