import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from necklace.errors import SimulationError
from necklace.geometry import Geometry, Layout
from necklace.modes import solve_bvp
from necklace.simulate import (
    SimState,
    advance,
    energy,
    extrapolated_return_error,
    field_at,
    run_breather,
    step,
    synthesize_initial,
)

DX = math.pi / 100


@pytest.fixture(scope="module")
def stack():
    return solve_bvp(0.1, m_max=5, dx=DX)


def blank_state(n_cells=3, dx=math.pi / 20, eps=0.1):
    lay = Layout.build(Geometry(1), n_cells, dx)
    z = np.zeros(lay.n_nodes)
    return SimState(lay, z, z.copy(), 0.0, eps, 1)


def test_zero_state_stays_zero():
    s = advance(blank_state(), 0.01, 50)
    assert not s.u.any() and not s.v.any()
    assert s.t == pytest.approx(0.5)


def test_cfl_refused():
    s = blank_state()
    with pytest.raises(ValueError, match="CFL"):
        step(s, 0.6 * s.layout.dx)


def test_nan_guard():
    s = blank_state()
    u = np.full_like(s.u, 50.0)
    u[0] = u[-1] = 0.0
    with pytest.raises(SimulationError):
        advance(replace(s, u=u), 0.25 * s.layout.dx, 2000)


def test_step_matches_dense_verlet():
    s = blank_state(n_cells=1, dx=math.pi / 6)
    lay = s.layout
    n = lay.n_nodes
    A = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        A[:, j] = lay.laplacian(e)
    rng = np.random.default_rng(0)
    u0 = 0.1 * rng.standard_normal(n)
    v0 = 0.1 * rng.standard_normal(n)
    u0[[0, -1]] = v0[[0, -1]] = 0.0
    dt = 0.25 * lay.dx

    def acc(u):
        a = A @ u - s.kappa * u + u ** 3
        a[[0, -1]] = 0.0
        return a

    v_half = v0 + 0.5 * dt * acc(u0)
    u1 = u0 + dt * v_half
    v1 = v_half + 0.5 * dt * acc(u1)
    got = step(replace(s, u=u0, v=v0), dt)
    np.testing.assert_allclose(got.u, u1, atol=1e-14)
    np.testing.assert_allclose(got.v, v1, atol=1e-14)


def test_constant_field_matches_ode():
    s = blank_state(n_cells=6, dx=math.pi / 10)
    u0 = 0.3
    u = np.full_like(s.u, u0)
    u[[0, -1]] = 0.0
    T = s.period
    n = 20000
    end = advance(replace(s, u=u), T / n, n)
    ref = solve_ivp(lambda t, y: [y[1], -s.kappa * y[0] + y[0] ** 3], (0, T), [u0, 0.0], rtol=1e-12, atol=1e-14)
    mid = s.layout.n_nodes // 2
    assert abs(end.u[mid] - ref.y[0, -1]) < 1e-6
    assert abs(end.v[mid] - ref.y[1, -1]) < 1e-6


def test_linear_energy_drift_is_second_order():
    s = blank_state(n_cells=4, dx=math.pi / 40)
    x = s.layout.x()
    v = 0.05 / np.cosh(0.2 * x)
    v[[0, -1]] = 0.0
    s = replace(s, v=v)
    drifts = []
    for dt in (0.4 * s.layout.dx, 0.2 * s.layout.dx):
        n = round(4 * math.pi / dt)
        e0 = energy(s, nonlinear=False)
        cur, worst = s, 0.0
        for _ in range(10):
            cur = advance(cur, dt, n // 10, nonlinear=False)
            worst = max(worst, abs(energy(cur, nonlinear=False) - e0) / e0)
        drifts.append(worst)
    assert 3.0 <= drifts[0] / drifts[1] <= 5.0


def test_synthesis_single_mode():
    st1 = solve_bvp(0.1, m_max=1, dx=DX)
    s = synthesize_initial(st1, margin_cells=2)
    assert not s.u.any()
    inner = s.layout.embed(st1.mode(1), st1.layout)
    np.testing.assert_allclose(s.v, -2 * st1.omega * inner)


def test_quarter_period_synthesis(stack):
    # sin(m pi / 2) = +1, -1, +1 for m = 1, 3, 5
    s1, s3, s5 = stack.sine_coefficients()
    u = field_at(stack, math.pi / (2 * stack.omega))
    np.testing.assert_allclose(u, -2 * s1 + 2 * s3 - 2 * s5, atol=1e-15)


def test_breather_returns(stack):
    diag = run_breather(stack, dt=0.25 * DX, n_periods=1)
    assert diag.period == pytest.approx(4 * math.pi)
    assert np.isfinite(diag.rho[0]) and diag.rho[0] < 1e-4
    assert diag.tail[1] <= 10 * diag.tail[0]
    assert not diag.warnings


def test_refinement_reduces_return_error():
    rho = []
    for dx in (math.pi / 50, math.pi / 100):
        st = solve_bvp(0.1, m_max=5, dx=dx)
        rho.append(run_breather(st, dt=0.25 * dx).rho[0])
    assert rho[0] / rho[1] >= 3


def test_wrong_sign_has_same_return_error(stack):
    a = run_breather(stack, dt=0.25 * DX).rho[0]
    b = run_breather(stack, dt=0.25 * DX, sign=-1).rho[0]
    assert b == pytest.approx(a, rel=0.05)


def test_extrapolation_removes_time_error(stack):
    r = extrapolated_return_error(stack, n_quarter=400)
    assert r["rho_dt"] / r["rho_half_dt"] == pytest.approx(4, rel=0.1)
    assert r["rho"] < 0.2 * r["rho_half_dt"]
