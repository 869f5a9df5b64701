import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from necklace.floquet import (
    BAND,
    EDGE,
    GAP_NEGATIVE,
    GAP_POSITIVE,
    classify,
    classify_trace,
    floquet_exponent,
    monodromy,
    monodromy_by_integration,
    trace_derivative,
    trace_formula,
    trace_of_lambda,
    transfer,
)
from necklace.geometry import Geometry

mp.mp.dps = 40


def mp_transfer(s, lam):
    s, lam = mp.mpf(s), mp.mpf(lam)
    if lam > 0:
        w = mp.sqrt(lam)
        return mp.matrix([[mp.cos(w * s), mp.sin(w * s) / w], [-w * mp.sin(w * s), mp.cos(w * s)]])
    if lam < 0:
        k = mp.sqrt(-lam)
        return mp.matrix([[mp.cosh(k * s), mp.sinh(k * s) / k], [k * mp.sinh(k * s), mp.cosh(k * s)]])
    return mp.matrix([[1, s], [0, 1]])


def mp_trace(lam, l):
    """Independent product of link flow, derivative halving, semicircle flow, doubling."""
    L = l * mp.pi
    M = mp.diag([1, 2]) * mp_transfer(mp.pi, lam) * mp.diag([1, mp.mpf(1) / 2]) * mp_transfer(L, lam)
    return M[0, 0] + M[1, 1]


@pytest.mark.parametrize("lam", [-3.0, -1e-9, 0.0, 1e-9, 0.7, 2.0, 37.5])
def test_transfer_matches_mpmath(lam):
    ref = mp_transfer(1.3, lam)
    got = transfer(1.3, lam)
    for i in range(2):
        for j in range(2):
            assert got[i, j] == pytest.approx(float(ref[i, j]), rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("lam", [-10.0, -0.5, 0.0, 0.25, 2.0, 6.0, 55.0, 99.0])
def test_trace_matches_high_precision_product(l, lam):
    ref = float(mp_trace(lam, l))
    g = Geometry(l)
    assert monodromy(lam, g).trace == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert trace_of_lambda(lam, g) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(-10, 100), st.floats(0, 1, exclude_max=True), st.sampled_from([1, 3]))
def test_determinant_and_base_point(lam, frac, l):
    g = Geometry(l)
    M0 = monodromy(lam, g)
    Mb = monodromy(lam, g, base=frac * g.P)
    scale = np.abs(M0.matrix).max() ** 2
    assert abs(M0.det - 1) <= 1e-12 * max(1.0, scale)
    assert abs(Mb.trace - M0.trace) <= 1e-12 * max(1.0, abs(M0.trace))


@pytest.mark.parametrize("lam", [-4.0, 0.0, 1.5, 20.0])
def test_integrated_monodromy(lam):
    g = Geometry(1)
    A = monodromy(lam, g).matrix
    B = monodromy_by_integration(lam, g, h=1e-3).matrix
    np.testing.assert_allclose(B, A, atol=1e-8 * max(1.0, np.abs(A).max()))


def test_integration_step_must_be_positive():
    with pytest.raises(ValueError):
        monodromy_by_integration(1.0, Geometry(1), h=0.0)


def test_trace_formula_agrees_with_lambda_form():
    g = Geometry(1)
    for w in np.linspace(0, 7, 71):
        assert trace_formula(w, g) == pytest.approx(trace_of_lambda(w * w, g), abs=1e-13)


def test_trace_derivative_against_finite_difference():
    g = Geometry(1)
    for lam in (-2.0, -1e-3, 0.0, 1e-3, 0.9, 12.0):
        h = 1e-6
        fd = (trace_of_lambda(lam + h, g) - trace_of_lambda(lam - h, g)) / (2 * h)
        assert trace_derivative(lam, g) == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_small_lambda_branch_is_continuous():
    g = Geometry(1)
    lams = np.array([-1e-6, -1e-9, 0.0, 1e-9, 1e-6])
    tr = [monodromy(x, g).trace for x in lams]
    assert np.all(np.abs(np.diff(tr)) < 1e-4)


def test_classification_cases():
    assert classify_trace(2.0).case == EDGE
    assert classify_trace(-2.0 + 1e-12).case == EDGE
    assert classify_trace(0.3).case == BAND
    assert classify_trace(3.0).case == GAP_POSITIVE
    assert classify_trace(-2.5).case == GAP_NEGATIVE
    c = classify_trace(-2.5, period=2 * math.pi)
    assert c.exponent == pytest.approx(math.acosh(1.25) / (2 * math.pi))
    mu1, mu2 = c.multipliers
    assert abs(mu1 * mu2 - 1) < 1e-12


def test_classify_rejects_bad_determinant():
    M = monodromy(1.0, Geometry(1))
    M.matrix[0, 0] += 1e-3
    with pytest.raises(ValueError):
        classify(M)


def test_floquet_exponent_in_gap_and_band():
    g = Geometry(1)
    eps = 0.05
    tr = trace_of_lambda(-eps * eps, g)
    assert floquet_exponent(-eps * eps, g) == pytest.approx(math.acosh(tr / 2) / g.P)
    assert floquet_exponent(0.5, g) == 0.0
    # homogenised line: both arcs add mass 2 pi, in parallel they conduct like length pi / 2
    rate = eps * math.sqrt((g.L + 2 * math.pi) * (g.L + math.pi / 2)) / g.P
    assert floquet_exponent(-eps * eps, g) == pytest.approx(rate, rel=2e-3)
