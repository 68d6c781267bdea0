import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ernst_disk.theta import (
    NonPositiveImB, ThetaZeroDenominator, log_theta, theta, theta3_ratio,
    theta_ratio_reduced, truncation_order,
)
from ernst_disk.verify import brute_force_theta, theta_convergence_checks

B0 = 0.31 + 0.87j

real_parts = st.floats(-3, 3)
periods = st.builds(complex, st.floats(-1, 1), st.floats(0.3, 3))


@settings(max_examples=60, deadline=None)
@given(real_parts, st.floats(-1.5, 1.5), periods)
def test_matches_brute_force(x, y, B):
    v = complex(x, y * B.imag)
    ref = brute_force_theta(v, B)
    assert abs(theta(v, B) - ref) < 1e-14 * max(1.0, abs(ref))


@settings(max_examples=60, deadline=None)
@given(real_parts, st.floats(-2, 2), periods)
def test_parity_and_quasi_periodicity(x, y, B):
    v = complex(x, y)
    t = theta(v, B)
    assert abs(theta(-v, B) - t) <= 1e-14 * max(1.0, abs(t))
    assert abs(theta(v + 1, B) - t) <= 1e-14 * max(1.0, abs(t))
    shifted = theta(v + B, B) * cmath.exp(math.pi * 1j * B + 2j * math.pi * v)
    assert abs(shifted - t) <= 1e-13 * max(1.0, abs(t))


def test_vectorized_matches_scalar():
    v = np.array([0.1 + 0.2j, -0.7 + 0.05j, 2.5 - 1.1j])
    out = theta(v, B0)
    assert out.shape == v.shape
    for vi, oi in zip(v, out):
        assert oi == theta(complex(vi), B0)


def test_log_form_reassembles():
    v = 0.4 + 3.2j                      # far outside the fundamental cell
    logfac, th = log_theta(v, B0)
    assert abs(np.exp(logfac) * th - brute_force_theta(v, B0, 400)) < 1e-12 * abs(np.exp(logfac) * th)


def test_zero_of_theta_detected():
    # Theta vanishes at the half period (1 + B) / 2
    zero = 0.5 * (1 + B0)
    assert abs(theta(zero, B0)) < 1e-15
    with pytest.raises(ThetaZeroDenominator):
        theta_ratio_reduced(0.1, zero, B0)


def test_ratio_agrees_with_modular_representation():
    w1, w2 = 0.2 + 0.1j, -0.15 + 0.3j
    direct = theta(w1, B0) / theta(w2, B0)
    # Theta(w|B) = (-iB)**-1/2 exp(-pi i w**2 / B) theta_3(pi w / B; exp(-pi i / B))
    extra = -1j * math.pi * (w1 * w1 - w2 * w2) / B0
    assert abs(theta3_ratio(w1, w2, B0, extra) - direct) < 1e-13


def test_truncation_order_grows_as_imB_shrinks():
    assert truncation_order(0.2, 0.1) > truncation_order(2.0, 0.1)


@pytest.mark.parametrize("B", [0.3 - 0.2j, 1.0 + 0j])
def test_non_positive_period_rejected(B):
    with pytest.raises(NonPositiveImB):
        theta(0.1, B)


def test_convergence_checks_fail_for_the_conjugate_period():
    good = theta_convergence_checks(B0, "good")
    bad = theta_convergence_checks(B0.conjugate(), "bad")
    assert all(c.passed for c in good)
    assert not any(c.passed for c in bad)
