import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ernst_disk.quadrature import (
    Contour, InvalidContour, NonConvergence, integrate, integrate_arc,
    integrate_log_endpoint, integrate_pv, integrate_ray, panel_rule,
)


def test_polynomial_is_exact_on_a_bent_path():
    # k**3 has antiderivative k**4 / 4, path independent
    r = integrate(lambda k: k**3, [0, 1 + 2j, -1 + 1j])
    assert abs(r.value - (-1 + 1j) ** 4 / 4) < 1e-14


def test_inverse_sqrt_endpoint_needs_grading():
    r = integrate(lambda k: 1 / np.sqrt(k), [0, 1], 1e-13, singular=(0,))
    assert abs(r.value - 2) < 1e-12


def test_log_endpoints():
    # singular at both ends; each end is written so that it is exact at 0
    head = integrate_log_endpoint(lambda k: np.log(k), [0, 1], 1e-13)
    tail = integrate_log_endpoint(lambda k: np.log(-k), [-1, 0], 1e-13)
    assert abs(head.value + 1) < 1e-12
    assert abs(tail.value + 1) < 1e-12


def test_ray_tail_without_truncation():
    # int_1^inf dk / k**2 = 1
    r = integrate_ray(lambda k: 1 / k**2, 1.0, 1.0, 1e-13)
    assert abs(r.value - 1) < 1e-12


def test_full_circle_gives_residue():
    r = integrate_arc(lambda k: 1 / (k - 0.1j), 0.0, 1.0, 0.0, 2 * math.pi, 1e-13)
    assert abs(r.value - 2j * math.pi) < 1e-12


def test_principal_value_of_a_simple_pole():
    # PV int_{-1}^{2} dk / k = log 2
    r = integrate_pv(lambda k: 1 / k, [-1, 2], 0.0, 1e-12)
    assert abs(r.value - math.log(2)) < 1e-10


def test_degenerate_contour_rejected():
    with pytest.raises(InvalidContour):
        integrate(lambda k: k, [1 + 1j, 1 + 1j])


def test_budget_exhaustion_raises():
    with pytest.raises(NonConvergence):
        integrate(lambda k: np.sin(1e4 * k), [0, 1], 1e-14, max_evals=100)


def test_error_estimate_is_honest():
    r = integrate(lambda k: np.exp(k), [0, 1j], 1e-10)
    assert abs(r.value - (np.exp(1j) - 1)) <= max(r.error_estimate, 1e-15)


def test_panel_rule_reuses_the_adapted_panels():
    f = lambda k: 1 / np.sqrt(k)
    nodes, weights = panel_rule(f, [0, 1], 1e-12, singular=(0,))
    # same singular structure, different smooth factor
    approx = np.sum(weights * np.cos(nodes) / np.sqrt(nodes))
    exact = integrate(lambda k: np.cos(k) / np.sqrt(k), [0, 1], 1e-14, singular=(0,)).value
    assert abs(approx - exact) < 1e-10


def test_contour_reversal_negates():
    c = Contour.of([0, 1j, 2])
    r1 = integrate(lambda k: np.exp(-k * k), c)
    r2 = integrate(lambda k: np.exp(-k * k), c.reversed())
    assert abs(r1.value + r2.value) < 1e-13


points = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(points, points, points)
def test_entire_integrand_is_path_independent(a, b, via):
    if min(abs(a - b), abs(a - via), abs(via - b)) < 1e-6:
        return
    f = lambda k: np.exp(k) * np.cos(k)
    direct = integrate(f, [a, b], 1e-11).value
    bent = integrate(f, [a, via, b], 1e-11).value
    assert abs(direct - bent) < 1e-9 * max(1.0, abs(direct))
