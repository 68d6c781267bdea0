import numpy as np
import pytest

from ernst_disk.surface import (
    DiskParams, InvalidParameters, SheetedPoint, ball_crossings, build_geometry, mu_upper,
)


def test_branch_point_is_exact(params):
    assert params.k1 == -5j / 3
    assert params.k1bar == 5j / 3
    assert params.a0 == -1 / 0.6


@pytest.mark.parametrize("rho0, omega", [(1.0, 0.5), (1.0, 0.7), (2.0, 0.25), (0.0, 0.1), (1.0, 0.0)])
def test_invalid_parameters(rho0, omega):
    with pytest.raises(InvalidParameters):
        DiskParams(rho0, omega)


def test_mu_squared_and_branch(params):
    k = np.array([0.3 + 0.2j, -4 + 1j, 10.0 + 0j, 1j])
    mu = mu_upper(k, params)
    assert np.allclose(mu * mu, k * k + params.c ** 2, rtol=1e-14)
    # the upper sheet behaves like +k at infinity
    assert abs(mu_upper(1e6 + 0j, params) / 1e6 - 1) < 1e-10


@pytest.mark.parametrize("z", [1 + 1j, 0.5 + 0.3j, 2 + 0j, 0.5 + 0j])
def test_a_period_normalized(params, z):
    g = build_geometry(params, z, 1e-13)
    a_period = 2 * g.A * g.integrate_a_path(lambda k: np.ones_like(k)).value
    assert abs(a_period - 1) < 1e-12
    assert g.B.imag > 0


def test_branch_points_and_cut_side(params):
    g = build_geometry(params, 1 + 1j)
    assert set(np.round(g.branch_points, 14)) >= {np.round(params.k1, 14), np.round(params.k1bar, 14)}
    k = 0.7 + 0.4j
    assert abs(g.y(k, 1) + g.y(k, -1)) < 1e-14 * abs(g.y(k, 1))
    assert abs(g.y(k) ** 2 - g.poly(k)) < 1e-12 * abs(g.poly(k))


def test_sheeted_point_requires_valid_sheet():
    with pytest.raises(ValueError):
        SheetedPoint(1j, 0)


def test_period_independent_of_tolerance(params):
    g1 = build_geometry(params, 0.8 + 0.6j, 1e-10)
    g2 = build_geometry(params, 0.8 + 0.6j, 1e-14)
    assert abs(g1.B - g2.B) < 1e-9


def test_holomorphic_differential_has_no_residue_at_infinity(params):
    # dk / y decays like k**-2, so a large circle gives zero
    g = build_geometry(params, 1 + 1j)
    t = np.linspace(0, 2 * np.pi, 4001)[:-1]
    R = 50.0
    k = R * np.exp(1j * t)
    val = np.mean(g.y(k, 1) ** -1 * 1j * k) * 2 * np.pi
    assert abs(val) < 1e-10


def test_ball_crossings():
    ts = ball_crossings(-2 + 0j, 2 + 0j, 1.0)
    assert np.allclose(sorted(ts), [0.25, 0.75])
    assert ball_crossings(5 + 0j, 6 + 0j, 1.0) == []
