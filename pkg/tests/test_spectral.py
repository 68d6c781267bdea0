import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ernst_disk.spectral import (
    E_boundary, E_of_k, FG_boundary, FG_of_k, M_matrix, S_matrix, axis_data, axis_e2U,
    axis_f, d1_of_k, h_of_k, trace_MS,
)
from ernst_disk.surface import mu_upper

off_gamma = st.builds(complex, st.floats(0.05, 4.0), st.floats(-4.0, 4.0))


@settings(max_examples=25, deadline=None)
@given(off_gamma)
def test_trace_MS_vanishes(params, k):
    sv = FG_of_k(params, k, 1e-12)
    assert abs(trace_MS(params, k, sv.F, sv.G)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(off_gamma)
def test_conjugation_symmetry(params, k):
    a = FG_of_k(params, k, 1e-12)
    b = FG_of_k(params, k.conjugate(), 1e-12)
    assert abs(b.F - a.F.conjugate()) < 1e-10
    assert abs(b.G + a.G.conjugate()) < 1e-10


@pytest.mark.parametrize("k", [0.3 + 0.1j, -2 + 1j, 5j, -0.01 - 0.5j])
def test_sheets_invert_E(params, k):
    assert abs(E_of_k(params, k, 1) * E_of_k(params, k, -1) - 1) < 1e-12


@pytest.mark.parametrize("t", np.linspace(-0.9, 0.9, 7))
def test_jump_across_gamma(params, t):
    k = complex(0, t)
    left, right = FG_boundary(params, t, "left", 1e-12), FG_boundary(params, t, "right", 1e-12)
    S = S_matrix(params, k)
    assert np.max(np.abs(S @ M_matrix(left.F, left.G) + M_matrix(right.F, right.G) @ S)) < 1e-8
    d1 = d1_of_k(params, k)
    assert abs(abs(d1) - 1) < 1e-14
    assert abs(d1 * left.E + right.E / d1) < 1e-8


def test_boundary_value_is_the_limit(params):
    t, eps = 0.4, 1e-7
    inner = E_of_k(params, complex(eps, t), 1, 1e-13)
    assert abs(inner - E_boundary(params, t, "right", 1, 1e-13)) < 1e-5


def test_h_is_real_and_odd_on_gamma(params):
    t = np.linspace(-1, 1, 11)
    h = h_of_k(params, 1j * t)
    assert np.max(np.abs(h.imag)) == 0.0
    assert np.allclose(h, -h[::-1], atol=1e-16)


def test_F_tends_to_one(params):
    assert abs(FG_of_k(params, 1e4, 1e-12).F - 1) < 1e-3


@pytest.mark.parametrize("k", [1e4, 1e6, 1e9, -3e7j])
def test_d1_stable_at_large_k(params, k):
    # d1 ~ -i Omega c**2 / k: the product with k must stay finite and exact
    d1 = d1_of_k(params, k)
    mu = mu_upper(k, params)
    exact = 2j * params.omega * (-params.c ** 2) / (k + mu)
    assert abs(d1 - exact) <= 1e-15 * abs(exact)
    sv = FG_of_k(params, k, 1e-12)
    assert abs(trace_MS(params, k, sv.F, sv.G)) < 1e-10


def test_axis_anchor_and_far_field(params):
    h = 0.01
    c = np.array([-25, 48, -36, 16, -3]) / 12
    df = sum(ci * axis_f(params, j * h, 1e-12) for j, ci in enumerate(c)) / h
    assert abs(df - 0.6j) < 1e-6
    assert abs(axis_f(params, 1e3) - 1) < 1e-3


def test_axis_kprime_identity(params):
    for zeta in (0.5, 1.0, 2.0):
        ad = axis_data(params, zeta, 1e-12)
        assert ad.d.real == 0.0
        assert abs(ad.d + np.exp(-ad.Kprime)) < 1e-9


def test_axis_e2U_matches_re_f(params):
    for zeta in (0.0, 0.3, 2.0):
        assert abs(axis_e2U(params, zeta) - axis_f(params, zeta).real) < 1e-12


def test_lower_axis_is_mirror(params):
    for zeta in (0.2, 1.5):
        up, dn = axis_f(params, zeta, 1e-12), axis_f(params, -zeta, 1e-12)
        assert abs(dn - up.conjugate()) < 1e-10


def test_axis_data_rejects_negative_zeta(params):
    with pytest.raises(ValueError):
        axis_data(params, -1.0)


def test_frozen_axis_values(params):
    # computed by this implementation at tol 1e-12; guards against regressions
    assert abs(axis_f(params, 0.0, 1e-12) - (0.9180773820494035 - 0.39640121161433645j)) < 1e-10
    assert abs(axis_f(params, 1.0, 1e-12) - (0.9400610705726498 - 0.09013417796382442j)) < 1e-10
