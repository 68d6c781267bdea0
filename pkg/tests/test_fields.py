import math
import warnings

import numpy as np
import pytest

from ernst_disk import (
    AxisBlendWarning, DiskParams, RimPoint, SolutionContext, axis_f, corotating, ernst_f,
    field_sample, metric_a, metric_e2U, metric_e2kappa,
)
from ernst_disk.fields import K0_constant, K0_deformed, L_reg, L_reg_deformed, corotating_b
from ernst_disk.surface import RHO_AXIS_FACTOR

# computed by this implementation at tol 1e-12
FROZEN = {
    (0.7, 0.4): (0.9108981641252298 - 0.14165770150541268j, 0.0796983542348193, 0.991594575021923),
    (0.5, 0.0): (0.8889330182963899 - 0.3461186053688721j, 0.09235368960304036, 0.9745539496183598),
    (2.0, 1.0): (0.9594847547638485 - 0.014625607711582533j, 0.054654963568624204, 0.9995708067780743),
}


@pytest.mark.parametrize("point", sorted(FROZEN))
def test_frozen_values(ctx, point):
    f, a, e2k = FROZEN[point]
    s = field_sample(ctx, *point)
    assert abs(s.f - f) < 1e-10
    assert abs(s.a - a) < 1e-9
    assert abs(s.e2kappa - e2k) < 1e-9
    assert s.err < 1e-9


def test_cross_formula(ctx):
    for r in (0.2, 0.9, 1.3):
        for z in (0.2, 1.1):
            zz = complex(r, z)
            assert abs(ernst_f(ctx, zz).real - metric_e2U(ctx, zz)) < 1e-8


def test_equatorial_symmetry(ctx):
    up, dn = field_sample(ctx, 0.6, 0.8), field_sample(ctx, 0.6, -0.8)
    assert dn.f == up.f.conjugate()
    assert (dn.e2U, dn.a, dn.e2kappa) == (up.e2U, up.a, up.e2kappa)


def test_b_vanishes_in_the_plane_outside_the_disk(ctx):
    # f is real on zeta = 0 beyond the rim, by reflection symmetry
    assert abs(field_sample(ctx, 1.5, 0.0).f.imag) < 1e-12


@pytest.mark.parametrize("point", [(1.0, 0.0), (1.0 + 1e-12, 0.0), (1.0, 1e-11)])
def test_rim_is_excluded(ctx, point):
    with pytest.raises(RimPoint):
        field_sample(ctx, *point)


def test_just_outside_rim_exclusion_is_evaluated(ctx):
    s = field_sample(ctx, 1.0 + 1e-9, 0.0, with_kappa=False)
    assert np.isfinite(s.f) and 0 < s.e2U < 1


def test_negative_rho_rejected(ctx):
    with pytest.raises(ValueError):
        field_sample(ctx, -0.1, 0.3)


def test_axis_branch(ctx, params):
    s = field_sample(ctx, 0.5 * RHO_AXIS_FACTOR, 0.7)
    assert s.f == axis_f(params, 0.7, ctx.tol)
    assert (s.a, s.e2kappa) == (0.0, 1.0)


def test_theta_branch_joins_axis(ctx, params):
    gaps = []
    for rho in (1e-2, 1e-3):
        with warnings.catch_warnings():
            warnings.simplefilter("error", AxisBlendWarning)
            gaps.append(abs(ernst_f(ctx, complex(rho, 1.0)) - axis_f(params, 1.0, ctx.tol)))
    # O(rho**2) approach: a factor 10 in rho gives a factor near 100
    assert 50 < gaps[0] / gaps[1] < 200


def test_metric_a_small_near_axis(ctx):
    assert abs(metric_a(ctx, complex(1e-3, 1.0))) < 1e-5


def test_e2kappa_tends_to_one_on_axis(ctx):
    assert abs(metric_e2kappa(ctx, complex(1e-3, 0.5)) - 1) < 1e-5


def test_lreg_independent_of_detour_side(ctx):
    z = complex(0.8, 0.6)
    left, right = L_reg_deformed(ctx, z, "left"), L_reg_deformed(ctx, z, "right")
    assert abs(left - right) < 1e-9
    assert abs(left - L_reg(ctx, z)) < 1e-9


def test_K0_independent_of_detour_side(params):
    k0 = K0_constant(params, 1e-12)
    assert abs(K0_deformed(params, "left") - K0_deformed(params, "right")) < 1e-9
    assert abs(K0_deformed(params, "left") - k0) < 1e-9


def test_flat_far_away(ctx):
    s = field_sample(ctx, 70.0, 70.0)
    assert abs(s.f - 1) < 1e-2 and abs(s.e2kappa - 1) < 1e-2


def test_corotating_norm_positive_near_disk(ctx):
    e2UO, aO = corotating(ctx, complex(0.5, 0.1))
    assert 0 < e2UO < 1 and np.isfinite(aO)


def test_corotating_b_rejects_plane(ctx):
    with pytest.raises(ValueError):
        corotating_b(ctx, 0.5, 0.0)


def test_degenerate_rotation_is_flat():
    ctx = SolutionContext(DiskParams(1.0, 1e-8), 1e-12)
    for r, z in [(0.5, 0.0), (0.7, 0.4), (2.0, 1.0)]:
        s = field_sample(ctx, r, z)
        assert abs(s.e2U - 1) < 1e-6
        assert abs(s.e2kappa - 1) < 1e-6
        # a is O(Omega rho**2) and sits below the cancellation floor
        assert abs(s.a) <= s.err
        assert s.err < 1e-3


def test_weak_rotation_is_newtonian():
    # 1 - e^{2U} scales like Omega**2 for slow rotation
    dev = []
    for om in (1e-2, 2e-2):
        ctx = SolutionContext(DiskParams(1.0, om), 1e-12)
        dev.append(1 - field_sample(ctx, 0.5, 0.5, with_kappa=False).e2U)
    assert math.isclose(dev[1] / dev[0], 4.0, rel_tol=0.05)
