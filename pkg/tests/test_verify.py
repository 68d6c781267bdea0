import dataclasses
import json
import math

import numpy as np
import pytest

from ernst_disk import DiskParams, SolutionContext, VerificationReport, recover_m1, run_suite
from ernst_disk.verify import (
    CHECKS, UNDEFINED_MEASURE, Check, b_cycle_detour, brute_force_theta, m1_along_path,
    run_checks,
)


@pytest.fixture(scope="module")
def fast_report(ctx):
    return run_suite(ctx, "fast")


def test_fast_suite_passes(fast_report):
    assert fast_report.passed, [c.name for c in fast_report.failed()]


def test_report_json_schema(fast_report):
    records = json.loads(fast_report.to_json())
    assert isinstance(records, list) and records
    names = [r["name"] for r in records]
    assert names == sorted(names) and len(set(names)) == len(names)
    for r in records:
        assert set(r) == {"name", "measured", "tolerance", "passed"}
        assert isinstance(r["passed"], bool)
        assert math.isfinite(r["measured"]) and math.isfinite(r["tolerance"])


def test_fast_report_is_reproducible(ctx, fast_report):
    again = run_suite(SolutionContext(ctx.params, ctx.tol), "fast")
    assert again.to_json() == fast_report.to_json()


def test_thread_count_does_not_change_report(ctx, fast_report):
    assert run_suite(ctx, "fast", threads=3).to_json() == fast_report.to_json()


def test_unknown_level(ctx):
    with pytest.raises(ValueError):
        run_suite(ctx, "medium")


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        VerificationReport([Check("x", 0, 1, True), Check("x", 0, 1, True)], {}, "")


def test_non_finite_measure_fails():
    c = Check.below("x", float("nan"), 1.0)
    assert not c.passed and c.measured == UNDEFINED_MEASURE


def test_group_that_raises_is_reported(ctx, monkeypatch):
    def boom(ctx):
        raise ZeroDivisionError("synthetic")

    monkeypatch.setitem(CHECKS, "branch_point", (("fast",), boom))
    (c,) = run_checks(ctx, ["branch_point"])
    assert c.name == "branch_point_raised_ZeroDivisionError" and not c.passed


def test_brute_force_oracle_is_independent():
    # direct sum against the product formula of theta_3 at v = 0
    B = 1.3j
    q = math.exp(-math.pi * 1.3)
    prod = np.prod([(1 - q ** (2 * n)) * (1 + q ** (2 * n - 1)) ** 2 for n in range(1, 60)])
    assert abs(brute_force_theta(0.0, B) - prod) < 1e-15


def test_m1_witness(ctx):
    w = recover_m1(ctx, 1 + 1j)
    assert w.abel_residual < 1e-7 and w.logf_residual < 1e-6


def test_b_cycle_detour_winds_once(ctx):
    z = 1 + 1j
    w = recover_m1(ctx, z)
    g = ctx.point(z).geom
    wd = m1_along_path(ctx, z, w, b_cycle_detour(g, w.m1))
    assert abs(wd.winding - w.winding) == 1 and wd.sheet == w.sheet
    assert wd.logf_residual < 1e-6


def test_corrupted_period_is_detected(params):
    ctx = SolutionContext(params, 1e-12)
    d = ctx.point(1 + 1j)
    d.geom = dataclasses.replace(d.geom, B=d.geom.B + 0.05j)
    checks = {c.name: c for c in run_checks(ctx, ["m1"])}
    assert not checks["m1_logf_residual_z=1,1"].passed
    assert checks["m1_logf_residual_z=2,0.7"].passed


@pytest.mark.parametrize("omega", [1e-2])
def test_weak_rotation_full_suite(omega):
    report = run_suite(SolutionContext(DiskParams(1.0, omega), 1e-12), "full")
    assert report.passed, [(c.name, c.measured) for c in report.failed()]


def test_near_static_full_suite():
    # Known failure: near the static limit a and the rim slope of e^{2U} drop
    # below the rounding floor of the a0 cancellation.  Kept as a real
    # expectation; see the README section on limitations.
    report = run_suite(SolutionContext(DiskParams(1.0, 1e-8), 1e-12), "full")
    assert report.passed, [(c.name, c.measured) for c in report.failed()]
