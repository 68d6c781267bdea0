"""Acceptance criteria at the reference configuration rho0 = 1, Omega = 0.3.

Each test prints one ``criterion N: PASS|FAIL`` line with the worst measured
value and then asserts it.  The suite checks carry the tolerances; criterion
14 reruns the full suite from a fresh context and compares the JSON reports.
"""

import pytest

from ernst_disk import DiskParams, SolutionContext, run_suite

CRITERIA = {
    1: ("branch point k1 = -5i/3", ["branch_point_k1"]),
    2: ("axis Neumann anchor d/dzeta f(+i0) = 0.6i", ["axis_neumann_anchor"]),
    3: ("disk Neumann condition", ["disk_neumann_rho=0.2", "disk_neumann_rho=0.5",
                                   "disk_neumann_rho=0.8"]),
    4: ("Ernst equation residual", ["ernst_pde_residual"]),
    5: ("cross-formula Re f = e^{2U}", ["cross_formula_re_f_e2U"]),
    6: ("metric relations for a_z and kappa_z", ["metric_relation_a_z", "metric_relation_kappa_z"]),
    7: ("axis limits of a and e^{2 kappa}", ["axis_limit_a_ratio", "axis_limit_e2kappa_ratio"]),
    8: ("theta branch meets axis branch", ["axis_limit_f_ratio"]),
    9: ("spectral identities", ["spectral_trace_MS", "spectral_jump_M", "spectral_jump_E",
                                "spectral_E_sheet_product", "spectral_d1_unimodular"]),
    10: ("d + exp(-K') = 0 on the axis", ["axis_kprime_identity"]),
    11: ("theta oracle", ["theta_brute_force", "theta_parity", "theta_periodicity",
                          "theta_quasi_periodicity"]),
    12: ("Lreg and K0 side independence", ["lreg_side_independence", "k0_side_independence",
                                           "axis_e2kappa_unity"]),
    13: ("Jacobi inversion oracle", ["m1_abel_residual_z=1,1", "m1_abel_residual_z=0.5,0.3",
                                     "m1_abel_residual_z=2,0.7", "m1_logf_residual_z=1,1",
                                     "m1_logf_residual_z=0.5,0.3", "m1_logf_residual_z=2,0.7"]),
}


@pytest.fixture(scope="module")
def params():
    return DiskParams(1.0, 0.3)


@pytest.fixture(scope="module")
def report(params):
    return run_suite(SolutionContext(params, 1e-12), "full")


def _announce(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(report, capsys, number):
    title, names = CRITERIA[number]
    checks = {c.name: c for c in report.checks}
    missing = [n for n in names if n not in checks]
    picked = [checks[n] for n in names if n in checks]
    ok = not missing and all(c.passed for c in picked)
    worst = max(picked, key=lambda c: c.measured / c.tolerance if c.tolerance else c.measured)
    detail = f"worst {worst.name} = {worst.measured:.3e} vs {worst.tolerance:.1e}"
    if missing:
        detail = f"missing checks {missing}"
    _announce(capsys, number, title, ok, detail)
    assert ok, detail


def test_criterion_14_determinism(report, params, capsys):
    again = run_suite(SolutionContext(params, 1e-12), "full")
    ok = again.to_json() == report.to_json()
    _announce(capsys, 14, "repeated full runs give identical JSON", ok,
              f"{len(report.checks)} checks compared")
    assert ok
