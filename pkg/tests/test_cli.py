import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ernst_disk import cli
from ernst_disk.cli import (
    EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_IO, EXIT_NUMERIC, EXIT_OK, FIELD_COLUMNS, main,
)

BASE = ["--rho0", "1", "--omega", "0.3"]
SMALL = ["field", *BASE, "--grid", "3x3", "--rho-range", "0.4", "1.2", "--zeta-range", "-0.5", "0.5"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_field_csv_header_and_order(capsys):
    code, out, _ = run(capsys, SMALL)
    assert code == EXIT_OK
    assert out.splitlines()[0] == ",".join(FIELD_COLUMNS)
    recs = rows(out)
    got = [(float(r["rho"]), float(r["zeta"])) for r in recs]
    want = [(r, z) for z in (-0.5, 0.0, 0.5) for r in (0.4, 0.8, 1.2)]
    assert got == want
    for r in recs:
        assert abs(float(r["re_f"]) - float(r["e2U"])) < 1e-8


def test_lower_half_is_conjugate(capsys):
    recs = rows(run(capsys, SMALL)[1])
    by = {(float(r["rho"]), float(r["zeta"])): r for r in recs}
    for rho in (0.4, 0.8, 1.2):
        up, dn = by[(rho, 0.5)], by[(rho, -0.5)]
        assert float(dn["im_f"]) == -float(up["im_f"])
        assert dn["re_f"] == up["re_f"] and dn["a"] == up["a"]


def test_json_mirrors_csv(capsys):
    csv_recs = rows(run(capsys, SMALL)[1])
    js = json.loads(run(capsys, SMALL + ["--format", "json"])[1])
    assert len(js) == len(csv_recs)
    for a, b in zip(js, csv_recs):
        assert list(a) == list(FIELD_COLUMNS)
        for col in FIELD_COLUMNS:
            assert a[col] == float(b[col])


def test_output_bytes_are_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("ERNST_DISK_THREADS", "1")
    serial = run(capsys, SMALL)[1]
    monkeypatch.setenv("ERNST_DISK_THREADS", "4")
    threaded = run(capsys, SMALL)[1]
    assert serial == threaded


def test_rim_node_is_nudged(capsys):
    argv = ["field", *BASE, "--grid", "3x3", "--rho-range", "0", "2", "--zeta-range", "-1", "1"]
    with pytest.warns(UserWarning, match="rim"):
        code, out, _ = run(capsys, argv)
    assert code == EXIT_OK
    recs = rows(out)
    rim = recs[3 + 1]                      # second node of the middle row
    assert float(rim["rho"]) == 1 + cli.RIM_NUDGE and float(rim["zeta"]) == 0.0
    assert all(math.isfinite(float(v)) for v in rim.values())


def test_numeric_failure_gives_nan_row(capsys, monkeypatch):
    real = cli.field_sample

    def flaky(ctx, rho, zeta, *a, **kw):
        if rho == 0.8 and zeta == 0.0:
            raise ArithmeticError("synthetic")
        return real(ctx, rho, zeta, *a, **kw)

    monkeypatch.setattr(cli, "field_sample", flaky)
    code, out, err = run(capsys, SMALL + ["--format", "json"])
    assert code == EXIT_NUMERIC
    assert "rho=0.8" in err
    bad = [r for r in json.loads(out) if "note" in r]
    assert len(bad) == 1 and bad[0]["re_f"] is None


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, SMALL + ["--out", str(tmp_path / "missing" / "x.csv")])
    assert code == EXIT_IO and err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "f.csv"
    stdout = run(capsys, SMALL)[1]
    assert run(capsys, SMALL + ["--out", str(target)])[0] == EXIT_OK
    assert target.read_text() == stdout


@pytest.mark.parametrize("argv", [
    ["field", "--rho0", "1", "--omega", "0.5"],
    ["field", *BASE, "--grid", "1x5"],
    ["field", *BASE, "--grid", "ax5"],
    ["field", *BASE, "--rho-range", "2", "1"],
    ["field", *BASE, "--rho-range", "-1", "1"],
    ["axis", *BASE, "--n", "1"],
    ["spectral", *BASE, "--k", "0.5j"],
    ["field", *BASE, "--tol", "0"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run_exit(capsys, argv)
    assert code == EXIT_INVALID and err


def run_exit(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:           # argparse failures
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_bad_thread_variable(capsys, monkeypatch):
    monkeypatch.setenv("ERNST_DISK_THREADS", "zero")
    assert run_exit(capsys, SMALL)[0] == EXIT_INVALID


def test_axis_profile(capsys):
    code, out, _ = run(capsys, ["axis", *BASE, "--zeta-max", "2", "--n", "5", "--with-kprime"])
    assert code == EXIT_OK
    recs = rows(out)
    assert [float(r["zeta"]) for r in recs] == [0.0, 0.5, 1.0, 1.5, 2.0]
    for r in recs[1:]:
        assert float(r["kprime_residual"]) < 1e-9


def test_spectral_rows(capsys):
    code, out, _ = run(capsys, ["spectral", *BASE, "--k", "0.5+2j", "--k=-3+0.1j"])
    assert code == EXIT_OK
    recs = rows(out)
    assert [(float(r["re_k"]), float(r["im_k"])) for r in recs] == [(0.5, 2.0), (-3.0, 0.1)]
    assert all(float(r["trMS"]) < 1e-10 for r in recs)


def test_verify_fast(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, _, err = run(capsys, ["verify", *BASE, "--out", str(target)])
    assert code == EXIT_OK and "checks passed" in err
    assert all(r["passed"] for r in json.loads(target.read_text()))


def test_verify_failure_exit(capsys, monkeypatch):
    from ernst_disk import verify

    monkeypatch.setitem(verify.CHECKS, "branch_point",
                        (("fast",), lambda ctx: [verify.Check("forced", 1.0, 0.0, False)]))
    code, out, _ = run(capsys, ["verify", *BASE, "--quiet"])
    assert code == EXIT_CHECK_FAILED
    assert any(r["name"] == "forced" for r in json.loads(out))


def test_degenerate_grid_is_flat(capsys):
    argv = ["field", "--rho0", "1", "--omega", "1e-8", "--grid", "4x3",
            "--rho-range", "0", "3", "--zeta-range", "-2", "2", "--format", "json"]
    with pytest.warns(UserWarning, match="rim"):
        code, out, _ = run(capsys, argv)
    assert code == EXIT_OK
    for r in json.loads(out):
        assert abs(r["e2U"] - 1) < 1e-6 and abs(r["e2kappa"] - 1) < 1e-6
        assert abs(r["a"]) <= max(r["err"], 1e-12)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "ernst_disk.cli", "axis", *BASE, "--n", "2",
                           "--zeta-max", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("zeta,")


def test_axis_profile_derivative_at_disk_center(capsys):
    code, out, _ = run(capsys, ["axis", *BASE, "--zeta-max", "0.04", "--n", "5"])
    assert code == EXIT_OK
    recs = rows(out)
    c = [-25 / 12, 4, -3, 4 / 3, -1 / 4]          # one-sided 5-point stencil, h = 0.01
    d_re = sum(ci * float(r["re_f"]) for ci, r in zip(c, recs)) / 0.01
    d_im = sum(ci * float(r["im_f"]) for ci, r in zip(c, recs)) / 0.01
    assert abs(d_re) < 1e-6 and abs(d_im - 0.6) < 1e-6
