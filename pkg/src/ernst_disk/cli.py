"""Command-line driver: field grids, axis profiles, spectral data and the check suite.

Exit codes
----------
0   success
1   at least one verification check failed
2   output could not be written
3   numeric failure at one or more points (the run still completes)
4   invalid parameters or arguments
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .fields import RIM_EXCLUSION, SolutionContext, field_sample
from .quadrature import DEFAULT_TOL, NonConvergence
from .spectral import FG_of_k, axis_data, axis_f, axis_e2U, trace_MS
from .surface import DiskParams, InvalidParameters
from .verify import DEFAULT_SEED, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_IO = 2
EXIT_NUMERIC = 3
EXIT_INVALID = 4

FIELD_COLUMNS = ("rho", "zeta", "re_f", "im_f", "e2U", "a", "e2kappa", "err")
AXIS_COLUMNS = ("zeta", "re_f", "im_f", "e2U", "Jprime", "im_d")
KPRIME_COLUMNS = ("re_kprime", "im_kprime", "kprime_residual")
SPECTRAL_COLUMNS = ("re_k", "im_k", "re_F", "im_F", "re_G", "im_G", "re_E", "im_E",
                    "re_d1", "im_d1", "trMS")

#: Relative outward shift applied to grid nodes that hit the rim exactly.
RIM_NUDGE = 1e-9

#: Exceptions that mark a single point as a numeric failure.
_NUMERIC_ERRORS = (ArithmeticError, ValueError, FloatingPointError)


class UsageError(Exception):
    """Bad command-line input; mapped to exit code 4."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# grid definition

@dataclass(frozen=True)
class GridSpec:
    """Rectangular ``(rho, zeta)`` grid with ``nx`` columns in ``rho`` and ``ny`` rows in ``zeta``."""

    rho_range: Tuple[float, float]
    zeta_range: Tuple[float, float]
    nx: int
    ny: int
    params: DiskParams

    def __post_init__(self):
        for lo, hi in (self.rho_range, self.zeta_range):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise UsageError(f"range must satisfy min < max, got [{lo}, {hi}]")
        if self.rho_range[0] < 0:
            raise UsageError("rho range must be non-negative")
        if self.nx < 2 or self.ny < 2:
            raise UsageError("grid counts must be at least 2")

    def points(self) -> List[Tuple[float, float]]:
        """Grid nodes in row-major order with ``rho`` varying fastest.

        A node on the rim ``(rho0, 0)`` is moved outward to
        ``rho0 * (1 + RIM_NUDGE)`` with a warning.
        """
        rhos = np.linspace(*self.rho_range, self.nx)
        zetas = np.linspace(*self.zeta_range, self.ny)
        r0 = self.params.rho0
        out = []
        for z in zetas:
            for r in rhos:
                r, z = float(r), float(z)
                if abs(complex(r, z) - r0) < max(RIM_EXCLUSION, RIM_NUDGE) * r0:
                    warnings.warn(f"grid node ({r}, {z}) is on the rim; "
                                  f"moved to rho = rho0*(1+{RIM_NUDGE:g})", stacklevel=2)
                    r, z = r0 * (1.0 + RIM_NUDGE), 0.0
                out.append((r, z))
        return out


def parse_grid(text: str) -> Tuple[int, int]:
    """Parse ``"AxB"`` into ``(A, B)``.

    >>> parse_grid("61x81")
    (61, 81)
    """
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 61x81, got {text!r}") from None


def thread_count() -> int:
    """Worker count from ``ERNST_DISK_THREADS`` (default: number of CPUs)."""
    raw = os.environ.get("ERNST_DISK_THREADS")
    if raw is None or raw.strip() == "":
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"ERNST_DISK_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"ERNST_DISK_THREADS must be a positive integer, got {raw!r}")
    return n


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    # Executor.map yields results in submission order, which fixes the output order.
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# output

def _fmt(x) -> str:
    # repr gives the shortest round-tripping decimal, independent of locale
    return repr(float(x))


def render(records: List[dict], columns: Sequence[str], fmt: str) -> str:
    """Serialize records as CSV (fixed header) or as a JSON array of objects."""
    if fmt == "json":
        clean = []
        for rec in records:
            row = {}
            for key, val in rec.items():
                if isinstance(val, float) and not math.isfinite(val):
                    val = None if math.isnan(val) else repr(val)
                row[key] = val
            clean.append(row)
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_fmt(rec[c]) for c in columns])
    return buf.getvalue()


def write_output(text: str, out: Optional[str]) -> int:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _nan_record(columns: Sequence[str], **known) -> dict:
    rec = {c: float("nan") for c in columns}
    rec.update(known)
    return rec


# ---------------------------------------------------------------------------
# commands

def cmd_field(spec: GridSpec, out: Optional[str], fmt: str, tol: float = DEFAULT_TOL,
              threads: int = 1) -> int:
    """Evaluate ``f, e^{2U}, a, e^{2 kappa}`` on a grid; one record per node."""
    ctx = SolutionContext(spec.params, tol)
    pts = spec.points()

    def one(pt):
        r, z = pt
        try:
            rec = field_sample(ctx, r, z).as_dict()
        except _NUMERIC_ERRORS as exc:
            return _nan_record(FIELD_COLUMNS, rho=r, zeta=z), f"{type(exc).__name__}: {exc}"
        bad = not all(math.isfinite(rec[c]) for c in FIELD_COLUMNS)
        return rec, ("non-finite value" if bad else None)

    results = _map(one, pts, threads)
    records, failed = [], 0
    for rec, note in results:
        if note is not None:
            failed += 1
            print(f"numeric failure at rho={rec['rho']!r}, zeta={rec['zeta']!r}: {note}",
                  file=sys.stderr)
            if fmt == "json":
                rec = dict(rec, note=note)
        records.append(rec)
    code = write_output(render(records, FIELD_COLUMNS, fmt), out)
    if code:
        return code
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_axis(params: DiskParams, zeta_max: float, n: int, out: Optional[str], fmt: str,
             tol: float = DEFAULT_TOL, with_kprime: bool = False, threads: int = 1) -> int:
    """Axis profile on ``n`` equally spaced ``zeta`` in ``[0, zeta_max]``.

    ``zeta = 0`` is the upper face of the disk center.  With ``with_kprime``
    the columns also hold ``K'`` and the residual ``|d + exp(-K')|``.
    """
    if not (zeta_max > 0 and math.isfinite(zeta_max)) or n < 2:
        raise UsageError("axis profile needs zeta_max > 0 and n >= 2")
    columns = AXIS_COLUMNS + (KPRIME_COLUMNS if with_kprime else ())
    zetas = [float(z) for z in np.linspace(0.0, zeta_max, n)]

    def one(z):
        try:
            ad = axis_data(params, z, tol, with_kprime=with_kprime)
            f = axis_f(params, z, tol)
            rec = {"zeta": z, "re_f": f.real, "im_f": f.imag, "e2U": axis_e2U(params, z, tol),
                   "Jprime": ad.Jprime, "im_d": ad.d.imag}
            if with_kprime:
                rec.update(re_kprime=ad.Kprime.real, im_kprime=ad.Kprime.imag,
                           kprime_residual=abs(ad.d + np.exp(-ad.Kprime)))
        except _NUMERIC_ERRORS as exc:
            return _nan_record(columns, zeta=z), f"{type(exc).__name__}: {exc}"
        bad = not all(math.isfinite(rec[c]) for c in columns)
        return rec, ("non-finite value" if bad else None)

    return _finish(_map(one, zetas, threads), columns, fmt, out, "zeta")


def cmd_spectral(params: DiskParams, k_list: Sequence[complex], out: Optional[str], fmt: str,
                 tol: float = DEFAULT_TOL) -> int:
    """Spectral functions ``F, G, E, d1`` and the ``tr(MS)`` residual at each ``k``."""
    r0 = params.rho0
    for k in k_list:
        if k.real == 0.0 and abs(k.imag) <= r0:
            raise UsageError(f"k={k} lies on the disk contour; boundary values need a side")

    def one(k):
        try:
            sv = FG_of_k(params, k, tol)
            rec = {"re_k": k.real, "im_k": k.imag, "re_F": sv.F.real, "im_F": sv.F.imag,
                   "re_G": sv.G.real, "im_G": sv.G.imag, "re_E": sv.E.real, "im_E": sv.E.imag,
                   "re_d1": sv.d1.real, "im_d1": sv.d1.imag,
                   "trMS": abs(trace_MS(params, k, sv.F, sv.G))}
        except NonConvergence as exc:
            return _nan_record(SPECTRAL_COLUMNS, re_k=k.real, im_k=k.imag), f"{exc}"
        bad = not all(math.isfinite(rec[c]) for c in SPECTRAL_COLUMNS)
        return rec, ("non-finite value" if bad else None)

    return _finish([one(k) for k in k_list], SPECTRAL_COLUMNS, fmt, out, "re_k")


def _finish(results, columns, fmt, out, key) -> int:
    records, failed = [], 0
    for rec, note in results:
        if note is not None:
            failed += 1
            print(f"numeric failure at {key}={rec[key]!r}: {note}", file=sys.stderr)
        records.append(rec)
    code = write_output(render(records, columns, fmt), out)
    if code:
        return code
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_verify(params: DiskParams, level: str, out: Optional[str], tol: float = 1e-12,
               seed: int = DEFAULT_SEED, threads: int = 1, quiet: bool = False) -> int:
    """Run the check suite; JSON report to ``out``, summary table to stderr."""
    ctx = SolutionContext(params, tol)
    report = run_suite(ctx, level, seed, threads)
    if not quiet:
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            print(f"{mark} {c.name:<40s} {c.measured:10.3e} < {c.tolerance:.1e}", file=sys.stderr)
        n_fail = sum(not c.passed for c in report.checks)
        print(f"{len(report.checks) - n_fail}/{len(report.checks)} checks passed", file=sys.stderr)
    if out is not None:
        code = write_output(report.to_json() + "\n", out)
        if code:
            return code
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument parsing

def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho0", type=float, required=True, help="disk radius")
    common.add_argument("--omega", type=float, required=True,
                        help="angular velocity (2*omega*rho0 < 1)")
    common.add_argument("--out", default="-", help="output file ('-' for stdout)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for randomized checks")

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("csv", "json"), default="csv")
    fmt.add_argument("--tol", type=float, default=DEFAULT_TOL,
                     help="absolute tolerance per 1-D integral (default %(default)g)")

    p = _Parser(prog="ernst-disk",
                description="Exterior field of a rigidly rotating disk with a Neumann "
                            "condition, evaluated from genus-one theta functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("field", parents=[common, fmt], help="evaluate fields on a grid")
    f.add_argument("--grid", type=parse_grid, default=(61, 81), metavar="AxB",
                   help="A nodes in rho times B nodes in zeta (default 61x81)")
    f.add_argument("--rho-range", type=float, nargs=2, default=(0.0, 3.0), metavar=("MIN", "MAX"))
    f.add_argument("--zeta-range", type=float, nargs=2, default=(-2.0, 2.0),
                   metavar=("MIN", "MAX"))

    a = sub.add_parser("axis", parents=[common, fmt], help="profile on the rotation axis")
    a.add_argument("--zeta-max", type=float, default=50.0)
    a.add_argument("--n", type=int, default=201, help="number of samples")
    a.add_argument("--with-kprime", action="store_true",
                   help="add K' and the residual |d + exp(-K')|")

    s = sub.add_parser("spectral", parents=[common, fmt], help="spectral functions at given k")
    s.add_argument("--k", type=_complex_arg, action="append", required=True,
                   help="spectral parameter, e.g. 0.5+2j; write --k=-1+2j for a leading minus (repeatable)")

    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.add_argument("--tol", type=float, default=1e-12,
                   help="absolute tolerance per 1-D integral (default %(default)g)")
    v.add_argument("--quiet", action="store_true", help="suppress the summary table")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = None if args.out == "-" else args.out
    try:
        params = DiskParams(args.rho0, args.omega)
        if not (args.tol > 0 and math.isfinite(args.tol)):
            raise UsageError("--tol must be positive")
        threads = thread_count()
        if args.command == "field":
            spec = GridSpec(tuple(args.rho_range), tuple(args.zeta_range), *args.grid, params)
            return cmd_field(spec, out, args.format, args.tol, threads)
        if args.command == "axis":
            return cmd_axis(params, args.zeta_max, args.n, out, args.format, args.tol,
                            args.with_kprime, threads)
        if args.command == "spectral":
            return cmd_spectral(params, args.k, out, args.format, args.tol)
        return cmd_verify(params, args.level, args.out, args.tol, args.seed, threads, args.quiet)
    except InvalidParameters as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
