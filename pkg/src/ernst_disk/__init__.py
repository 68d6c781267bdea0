"""Exterior gravitational field of a rigidly rotating disk of dust with a Neumann condition.

The Ernst potential and the metric functions are evaluated from genus-one
Riemann theta functions on a surface whose branch points move with the
field point.  Typical use::

    from ernst_disk import DiskParams, SolutionContext, field_sample
    ctx = SolutionContext(DiskParams(rho0=1.0, omega=0.3))
    sample = field_sample(ctx, 0.7, 0.4)
"""

from .fields import (AxisBlendWarning, FieldSample, NegativeCorotatingNorm, RimPoint,
                     SolutionContext, corotating, ernst_f, field_sample, metric_a,
                     metric_e2kappa, metric_e2U)
from .spectral import FG_of_k, axis_data, axis_e2U, axis_f
from .surface import DiskParams, InvalidParameters, build_geometry
from .theta import theta
from .verify import VerificationReport, recover_m1, run_suite

__version__ = "0.1.0"

__all__ = [
    "AxisBlendWarning",
    "DiskParams",
    "FG_of_k",
    "FieldSample",
    "InvalidParameters",
    "NegativeCorotatingNorm",
    "RimPoint",
    "SolutionContext",
    "VerificationReport",
    "axis_data",
    "axis_e2U",
    "axis_f",
    "build_geometry",
    "corotating",
    "ernst_f",
    "field_sample",
    "metric_a",
    "metric_e2U",
    "metric_e2kappa",
    "recover_m1",
    "run_suite",
    "theta",
]
