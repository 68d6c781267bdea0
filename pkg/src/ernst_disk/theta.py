"""Genus-one Riemann theta function with certified truncation.

    Theta(v | B) = sum_{N in Z} exp(2 pi i (N**2 B / 2 + N v)),   Im B > 0.

Arguments are reduced modulo the period lattice ``Z + B Z`` before
summation; the quasi-periodicity factor is carried separately in log form so
that ratios of thetas with large arguments never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NonPositiveImB",
    "ThetaZeroDenominator",
    "ThetaParams",
    "truncation_order",
    "theta",
    "log_theta",
    "theta_ratio_reduced",
    "theta3_ratio",
    "TRUNCATION_TARGET",
]

#: Bound on the neglected tail of the reduced series.
TRUNCATION_TARGET = 1e-17


class NonPositiveImB(ValueError):
    """The period has non-positive imaginary part; the series diverges."""


class ThetaZeroDenominator(ZeroDivisionError):
    """A theta function in a denominator vanishes (to working precision)."""


@dataclass(frozen=True)
class ThetaParams:
    """Period of the theta function (``Im B > 0``)."""

    B: complex

    def __post_init__(self):
        B = complex(self.B)
        if not B.imag > 0:
            raise NonPositiveImB(f"Im B must be positive, got B={B}")
        object.__setattr__(self, "B", B)


def _check_B(B) -> complex:
    B = complex(B)
    if not B.imag > 0:
        raise NonPositiveImB(f"Im B must be positive, got B={B}")
    return B


def truncation_order(imB: float, max_im_v: float, target: float = TRUNCATION_TARGET) -> int:
    """Smallest ``N_max`` whose neglected tail is below ``target``.

    The terms obey ``|t_N| <= exp(-pi Im B N**2 + 2 pi |Im v| N)``.  For
    ``|Im v| <= Im B / 2`` the tail beyond ``N`` is bounded by a geometric
    series with ratio ``exp(-pi Im B (2N + 1) + 2 pi |Im v|)``; we add a
    margin of five terms on top of the first ``N`` where the two-sided tail
    bound drops below ``target``.
    """
    n = 1
    while True:
        expo = -math.pi * imB * (n + 1) ** 2 + 2.0 * math.pi * max_im_v * (n + 1)
        ratio = math.exp(-math.pi * imB * (2 * n + 3) + 2.0 * math.pi * max_im_v)
        if ratio < 1.0:
            tail = 2.0 * math.exp(expo) / (1.0 - ratio)
            if tail < target:
                return n + 5
        n += 1
        if n > 100000:
            raise OverflowError("theta truncation order exceeds 1e5; Im B too small")


def _reduce(v: np.ndarray, B: complex):
    """Write ``v = v_r + m + n B`` with ``|Im v_r| <= Im B / 2``.

    Returns ``(v_r, logfac)`` where ``Theta(v) = exp(logfac) Theta(v_r)``.
    """
    n = np.round(v.imag / B.imag)
    vr = v - n * B
    m = np.round(vr.real)
    vr = vr - m
    # Theta(w + n B) = exp(-pi i n**2 B - 2 pi i n w) Theta(w)
    logfac = -1j * math.pi * n * n * B - 2j * math.pi * n * vr
    return vr, logfac


def _series(vr: np.ndarray, B: complex) -> np.ndarray:
    max_im = float(np.max(np.abs(vr.imag))) if vr.size else 0.0
    nmax = truncation_order(B.imag, max_im)
    N = np.arange(-nmax, nmax + 1, dtype=float)
    expo = 2j * math.pi * (0.5 * N * N * B + N * vr[..., None])
    return np.exp(expo).sum(axis=-1)


def log_theta(v, B):
    """Return ``(logfac, theta_r)`` with ``Theta(v|B) = exp(logfac) * theta_r``.

    ``theta_r`` is the series at the lattice-reduced argument, of moderate
    size; ``logfac`` is the exact quasi-periodicity exponent.
    """
    B = _check_B(B)
    v = np.asarray(v, dtype=complex)
    vr, logfac = _reduce(v, B)
    return logfac, _series(vr, B)


def theta(v, B):
    """Riemann theta function ``Theta(v | B)`` of genus one.

    Parameters
    ----------
    v : complex or array_like
    B : complex
        Period with ``Im B > 0``.

    Returns
    -------
    complex or ndarray

    Examples
    --------
    >>> B = 0.3 + 1.1j
    >>> abs(theta(0.2 + 0.1j, B) - theta(-0.2 - 0.1j, B)) < 1e-15
    True
    """
    logfac, th = log_theta(v, B)
    out = np.exp(logfac) * th
    return out if np.ndim(out) else complex(out)


def theta_ratio_reduced(v1, v2, B, *, zero_tol: float = 1e-13):
    """``Theta(v1|B) / Theta(v2|B)`` computed from lattice-reduced arguments.

    Raises
    ------
    ThetaZeroDenominator
        If the reduced denominator is below ``zero_tol`` in modulus.
    """
    l1, t1 = log_theta(v1, B)
    l2, t2 = log_theta(v2, B)
    if np.any(np.abs(t2) < zero_tol):
        raise ThetaZeroDenominator(f"theta vanishes at v={v2}")
    out = np.exp(l1 - l2) * t1 / t2
    return out if np.ndim(out) else complex(out)


def theta3_ratio(w_minus, w_plus, B, extra: complex = 0.0, terms: int | None = None):
    """Ratio of Jacobi ``theta_3`` series after the modular map ``B -> -1/B``.

    Evaluates ``theta_3(pi w_minus / B; q) / theta_3(pi w_plus / B; q) * exp(extra)``
    with ``q = exp(-pi i / B)`` by direct summation of
    ``theta_3(x; q) = sum_n q**(n**2) exp(2 i n x)``.  This is an
    independent representation used only for cross-checks.
    """
    B = _check_B(B)
    q_log = -1j * math.pi / B          # log q
    if -q_log.real <= 0:
        raise NonPositiveImB("|q| >= 1 for the transformed nome")
    xm = math.pi * complex(w_minus) / B
    xp = math.pi * complex(w_plus) / B
    if terms is None:
        terms = 8
        while math.exp(q_log.real * terms * terms + 2 * max(abs(xm.imag), abs(xp.imag)) * terms) > 1e-18:
            terms += 1
    n = np.arange(-terms, terms + 1, dtype=float)
    # factor out the largest term to avoid overflow
    em = q_log * n * n + 2j * n * xm
    ep = q_log * n * n + 2j * n * xp
    mm, mp = em.real.max(), ep.real.max()
    num = np.exp(em - mm).sum()
    den = np.exp(ep - mp).sum()
    return complex(num / den * np.exp(mm - mp + extra))
