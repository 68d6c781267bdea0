"""Boundary data, spectral functions and closed-form values on the rotation axis.

All functions here live on the genus-zero surface ``mu**2 = k**2 + c**2``
(``c = 1/(2 Omega)``) and the disk contour ``Gamma = [-i rho0, i rho0]``.

The key object is the Cauchy-type integral

    C(k) = int_Gamma phi(s) ds / (s - k),    phi = h / mu(.+),

from which ``E(k+) = exp(mu(k+) C(k))`` and the axis quantity
``J'(zeta) = mu(zeta+) C(zeta)`` are built.  Near ``Gamma`` the value
``phi(k)`` is subtracted from the numerator and the logarithm
``int_Gamma ds / (s - k)`` is added in closed form, which keeps the
integrand bounded even though ``h`` does not vanish at the ends of Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_TOL, integrate, integrate_ray
from .surface import DiskParams, mu_upper

__all__ = [
    "ErgosphereDetected",
    "SpectralValue",
    "AxisData",
    "h_of_k",
    "cauchy_gamma",
    "cauchy_gamma_boundary",
    "E_of_k",
    "E_boundary",
    "d1_of_k",
    "FG_of_k",
    "FG_boundary",
    "M_matrix",
    "S_matrix",
    "trace_MS",
    "axis_data",
    "axis_f",
    "axis_e2U",
]


class ErgosphereDetected(ArithmeticError):
    """A denominator of the axis formula vanishes."""


@dataclass(frozen=True)
class SpectralValue:
    """Spectral functions at a point ``k`` off the disk contour."""

    k: complex
    F: complex
    G: complex
    E: complex
    d1: complex


@dataclass(frozen=True)
class AxisData:
    """Quantities entering the Ernst potential on the rotation axis.

    Attributes
    ----------
    zeta : float
    Jprime : float
        ``mu(zeta+) int_Gamma h / mu(k+) dk / (k - zeta)``.
    d : complex
        ``2 i Omega (zeta - mu(zeta+))``, purely imaginary.
    Kprime : complex
        ``int_{k1}^{inf-} omega'_{zeta+ zeta-}``.
    """

    zeta: float
    Jprime: float
    d: complex
    Kprime: complex


def h_of_k(params: DiskParams, k):
    """Boundary function ``h(k) = -arcsin(2 i Omega k) / pi``.

    Real and odd on the disk contour.  The principal ``arcsin`` is used; its
    cuts ``(-inf, -1] U [1, inf)`` correspond to ``k`` on the imaginary axis
    beyond ``+-i / (2 Omega)``.

    Examples
    --------
    >>> p = DiskParams(1.0, 0.3)
    >>> round(float(h_of_k(p, 1j).real), 7)
    0.2048328
    """
    k = np.asarray(k, dtype=complex)
    out = -np.arcsin(2j * params.omega * k) / math.pi
    return out if out.ndim else complex(out)


def _phi(params: DiskParams, k):
    return h_of_k(params, k) / mu_upper(k, params)


def _near_gamma(params: DiskParams, k: complex) -> bool:
    r0 = params.rho0
    im = min(max(k.imag, -r0), r0)
    return abs(k - 1j * im) < 0.5 * r0


def cauchy_gamma(params: DiskParams, k: complex, tol: float = DEFAULT_TOL) -> complex:
    """``int_Gamma h(s) / mu(s+) ds / (s - k)`` for ``k`` off Gamma."""
    k = complex(k)
    r0 = params.rho0
    gam = [complex(0, -r0), complex(0, r0)]
    if not _near_gamma(params, k):
        f = lambda s: _phi(params, s) / (s - k)
        return integrate(f, gam, tol).value
    phik = complex(_phi(params, k))
    f = lambda s: (_phi(params, s) - phik) / (s - k)
    # Split at the projection of k onto Gamma so the bounded but sharply
    # varying difference quotient is resolved from both sides.
    t = min(max(k.imag, -r0 * (1 - 1e-9)), r0 * (1 - 1e-9))
    verts = [gam[0], complex(0, t), gam[1]] if -r0 < t < r0 and t not in (-r0, r0) else gam
    smooth = integrate(f, verts, tol).value
    log_term = np.log((gam[1] - k) / (gam[0] - k))
    return smooth + phik * complex(log_term)


def cauchy_gamma_boundary(params: DiskParams, t: float, side: str,
                          tol: float = DEFAULT_TOL) -> complex:
    """Boundary value of :func:`cauchy_gamma` at ``k = i t`` on Gamma.

    ``side="right"`` is the limit from ``Re k > 0``.  With Gamma oriented
    upward the right side is the minus side in the Plemelj sense:
    ``C_right = PV - i pi phi``, ``C_left = PV + i pi phi``.
    """
    r0 = params.rho0
    if not -r0 < t < r0:
        raise ValueError("t must lie strictly inside the disk contour")
    k = complex(0.0, t)
    phik = complex(_phi(params, k))
    f = lambda s: (_phi(params, s) - phik) / (s - k)
    pv = integrate(f, [complex(0, -r0), k, complex(0, r0)], tol).value
    pv += phik * math.log(abs(r0 - t) / abs(-r0 - t))
    sign = -1.0 if side == "right" else 1.0
    return pv + sign * 1j * math.pi * phik


def E_of_k(params: DiskParams, k: complex, sheet: int = 1, tol: float = DEFAULT_TOL) -> complex:
    """``E(k) = exp(mu(k) int_Gamma h / mu(s+) ds / (s - k))`` on the given sheet.

    ``E(k-) = 1 / E(k+)`` because ``mu`` changes sign between sheets.
    """
    k = complex(k)
    mu = sheet * complex(mu_upper(k, params))
    # the exponent multiplies C(k) by mu, so C needs a tolerance scaled by 1/|mu|
    ctol = max(tol / max(1.0, abs(mu)), 1e-15)
    return complex(np.exp(mu * cauchy_gamma(params, k, ctol)))


def E_boundary(params: DiskParams, t: float, side: str, sheet: int = 1,
               tol: float = DEFAULT_TOL) -> complex:
    """Boundary value of ``E`` at ``i t`` on Gamma from the given side."""
    k = complex(0.0, t)
    mu = sheet * complex(mu_upper(k, params))
    return complex(np.exp(mu * cauchy_gamma_boundary(params, t, side, tol)))


def d1_of_k(params: DiskParams, k, sheet: int = 1):
    """``d1(k) = 2 i Omega (k - mu(k))`` on the given sheet.

    Examples
    --------
    >>> p = DiskParams(1.0, 0.3)
    >>> abs(d1_of_k(p, 0.0) + 1j) < 1e-15
    True
    """
    k = np.asarray(k, dtype=complex)
    mu = sheet * np.asarray(mu_upper(k, params), dtype=complex)
    minus, plus = k - mu, k + mu
    # (k - mu)(k + mu) = -c**2; divide by the larger factor to avoid cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = np.where(np.abs(plus) > np.abs(minus), -params.c ** 2 / plus, minus)
    out = 2j * params.omega * stable
    return out if out.ndim else complex(out)


def _FG(params: DiskParams, k: complex, E: complex):
    mu = complex(mu_upper(k, params))
    d1 = complex(d1_of_k(params, k))
    pre = 1j / (4.0 * params.omega * mu)
    return pre * (d1 / E - E / d1), pre * (1.0 / E - E), d1


def FG_of_k(params: DiskParams, k: complex, tol: float = DEFAULT_TOL) -> SpectralValue:
    """Spectral functions at ``k+`` for ``k`` off Gamma.

    ``F = i/(4 Omega mu) (d1/E - E/d1)`` and ``G = i/(4 Omega mu) (1/E - E)``.
    """
    k = complex(k)
    E = E_of_k(params, k, 1, tol)
    F, G, d1 = _FG(params, k, E)
    return SpectralValue(k, F, G, E, d1)


def FG_boundary(params: DiskParams, t: float, side: str, tol: float = DEFAULT_TOL) -> SpectralValue:
    """Boundary values of ``F``, ``G`` at ``i t`` on Gamma from one side."""
    k = complex(0.0, t)
    E = E_boundary(params, t, side, 1, tol)
    F, G, d1 = _FG(params, k, E)
    return SpectralValue(k, F, G, E, d1)


def M_matrix(F: complex, G: complex) -> np.ndarray:
    """``M = [[-G, F], [(1 - G**2)/F, G]]``."""
    return np.array([[-G, F], [(1.0 - G * G) / F, G]], dtype=complex)


def S_matrix(params: DiskParams, k: complex) -> np.ndarray:
    """``S = [[0, 1], [-1, 4 i k Omega]]``."""
    return np.array([[0.0, 1.0], [-1.0, 4j * k * params.omega]], dtype=complex)


def trace_MS(params: DiskParams, k: complex, F: complex, G: complex) -> complex:
    """``tr(M S)``; vanishes identically for the true spectral functions."""
    return complex(np.trace(M_matrix(F, G) @ S_matrix(params, k)))


def _jprime(params: DiskParams, zeta: float, tol: float) -> float:
    """``mu(zeta+) C(zeta)`` for real ``zeta``.

    ``zeta`` lies on the real axis and Gamma on the imaginary axis, so the
    subtraction of ``phi(zeta)`` keeps the integrand bounded as ``zeta -> 0``.
    """
    mz = complex(mu_upper(zeta, params))
    if zeta == 0.0:
        # limit from the right of Gamma (zeta -> +0)
        return (mz * cauchy_gamma_boundary(params, 0.0, "right", tol)).real
    return (mz * cauchy_gamma(params, complex(zeta), tol)).real


def axis_data(params: DiskParams, zeta: float, tol: float = DEFAULT_TOL,
              with_kprime: bool = True) -> AxisData:
    """Axis quantities ``J'``, ``d`` and ``K'`` at ``zeta >= 0``.

    ``zeta = 0`` is the limit from above, i.e. the center of the disk seen
    from its upper face.  ``K'`` is evaluated along the ray running straight
    down from ``k1``.
    """
    zeta = float(zeta)
    if not zeta >= 0:
        raise ValueError("axis_data requires zeta >= 0")
    mz = float(mu_upper(zeta, params).real)
    J = _jprime(params, zeta, tol)
    d = complex(d1_of_k(params, zeta))
    K = complex("nan")
    if with_kprime:
        f = lambda k: 1.0 / ((k - zeta) * mu_upper(k, params))
        r = integrate_ray(f, params.k1, -1j, tol, singular_start=True, scale=params.c)
        # lower sheet: mu(k-) = -mu(k+)
        K = -mz * r.value
    return AxisData(zeta, J, d, K)


def axis_f(params: DiskParams, zeta: float, tol: float = DEFAULT_TOL) -> complex:
    """Ernst potential on the rotation axis.

    For ``zeta > 0``: ``f = (1 + e^{J'} d) / (e^{J'} + d)``; ``zeta = 0`` is
    read as ``+0``, the upper face of the disk center.
    For ``zeta < 0``: ``f = (d1 + E) / (1 + d1 E)`` with ``E = E(zeta+)`` and
    ``d1 = d1(zeta+)``; this combination does not depend on the sheet
    because both ``E`` and ``d1`` invert between sheets.
    """
    zeta = float(zeta)
    if zeta >= 0:
        ad = axis_data(params, zeta, tol, with_kprime=False)
        eJ = math.exp(ad.Jprime)
        den = eJ + ad.d
        if abs(den) < 1e-14:
            raise ErgosphereDetected(f"axis denominator vanishes at zeta={zeta}")
        return (1.0 + eJ * ad.d) / den
    E = E_of_k(params, complex(zeta), 1, tol)
    d1 = complex(d1_of_k(params, zeta))
    den = 1.0 + d1 * E
    if abs(den) < 1e-14:
        raise ErgosphereDetected(f"axis denominator vanishes at zeta={zeta}")
    return (d1 + E) / den


def axis_e2U(params: DiskParams, zeta: float, tol: float = DEFAULT_TOL) -> float:
    """``e^{2U}`` on the axis: ``(1 - d**2) e^{J'} / (e^{2J'} - d**2)`` for ``zeta > 0``."""
    zeta = abs(float(zeta))
    ad = axis_data(params, zeta, tol, with_kprime=False)
    eJ = math.exp(ad.Jprime)
    d2 = (ad.d * ad.d).real
    return (1.0 - d2) * eJ / (eJ * eJ - d2)
