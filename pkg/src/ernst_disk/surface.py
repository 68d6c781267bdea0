"""The genus-one spectral surface and its genus-zero degeneration.

For a field point ``z = rho + i zeta`` the surface is

    y**2 = (k - k1)(k - conj(k1))(k + i z)(k - i conj(z)),   k1 = -i / (2 Omega).

It is realized as a two-sheeted cover of the k-plane with two cuts:

* ``C_k1``: the polyline ``[k1, k1 - 1, conj(k1) - 1, conj(k1)]``;
* the vertical segment ``[-i z, i conj(z)]`` through ``Re k = zeta``.

On the upper sheet ``y ~ k**2`` at infinity.  We evaluate ``y = mu(k) s(k)``
where ``mu = sqrt((k - k1)(k - conj(k1)))`` carries the cut ``C_k1`` and
``s = sqrt((k - zeta)**2 + rho**2)`` carries the vertical cut.  Each factor
is built from principal square roots whose discontinuities are arranged to
lie exactly on the prescribed cuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .quadrature import (DEFAULT_TOL, Contour, integrate, integrate_ray, QuadratureResult)

__all__ = [
    "CUT_OFFSET",
    "InvalidParameters",
    "DegenerateSurfaceError",
    "OnCutWithoutSide",
    "DiskParams",
    "SheetedPoint",
    "DegenerateSurface",
    "SurfaceGeometry",
    "mu_upper",
    "build_geometry",
    "anchored_integral",
    "integrate_from_small_end",
    "ball_crossings",
    "omega_integral",
    "RHO_AXIS_FACTOR",
]

#: Horizontal extent of the polyline cut ``C_k1``.
CUT_OFFSET = 1.0

#: Geometry is refused for ``rho < RHO_AXIS_FACTOR * rho0``.
RHO_AXIS_FACTOR = 1e-3


class InvalidParameters(ValueError):
    """Disk parameters violate ``rho0 > 0``, ``Omega > 0`` or ``2 Omega rho0 < 1``."""


class DegenerateSurfaceError(ValueError):
    """The field point is too close to the rotation axis for the genus-one geometry."""


class OnCutWithoutSide(ValueError):
    """A point lies on a branch cut and no side was specified."""


@dataclass(frozen=True)
class DiskParams:
    """Physical inputs of the rotating-disk problem.

    Parameters
    ----------
    rho0 : float
        Disk radius.
    omega : float
        Angular velocity.  Must satisfy ``2 * omega * rho0 < 1``.
    """

    rho0: float = 1.0
    omega: float = 0.3

    def __post_init__(self):
        rho0, omega = float(self.rho0), float(self.omega)
        if not (rho0 > 0 and math.isfinite(rho0)):
            raise InvalidParameters(f"rho0 must be positive and finite, got {rho0}")
        if not (omega > 0 and math.isfinite(omega)):
            raise InvalidParameters(f"omega must be positive and finite, got {omega}")
        if not 2.0 * omega * rho0 < 1.0:
            raise InvalidParameters(
                f"the solution requires 2*omega*rho0 < 1 (got {2 * omega * rho0:g}); "
                "otherwise the branch points k1, conj(k1) fall on the disk contour")
        object.__setattr__(self, "rho0", rho0)
        object.__setattr__(self, "omega", omega)

    @property
    def c(self) -> float:
        """``1 / (2 Omega)``, the modulus of the fixed branch points."""
        return 1.0 / (2.0 * self.omega)

    @property
    def k1(self) -> complex:
        return complex(0.0, -self.c)

    @property
    def k1bar(self) -> complex:
        return complex(0.0, self.c)

    @property
    def a0(self) -> float:
        return -1.0 / (2.0 * self.omega)

    @property
    def gamma(self) -> Contour:
        """The disk contour ``[-i rho0, i rho0]``, oriented upward."""
        return Contour((complex(0.0, -self.rho0), complex(0.0, self.rho0)))


@dataclass(frozen=True)
class SheetedPoint:
    """A point ``k`` of the surface with a sheet tag (+1 upper, -1 lower).

    ``side`` may be ``"left"`` or ``"right"`` for points lying on the
    vertical cut; it selects the boundary value.
    """

    k: complex
    sheet: int = 1
    side: Optional[str] = None

    def __post_init__(self):
        if self.sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        if self.side not in (None, "left", "right"):
            raise ValueError("side must be None, 'left' or 'right'")
        object.__setattr__(self, "k", complex(self.k))


def mu_upper(k, params: DiskParams, dk1=None, dk1bar=None):
    """``mu(k+)`` with the cut ``C_k1`` and ``mu ~ k`` at infinity.

    The principal roots ``sqrt(k - k1) sqrt(k - conj(k1))`` jump across the
    two horizontal rays pointing left from ``k1`` and ``conj(k1)``.  Flipping
    the sign on the open region ``Re k < -CUT_OFFSET, |Im k| < c`` cancels
    the jump beyond ``Re k = -CUT_OFFSET`` and creates one along the vertical
    leg, which reproduces the polyline cut.

    ``dk1`` and ``dk1bar``, if given, are ``k - k1`` and ``k - conj(k1)``
    computed without rounding; they keep the root accurate for points within
    a few ulps of the branch points.
    """
    k = np.asarray(k, dtype=complex)
    c = params.c
    dk1 = k - params.k1 if dk1 is None else np.asarray(dk1, dtype=complex)
    dk1bar = k - params.k1bar if dk1bar is None else np.asarray(dk1bar, dtype=complex)
    v = np.sqrt(dk1) * np.sqrt(dk1bar)
    flip = (k.real < -CUT_OFFSET) & (np.abs(k.imag) < c)
    return np.where(flip, -v, v)


@dataclass(frozen=True)
class DegenerateSurface:
    """The genus-zero surface ``mu**2 = (k - k1)(k - conj(k1))`` reached on the axis."""

    params: DiskParams

    def mu(self, k, sheet: int = 1):
        return sheet * mu_upper(k, self.params)

    def omega3_prime(self, zeta: complex, k, sheet: int = 1):
        """Density of ``omega'_{zeta+ zeta-}``: ``mu(zeta+) / ((k - zeta) mu(k))``."""
        mz = mu_upper(complex(zeta), self.params)
        return mz / ((np.asarray(k) - zeta) * self.mu(k, sheet))

    def omega3_prime_infinity(self, k, sheet: int = 1):
        """Density of ``omega'_{inf+ inf-}``: ``-1 / mu(k)``."""
        return -1.0 / self.mu(k, sheet)


def _s_factor(k, rho: float, zeta: float, collided: bool, side: Optional[str] = None,
              w=None, wm=None, wp=None):
    """``s(k) = sqrt((k - zeta)**2 + rho**2)`` with the cut on ``[zeta - i rho, zeta + i rho]``.

    ``w sqrt(1 + rho**2 / w**2)`` has its only discontinuity where
    ``rho**2 / w**2 <= -1``, i.e. exactly on the vertical cut.  Points that
    lie on the cut get the boundary value of the requested side; when the
    cut sits on the disk contour (``collided``) the default is the left side.
    """
    if w is None:
        w = np.asarray(k, dtype=complex) - zeta
    if rho == 0.0:
        return w
    wm = w - 1j * rho if wm is None else wm
    wp = w + 1j * rho if wp is None else wp
    with np.errstate(divide="ignore", invalid="ignore"):
        # (w - i rho)(w + i rho) / w**2 equals 1 + rho**2 / w**2 without the
        # cancellation near the branch points
        s = w * np.sqrt(wm * wp / (w * w))
    on_cut = (w.real == 0.0) & (np.abs(w.imag) <= rho)
    if np.any(on_cut):
        if side is None and not collided:
            raise OnCutWithoutSide("point lies on the vertical cut; pass side='left' or 'right'")
        t = w.imag
        root = np.sqrt(np.maximum(rho * rho - t * t, 0.0))
        sign = 1.0 if side == "right" else -1.0
        s = np.where(on_cut, sign * root, s)
    return s


@dataclass(frozen=True)
class SurfaceGeometry:
    """Periods and path integrals of the genus-one surface at a field point.

    Attributes
    ----------
    params : DiskParams
    rho, zeta : float
        Field point ``z = rho + i zeta`` with ``zeta >= 0``.
    A : complex
        Normalization with ``omega = A dk / y`` and ``int_a omega = 1``.
    Z : complex
        ``int_b dk / y`` along the straight b-path.
    B : complex
        Period ``int_b omega`` (``Im B > 0``).
    a_k : complex
        ``int_a k dk / y`` (enters ``omega_{inf+ inf-}``).
    phi_inf, psi_inf : complex
        ``int omega`` from ``-i z`` and from ``i conj(z)`` to ``infinity-``.
    chi : complex
        ``int omega`` from ``-i z`` to ``i conj(z)`` along the right side of
        the vertical cut on the upper sheet.
    error : float
        Summed quadrature error estimates.
    """

    params: DiskParams
    rho: float
    zeta: float
    A: complex
    Z: complex
    B: complex
    a_k: complex
    phi_inf: complex
    psi_inf: complex
    chi: complex
    error: float
    tol: float = DEFAULT_TOL
    a_path: tuple = field(default=(), repr=False)

    @property
    def z(self) -> complex:
        return complex(self.rho, self.zeta)

    @property
    def collided(self) -> bool:
        """True when the vertical cut lies on the imaginary axis (``zeta = 0``)."""
        return self.zeta == 0.0

    @property
    def branch_points(self) -> tuple:
        p = self.params
        return (p.k1, p.k1bar, complex(self.zeta, -self.rho), complex(self.zeta, self.rho))

    @property
    def cut_Ck1(self) -> Contour:
        p = self.params
        return Contour((p.k1, p.k1 - CUT_OFFSET, p.k1bar - CUT_OFFSET, p.k1bar))

    @property
    def cut_z(self) -> Contour:
        return Contour((complex(self.zeta, -self.rho), complex(self.zeta, self.rho)))

    def s(self, k, side: Optional[str] = None):
        return _s_factor(k, self.rho, self.zeta, self.collided, side)

    def y(self, k, sheet: int = 1, side: Optional[str] = None):
        """``y(k)`` on the given sheet (``y ~ sheet * k**2`` at infinity)."""
        return sheet * mu_upper(k, self.params) * self.s(k, side)

    def y_from_branch(self, t, which: int, sheet: int = 1, side: Optional[str] = None):
        """``y(zeta + which * i rho + t)`` with the offset ``t`` kept exact.

        Near a branch point of the vertical cut, ``k`` itself cannot resolve
        small offsets; passing ``t`` separately keeps the square-root factor
        accurate down to ``|t| ~ 1e-300``.
        """
        t = np.asarray(t, dtype=complex)
        ir = 1j * self.rho
        w = which * ir + t
        wm = t if which > 0 else t - 2.0 * ir
        wp = t if which < 0 else t + 2.0 * ir
        k = self.zeta + w
        s = _s_factor(k, self.rho, self.zeta, self.collided, side, w=w, wm=wm, wp=wp)
        return sheet * mu_upper(k, self.params) * s

    def y_from_k1(self, t, sheet: int = 1):
        """``y(k1 + t)`` with the offset ``t`` from the branch point ``k1`` kept exact."""
        t = np.asarray(t, dtype=complex)
        k = self.params.k1 + t
        return sheet * mu_upper(k, self.params, dk1=t) * self.s(k)

    def y_from_k1bar(self, t, sheet: int = 1):
        """``y(conj(k1) + t)`` with the offset ``t`` kept exact."""
        t = np.asarray(t, dtype=complex)
        k = self.params.k1bar + t
        return sheet * mu_upper(k, self.params, dk1bar=t) * self.s(k)

    def integrate_a_path(self, numer, tol: Optional[float] = None) -> QuadratureResult:
        """``int numer(k) dk / y(k+)`` along the a-path from ``k1`` to ``conj(k1)``.

        The two halves are integrated in the offset variables of their own
        endpoints, so the inverse square roots stay resolved even when the
        branch points are far from the origin.  Twice the result is the
        a-period of ``numer(k) dk / y``.
        """
        tol = self.tol if tol is None else tol
        p = self.params
        v0, v1, v2, v3 = self.a_path
        mid = 0.5 * (v1 + v2)
        absolute = lambda k: numer(k) / self.y(k)
        lower = anchored_integral(lambda t: numer(p.k1 + t) / self.y_from_k1(t), absolute,
                                  p.k1, [v1, mid], 0.5 * tol)
        upper = anchored_integral(lambda t: numer(p.k1bar + t) / self.y_from_k1bar(t), absolute,
                                  p.k1bar, [v2, mid], 0.5 * tol)
        return lower + (-upper)

    def y_point(self, p: SheetedPoint) -> complex:
        return complex(self.y(p.k, p.sheet, p.side))

    def dy(self, k, sheet: int = 1, side: Optional[str] = None):
        """``dy/dk`` on the given sheet."""
        k = np.asarray(k, dtype=complex)
        c = self.params.c
        w = k - self.zeta
        yv = self.y(k, sheet, side)
        return yv * (k / (k * k + c * c) + w / (w * w + self.rho * self.rho))

    def poly(self, k):
        """The quartic ``P(k) = y(k)**2``."""
        k = np.asarray(k, dtype=complex)
        c = self.params.c
        w = k - self.zeta
        return (k * k + c * c) * (w * w + self.rho * self.rho)

    def poly_coefficients(self) -> np.ndarray:
        """Coefficients of ``P`` (highest degree first)."""
        c = self.params.c
        return np.polymul([1.0, 0.0, c * c], [1.0, -2.0 * self.zeta, self.zeta ** 2 + self.rho ** 2])

    def omega(self, k, sheet: int = 1):
        """Density of the normalized holomorphic differential ``omega = A dk / y``."""
        return self.A / self.y(k, sheet)

    def omega3_infinity(self, k, sheet: int = 1):
        """Density of ``omega_{inf+ inf-} = -k dk / y + a_k omega``."""
        k = np.asarray(k, dtype=complex)
        return (-k + self.a_k * self.A) / self.y(k, sheet)

    def omega3_pair(self, zeta_pt: complex, k, sheet: int = 1):
        """Density of ``omega_{P Q}`` with ``P = zeta_pt+`` and ``Q = zeta_pt-``.

        ``y(P) dk / ((k - zeta_pt) y(k))`` minus its a-period times ``omega``.
        """
        yp = complex(self.y(zeta_pt))
        a_per = 2.0 * self.integrate_a_path(lambda t: yp / (t - zeta_pt)).value
        k = np.asarray(k, dtype=complex)
        return yp / ((k - zeta_pt) * self.y(k, sheet)) - a_per * self.A / self.y(k, sheet)

    def lattice_reduce(self, v: complex) -> complex:
        """Representative of ``v`` modulo ``Z + B Z`` with ``|Im v| <= Im B / 2``, ``|Re v| <= 1/2``."""
        n = round(v.imag / self.B.imag)
        v = v - n * self.B
        return v - round(v.real)


def ball_crossings(a: complex, b: complex, radius: float) -> list:
    """Parameters in ``(0, 1)`` where ``|a + s (b - a)|`` crosses ``radius``."""
    d = b - a
    qa, qb, qc = abs(d) ** 2, 2.0 * (a.conjugate() * d).real, abs(a) ** 2 - radius ** 2
    disc = qb * qb - 4.0 * qa * qc
    if qa == 0 or disc <= 0:
        return []
    r = math.sqrt(disc)
    return sorted(s for s in ((-qb - r) / (2 * qa), (-qb + r) / (2 * qa)) if 1e-12 < s < 1 - 1e-12)


def anchored_integral(f_offset, f_absolute, anchor: complex, vertices, tol: float
                      ) -> QuadratureResult:
    """Integrate along ``anchor -> vertices`` with an inverse square root at ``anchor``.

    Inside the disk ``|k - anchor| < |anchor| / 2`` the integrand is
    evaluated as ``f_offset(k - anchor)`` with exact offsets; outside it as
    ``f_absolute(k)``.  Far from the origin the anchor's absolute coordinate
    cannot resolve nearby offsets, while offsets cannot resolve points near
    the origin; splitting at the disk keeps both accurate.
    """
    anchor = complex(anchor)
    radius = 0.5 * abs(anchor) if anchor != 0 else math.inf
    absolute = [anchor, *(complex(v) for v in vertices)]
    offsets = [0j, *(v - anchor for v in absolute[1:])]
    pieces = []
    for j in range(len(absolute) - 1):
        q0, q1 = offsets[j], offsets[j + 1]
        p0, p1 = absolute[j], absolute[j + 1]
        breaks = [0.0, *ball_crossings(q0, q1, radius), 1.0]
        for t0, t1 in zip(breaks[:-1], breaks[1:]):
            a = q0 + t0 * (q1 - q0) if t0 > 0 else q0
            b = q0 + t1 * (q1 - q0) if t1 < 1 else q1
            if abs(0.5 * (a + b)) < radius:
                pieces.append((True, a, b))
            else:
                ka = p0 + t0 * (p1 - p0) if t0 > 0 else p0
                kb = p0 + t1 * (p1 - p0) if t1 < 1 else p1
                pieces.append((False, ka, kb))
    total_len = sum(abs(b - a) for _, a, b in pieces)
    result = QuadratureResult(0j, 0.0, 0)
    for inside, a, b in pieces:
        share = tol * (0.5 * abs(b - a) / total_len + 0.5 / len(pieces))
        f = f_offset if inside else f_absolute
        result = result + integrate_from_small_end(f, a, b, share,
                                                   singular_start=inside and a == 0)
    return result


def integrate_from_small_end(f, a: complex, b: complex, tol: float, *,
                             singular_start: bool = False) -> QuadratureResult:
    """``int_a^b f dk`` parametrized from whichever end has the smaller modulus.

    Nodes ``a + (b - a) s`` are resolved to about ``ulp(|a| + |b - a|)``;
    starting from the end nearer the origin keeps the nodes exact where the
    integrand has its features when the other end is far away.
    """
    if singular_start or abs(a) <= abs(b):
        return integrate(f, [a, b], tol, singular=(0,) if singular_start else ())
    return -integrate(f, [b, a], tol)


def _a_path(params: DiskParams) -> tuple:
    """A path inside the rectangle bounded by ``C_k1`` from ``k1`` to ``conj(k1)``."""
    c = params.c
    e = min(0.5, 0.5 * c)
    dx = 0.5 * CUT_OFFSET
    return (params.k1, params.k1 - dx + 1j * e, params.k1bar - dx - 1j * e, params.k1bar)


def build_geometry(params: DiskParams, z: complex, tol: float = DEFAULT_TOL) -> SurfaceGeometry:
    """Compute periods and the fixed path integrals of the surface at ``z``.

    Parameters
    ----------
    params : DiskParams
    z : complex
        Field point ``rho + i zeta`` with ``rho >= RHO_AXIS_FACTOR * rho0`` and
        ``zeta >= 0``.  ``zeta = 0`` means the limit from above.
    tol : float
        Absolute tolerance of each contour integral.

    Raises
    ------
    DegenerateSurfaceError
        If ``rho`` is below the axis threshold.
    ValueError
        For ``zeta < 0``, the rim point, or colliding branch points.
    """
    z = complex(z)
    rho, zeta = z.real, z.imag
    if zeta < 0:
        raise ValueError("build_geometry expects zeta >= 0; use equatorial symmetry")
    if rho < RHO_AXIS_FACTOR * params.rho0:
        raise DegenerateSurfaceError(
            f"rho={rho:g} is below the axis threshold {RHO_AXIS_FACTOR * params.rho0:g}")
    c = params.c
    if zeta == 0.0 and (abs(rho - params.rho0) < 1e-12 or abs(rho - c) < 1e-9):
        raise ValueError(f"z={z} is a rim or branch-point collision point")

    apath = _a_path(params)
    proto = SurfaceGeometry(params, rho, zeta, 1.0, 0j, 1j, 0j, 0j, 0j, 0j, 0.0, tol, apath)
    err = 0.0

    r = proto.integrate_a_path(np.ones_like)
    if abs(r.value) < 1.0:
        # the a-period shrinks like Omega; it is needed to relative accuracy
        r = proto.integrate_a_path(np.ones_like, max(tol, 1e-14) * abs(r.value))
    ainv = 2.0 * r.value
    err += 2.0 * r.error_estimate
    A = 1.0 / ainv
    # integrals that get multiplied by A are needed to tol / |A|
    tol_A = tol / max(1.0, abs(A))
    r = proto.integrate_a_path(lambda k: k)
    a_k = 2.0 * r.value
    err += 2.0 * r.error_estimate

    top = complex(zeta, rho)
    yb = proto.y_from_branch
    r = integrate(lambda t: 1.0 / yb(t, 1, 1, "left"), [0.0, params.k1bar - top], tol_A,
                  singular=(0, -1))
    Z = 2.0 * r.value
    err += 2.0 * abs(A) * r.error_estimate
    B = A * Z
    if B.imag < 0:
        Z, B = -Z, -B
    # The b-cycle leaves through C_k1 from inside the bracket rectangle, so it
    # differs from the straight path by one a-cycle.
    B = B + 1.0

    # omega on the lower sheet equals -A dk / y(k+)
    def to_inf(which):
        rr = integrate_ray(lambda t: 1.0 / yb(t, which, 1, "right"), 0.0, 1.0, tol_A,
                           singular_start=True, scale=max(1.0, rho))
        return -A * rr.value, abs(A) * rr.error_estimate

    phi_inf, e1 = to_inf(-1)
    psi_inf, e2 = to_inf(1)
    err += e1 + e2

    # Right side of the vertical cut, upper sheet: k = zeta + i rho sin(theta),
    # s = rho cos(theta), dk = i rho cos(theta) dtheta.
    def chi_integrand(th):
        th = np.asarray(th).real
        k = zeta + 1j * rho * np.sin(th)
        return 1j / mu_upper(k, params)

    lo, hi = -math.pi / 2, math.pi / 2
    breaks = [complex(lo)]
    sing = []
    if zeta == 0.0 and rho > c:
        t0 = math.asin(c / rho)
        breaks += [complex(-t0), complex(t0)]
        sing = [1, 2]
    breaks.append(complex(hi))
    r = integrate(chi_integrand, breaks, tol_A, singular=sing)
    chi = A * r.value
    err += abs(A) * r.error_estimate

    return SurfaceGeometry(params, rho, zeta, A, Z, B, a_k, phi_inf, psi_inf, chi,
                           err, tol, apath)


def omega_integral(g: SurfaceGeometry, start: complex, end, sheet: int = 1,
                   tol: Optional[float] = None) -> QuadratureResult:
    """Integrate ``omega`` along the straight segment ``[start, end]`` on one sheet.

    ``end="inf"`` integrates along the horizontal ray from ``start`` to the
    right, reaching ``infinity`` on the given sheet.  Endpoints that are
    branch points are detected and treated as inverse-square-root
    singularities.  The caller is responsible for choosing paths that do not
    cross a cut.
    """
    tol = g.tol if tol is None else tol
    start = complex(start)
    branch = g.branch_points

    def is_branch(p):
        return any(abs(p - b) < 1e-14 * max(1.0, abs(b)) for b in branch)

    f = lambda k: g.omega(k, sheet)
    if isinstance(end, str):
        if end != "inf":
            raise ValueError("end must be a complex number or 'inf'")
        return integrate_ray(f, start, 1.0, tol, singular_start=is_branch(start),
                             scale=max(1.0, g.rho))
    end = complex(end)
    if start == end:
        return QuadratureResult(0j, 0.0, 0)
    sing = [i for i, p in ((0, start), (1, end)) if is_branch(p)]
    return integrate(f, [start, end], tol, singular=sing)
