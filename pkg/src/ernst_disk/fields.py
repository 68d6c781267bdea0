"""Ernst potential and metric functions of the rotating disk.

For a field point ``z = rho + i zeta`` with ``zeta > 0`` (or ``zeta = +0``)
and the surface data of :mod:`ernst_disk.surface`:

    u = int_Gamma h omega,        I = int_Gamma h omega_{inf+ inf-},
    f = Theta(u - phi) / Theta(u + phi) e^I,
    e^{2U} = Q(0) e^I / Q(u),
    a = a0 - rho / Q(0) (Theta(u + phi + psi) / (Q(0) Theta(u + chi)) - Q(u)) e^{-I},
    e^{2 kappa} = K0 Theta(u) Theta(u + chi) / (Theta(0) Theta(chi)) e^{Lreg},

with ``phi``, ``psi``, ``chi`` the path integrals of ``omega`` stored on the
geometry and ``Q(v) = Theta(v + phi) Theta(v + psi) / (Theta(v) Theta(v + chi))``.

``Lreg`` is a regularized double integral over the disk contour and ``K0``
is its counterpart on the genus-zero surface; both are built on
tensor-product Gauss-Kronrod rules whose panels are adapted to ``h / y``.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .quadrature import DEFAULT_TOL, integrate, integrate_arc, panel_rule
from .spectral import axis_f, axis_e2U, h_of_k
from .surface import (RHO_AXIS_FACTOR, DiskParams, SurfaceGeometry,
                      build_geometry, mu_upper)
from .theta import log_theta, theta_ratio_reduced

__all__ = [
    "RimPoint",
    "FieldSample",
    "SolutionContext",
    "gamma_path",
    "u_and_I",
    "ernst_f",
    "metric_e2U",
    "metric_a",
    "L_reg",
    "L_reg_deformed",
    "K0_constant",
    "K0_deformed",
    "metric_e2kappa",
    "corotating",
    "corotating_b",
    "field_sample",
    "RIM_EXCLUSION",
    "NegativeCorotatingNorm",
    "AxisBlendWarning",
]

#: Field points within this distance of the rim ``(rho0, 0)`` (relative to
#: ``rho0``) are refused; the grid driver nudges rim nodes farther than this.
RIM_EXCLUSION = 1e-10


class RimPoint(ValueError):
    """The field point coincides with the rim of the disk."""


class NegativeCorotatingNorm(UserWarning):
    """``e^{2U_Omega} <= 0``: the point lies in a co-rotating ergoregion."""


class AxisBlendWarning(UserWarning):
    """Theta and axis branches disagree by more than ``O(rho**2)`` near the axis."""


#: Width of the band ``[rho_axis, AXIS_BLEND_FACTOR * rho_axis)`` in which the
#: theta-function branch is compared with the axis branch.
AXIS_BLEND_FACTOR = 10.0

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class FieldSample:
    """Field values at one point.

    ``err`` is a heuristic absolute error: the accumulated quadrature
    estimates plus the size of imaginary parts that vanish analytically.
    """

    rho: float
    zeta: float
    f: complex
    e2U: float
    a: float
    e2kappa: float
    err: float

    def as_dict(self) -> dict:
        return {"rho": self.rho, "zeta": self.zeta, "re_f": self.f.real, "im_f": self.f.imag,
                "e2U": self.e2U, "a": self.a, "e2kappa": self.e2kappa, "err": self.err}


@dataclass
class _PointData:
    geom: SurfaceGeometry
    u: complex
    I: float
    err: float
    lreg: Optional[float] = None


class SolutionContext:
    """Disk parameters with cached per-point data and the constant ``K0``.

    Parameters
    ----------
    params : DiskParams
    tol : float
        Absolute tolerance for every 1-D contour integral.

    Notes
    -----
    ``a`` is the difference of ``a0 = -1/(2 Omega)`` and a theta quotient of
    nearly the same size, so errors in the per-point periods are amplified
    by about ``2 pi |a0|``.  The per-point integrals therefore use
    ``geom_tol = tol / (2 pi |a0|)`` (not below ``1e-15``).
    """

    def __init__(self, params: DiskParams, tol: float = 1e-12):
        self.params = params
        self.tol = float(tol)
        self.geom_tol = max(self.tol / max(1.0, 2.0 * math.pi * abs(params.a0)), 1e-15)
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.K0 = K0_constant(params, self.tol)

    def point(self, z: complex) -> _PointData:
        key = (float(complex(z).real), float(complex(z).imag))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        g = build_geometry(self.params, complex(*key), self.geom_tol)
        u, I, err = u_and_I(g, self.params, self.geom_tol)
        data = _PointData(g, u, I, err + g.error)
        with self._lock:
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache.setdefault(key, data)
        return data


def gamma_path(g: SurfaceGeometry):
    """Vertices of the disk contour with breakpoints where the vertical cut meets it.

    Returns ``(vertices, singular)``: when ``zeta = 0`` and ``rho < rho0``
    the branch points ``+-i rho`` lie on the contour and are flagged as
    inverse-square-root singularities.  For small ``zeta > 0`` the same
    breakpoints sit next to the branch points and help the adaptive rule.
    """
    r0 = g.params.rho0
    verts = [complex(0, -r0)]
    sing = []
    if g.rho < r0:
        verts += [complex(0, -g.rho), complex(0, g.rho)]
        if g.collided:
            sing = [1, 2]
    verts.append(complex(0, r0))
    return verts, sing


def _integrate_gamma(g: SurfaceGeometry, fky, tol: float):
    """``int_Gamma fky(k, y(k)) dk``.

    When the branch points ``+-i rho`` sit on the contour the pieces next to
    them are integrated in the offset ``t = k -+ i rho`` so that ``y`` stays
    accurate arbitrarily close to the branch point.
    """
    verts, sing = gamma_path(g)
    if not sing:
        return integrate(lambda k: fky(k, g.y(k)), verts, tol)
    r0, ir = g.params.rho0, 1j * g.rho
    total = None
    # (branch point, offset at the far end, sign of the orientation)
    pieces = [(-1, -1j * r0 + ir, -1.0), (-1, ir, 1.0), (1, -ir, -1.0), (1, 1j * r0 - ir, 1.0)]
    for which, t_end, sign in pieces:
        base = which * ir
        f = lambda t, base=base, which=which: fky(base + t, g.y_from_branch(t, which))
        r = integrate(f, [0.0, t_end], tol / 4, singular=(0,)).scaled(sign)
        total = r if total is None else total + r
    return total


def u_and_I(g: SurfaceGeometry, params: DiskParams, tol: float = DEFAULT_TOL):
    """``u = int_Gamma h omega`` and ``I = int_Gamma h omega_{inf+ inf-}``.

    Returns
    -------
    u : complex
        Purely imaginary up to quadrature error.
    I : float
        Real part of ``I`` (its imaginary part is quadrature noise and is
        added to the returned error).
    err : float
    """
    r1 = _integrate_gamma(g, lambda k, y: h_of_k(params, k) / y, tol / max(1.0, abs(g.A)))
    r2 = _integrate_gamma(g, lambda k, y: h_of_k(params, k) * k / y, tol)
    u = g.A * r1.value
    I = -r2.value + g.a_k * u
    err = abs(g.A) * r1.error_estimate + r2.error_estimate + abs(u.real) + abs(I.imag)
    return complex(0.0, u.imag), I.real, err


def _logQ(v, g: SurfaceGeometry):
    B = g.B
    terms = []
    for shift, sgn in ((g.phi_inf, 1), (g.psi_inf, 1), (0.0, -1), (g.chi, -1)):
        lf, th = log_theta(v + shift, B)
        terms.append((lf, th, sgn))
    logmag = sum(sgn * lf for lf, _, sgn in terms)
    val = 1.0 + 0j
    for _, th, sgn in terms:
        val = val * th if sgn > 0 else val / th
    return logmag, val


def _Q(v, g):
    lm, val = _logQ(v, g)
    return complex(np.exp(lm) * val)


def _theta(v, B):
    lf, th = log_theta(v, B)
    return complex(np.exp(lf) * th)


def _validate(ctx: SolutionContext, z: complex):
    z = complex(z)
    if z.real < 0:
        raise ValueError("rho must be non-negative")
    if abs(z - ctx.params.rho0) < RIM_EXCLUSION * ctx.params.rho0:
        raise RimPoint(f"z={z} is at the rim of the disk; only a continuous extension exists")
    return z


def ernst_f(ctx: SolutionContext, z: complex) -> complex:
    """Ernst potential ``f(z)`` for ``zeta >= 0`` from the theta-function formula.

    Raises
    ------
    DegenerateSurfaceError
        If ``rho`` is below the axis threshold (use :func:`field_sample`).
    """
    z = _validate(ctx, z)
    d = ctx.point(z)
    g = d.geom
    return theta_ratio_reduced(d.u - g.phi_inf, d.u + g.phi_inf, g.B) * math.exp(d.I)


def _e2U_a(ctx: SolutionContext, z: complex):
    z = _validate(ctx, z)
    d = ctx.point(z)
    g, u, I = d.geom, d.u, d.I
    Q0 = _Q(0.0, g)
    Qu = _Q(u, g)
    e2U = Q0 * math.exp(I) / Qu
    l1, t1 = log_theta(u + g.phi_inf + g.psi_inf, g.B)
    l2, t2 = log_theta(u + g.chi, g.B)
    ratio = complex(np.exp(l1 - l2) * t1 / t2)
    a = ctx.params.a0 - (g.rho / Q0) * (ratio / Q0 - Qu) * math.exp(-I)
    return e2U, a


def metric_e2U(ctx: SolutionContext, z: complex) -> float:
    """``e^{2U} = Q(0) e^I / Q(u)``."""
    return _e2U_a(ctx, z)[0].real


def metric_a(ctx: SolutionContext, z: complex) -> float:
    """Frame-dragging potential ``a``."""
    return _e2U_a(ctx, z)[1].real


# ---------------------------------------------------------------------------
# regularized double integrals

def _divided_differences(coeffs: np.ndarray, x1, x2):
    """``P[x1, x2]`` and ``P[x1, x1, x2]`` by two rounds of synthetic division."""
    q_top = np.zeros(np.broadcast(x1, x2).shape, dtype=complex) + coeffs[0]
    # q(x) = (P(x) - P(x1)) / (x - x1): Horner coefficients b_j
    bs = [q_top]
    for a in coeffs[1:-1]:
        bs.append(bs[-1] * x1 + a)
    q2 = bs[0]
    for b in bs[1:]:
        q2 = q2 * x2 + b          # q(x2) = P[x1, x2]
    # r(x) = (q(x) - q(x1)) / (x - x1)
    cs = [bs[0]]
    for b in bs[1:-1]:
        cs.append(cs[-1] * x1 + b)
    r2 = cs[0]
    for cc in cs[1:]:
        r2 = r2 * x2 + cc         # r(x2) = P[x1, x1, x2]
    return q2, r2


def _kernel(y1, dy1, y2, dP1, coeffs, k1, k2):
    """``(y1 + y1' (k2 - k1) - y2) / ((k2 - k1)**2 y2)`` without cancellation.

    With ``Q = P[k1, k2]`` and ``Q2 = P[k1, k1, k2]`` for the polynomial
    ``P = y**2`` the kernel equals
    ``(P'(k1) Q / (y1 + y2) - 2 y1 Q2) / (2 y1 y2 (y1 + y2))``, an algebraic
    identity that is well conditioned when ``y2`` is close to ``y1``.  The
    direct quotient is used when ``y2`` is closer to ``-y1``.
    """
    delta = k2 - k1
    ssum = y1 + y2
    stable = np.abs(ssum) >= np.abs(y1 - y2)
    Q, Q2 = _divided_differences(coeffs, k1, k2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (dP1 * Q / ssum - 2.0 * y1 * Q2) / (2.0 * y1 * y2 * ssum)
        b = (y1 + dy1 * delta - y2) / (delta * delta * y2)
    return np.where(stable, a, b)


def _double_integral(nodes, weights, hvals, yfun, dyfun, coeffs, dpoly, chunk: int = 400):
    """``int int h1 h2 K(k1, k2) dk2 dk1`` on a tensor product of the rule."""
    y = yfun(nodes)
    dy = dyfun(nodes)
    dP = dpoly(nodes)
    wh = weights * hvals
    total = 0.0 + 0.0j
    for s in range(0, nodes.size, chunk):
        sl = slice(s, s + chunk)
        k1 = nodes[sl, None]
        K = _kernel(y[sl, None], dy[sl, None], y[None, :], dP[sl, None], coeffs, k1, nodes[None, :])
        total += np.sum(wh[sl, None] * (K @ wh[:, None]))
    return total


#: Panels of the tensor-product rules are adapted at this tolerance (or the
#: context tolerance if looser); finer rules stall on rounding noise near the
#: branch points without changing the double integrals.
RULE_TOL = 1e-10


def _adapt_target(params: DiskParams, root):
    # h / root is odd along Gamma whenever root is even, and the Kronrod error
    # estimate of an odd integrand on a symmetric panel vanishes; mixing in an
    # even part keeps the refinement honest.
    return lambda k: h_of_k(params, k) * (1.0 - 1j * np.asarray(k) / params.rho0) / root(k)


def _gamma_rule(g: SurfaceGeometry, params: DiskParams, tol: float, refine: int):
    verts, sing = gamma_path(g)
    return panel_rule(_adapt_target(params, g.y), verts, max(tol, RULE_TOL), singular=sing,
                      refine=refine)


def _lreg_parts(g: SurfaceGeometry, params: DiskParams, tol: float, refine: int):
    nodes, weights = _gamma_rule(g, params, tol, refine)
    hv = h_of_k(params, nodes)
    coeffs = g.poly_coefficients().astype(complex)
    dcoeffs = np.polyder(coeffs)
    T1 = _double_integral(nodes, weights, hv, g.y, g.dy, coeffs, lambda k: np.polyval(dcoeffs, k))
    # a-period correction: G(k1) = 2 int_apath (y1' (k - k1) + y1) / ((k - k1)**2 y(k)) dk
    an, aw = panel_rule(lambda k: 1.0 / g.y(k), g.a_path, max(tol, RULE_TOL), singular=(0, -1),
                        refine=refine)
    ya = g.y(an)
    y1 = g.y(nodes)
    dy1 = g.dy(nodes)
    diff = an[None, :] - nodes[:, None]
    Gk = 2.0 * ((dy1[:, None] * diff + y1[:, None]) / (diff * diff * ya[None, :])) @ aw
    T2 = np.sum(weights * hv * Gk)
    u = g.A * np.sum(weights * hv / y1)
    return T1, T2, u


def L_reg(ctx: SolutionContext, z: complex, refine: int = 0) -> float:
    """Regularized double integral entering ``e^{2 kappa}``.

    ``Lreg = (T1 - T2 u) / 2`` where ``T1`` integrates ``h(k1) h(k2)`` against
    the kernel ``(y1' (k2-k1) + y1 - y2) / ((k2-k1)**2 y2)`` (regular on the
    diagonal) and ``T2`` is the a-period correction weighted by ``h``.
    """
    z = _validate(ctx, z)
    d = ctx.point(z)
    if refine == 0 and d.lreg is not None:
        return d.lreg
    g = d.geom
    if g.collided and g.rho < ctx.params.rho0:
        val = _lreg_disk_face(ctx, g, refine)
    else:
        T1, T2, u = _lreg_parts(g, ctx.params, ctx.tol, refine)
        val = 0.5 * (T1 - T2 * u)
    if refine == 0:
        d.lreg = val.real
    return val.real


def _deformed_inner(k1, side: str, radius: float, r0: float, f, tol: float):
    """Inner integral along Gamma with a semicircular detour around ``k1``."""
    lo, hi = k1 - 1j * radius, k1 + 1j * radius
    a = integrate(f, [complex(0, -r0), lo], tol).value if lo.imag > -r0 else 0.0
    b = integrate(f, [hi, complex(0, r0)], tol).value if hi.imag < r0 else 0.0
    # Going upward: the left side is Re < 0, reached counter-clockwise from -pi/2.
    if side == "left":
        arc = integrate_arc(f, k1, radius, -math.pi / 2, -3 * math.pi / 2, tol).value
    else:
        arc = integrate_arc(f, k1, radius, -math.pi / 2, math.pi / 2, tol).value
    return a + arc + b


#: Offset used to reach the upper face of the disk as a one-sided limit.
DISK_FACE_OFFSET = 1e-8


def _lreg_disk_face(ctx: SolutionContext, g: SurfaceGeometry, refine: int) -> complex:
    """``Lreg`` on the upper face of the disk as the limit ``zeta -> +0``.

    With the branch points ``+-i rho`` on the contour, the double integral
    taken at ``zeta = 0`` does not equal its one-sided limit: for small
    ``zeta`` an ``O(1)`` share of it concentrates within ``O(zeta)`` of the
    branch points.  ``Lreg`` is linear in ``zeta`` near the disk, so two
    evaluations at ``delta`` and ``2 delta`` give the limit to ``O(delta**2)``.
    """
    delta = DISK_FACE_OFFSET * ctx.params.rho0
    vals = []
    for h in (delta, 2.0 * delta):
        gh = build_geometry(ctx.params, complex(g.rho, h), ctx.tol)
        T1, T2, u = _lreg_parts(gh, ctx.params, ctx.tol, refine)
        vals.append(0.5 * (T1 - T2 * u))
    return 2.0 * vals[0] - vals[1]


def L_reg_deformed(ctx: SolutionContext, z: complex, side: str, radius: float = 1e-4,
                   n_outer: int = 48) -> float:
    """``Lreg`` with the inner contour detouring around the diagonal on one side.

    Used as an independent check of the regularity of the kernel.  The outer
    integral uses ``n_outer`` Gauss-Legendre nodes in each half of Gamma; the
    detour is a semicircle of the given radius.
    """
    z = _validate(ctx, z)
    d = ctx.point(z)
    g, params, tol = d.geom, ctx.params, ctx.tol
    if not (g.rho >= params.rho0 or g.zeta > 0.2):
        raise ValueError("the deformed check is implemented away from the disk surface")
    r0 = params.rho0
    coeffs = g.poly_coefficients().astype(complex)
    dcoeffs = np.polyder(coeffs)
    x, w = np.polynomial.legendre.leggauss(n_outer)
    ts = np.concatenate([(x - 1) * r0 / 2, (x + 1) * r0 / 2])
    ws = np.concatenate([w, w]) * r0 / 2
    total = 0.0 + 0.0j
    for t, wt in zip(ts, ws):
        k1 = complex(0, t)
        y1 = complex(g.y(k1))
        dy1 = complex(g.dy(k1))
        dP1 = complex(np.polyval(dcoeffs, k1))

        def f(k2, k1=k1, y1=y1, dy1=dy1, dP1=dP1):
            return h_of_k(params, k2) * _kernel(y1, dy1, g.y(k2), dP1, coeffs, k1, k2)

        inner = _deformed_inner(k1, side, radius, r0, f, tol)
        total += 1j * wt * complex(h_of_k(params, k1)) * inner
    _, T2, u = _lreg_parts(g, params, tol, 0)
    return (0.5 * (total - T2 * u)).real


def _mu_parts(params: DiskParams):
    c = params.c
    coeffs = np.array([1.0, 0.0, c * c], dtype=complex)
    mu = lambda k: mu_upper(k, params)
    dmu = lambda k: mu_upper(k, params) * np.asarray(k) / (np.asarray(k) ** 2 + c * c)
    dpoly = lambda k: 2.0 * np.asarray(k)
    return coeffs, mu, dmu, dpoly


def K0_constant(params: DiskParams, tol: float = 1e-12, refine: int = 0) -> float:
    """``K0 = exp(-T1'/2)`` where ``T1'`` is the kernel double integral on the genus-zero surface."""
    coeffs, mu, dmu, dpoly = _mu_parts(params)
    nodes, weights = panel_rule(_adapt_target(params, mu), params.gamma, max(tol, RULE_TOL),
                                refine=refine)
    hv = h_of_k(params, nodes)
    T1 = _double_integral(nodes, weights, hv, mu, dmu, coeffs, dpoly)
    return math.exp(-0.5 * T1.real)


def K0_deformed(params: DiskParams, side: str, radius: float = 1e-4, n_outer: int = 48,
                tol: float = 1e-12) -> float:
    """``K0`` with the inner contour detouring around the diagonal on one side."""
    coeffs, mu, dmu, dpoly = _mu_parts(params)
    r0 = params.rho0
    x, w = np.polynomial.legendre.leggauss(n_outer)
    ts = np.concatenate([(x - 1) * r0 / 2, (x + 1) * r0 / 2])
    ws = np.concatenate([w, w]) * r0 / 2
    total = 0.0 + 0.0j
    for t, wt in zip(ts, ws):
        k1 = complex(0, t)
        m1, dm1, dP1 = complex(mu(k1)), complex(dmu(k1)), complex(dpoly(k1))

        def f(k2, k1=k1, m1=m1, dm1=dm1, dP1=dP1):
            return h_of_k(params, k2) * _kernel(m1, dm1, mu(k2), dP1, coeffs, k1, k2)

        inner = _deformed_inner(k1, side, radius, r0, f, tol)
        total += 1j * wt * complex(h_of_k(params, k1)) * inner
    return math.exp(-0.5 * total.real)


def metric_e2kappa(ctx: SolutionContext, z: complex) -> float:
    """``e^{2 kappa} = K0 Theta(u) Theta(u + chi) / (Theta(0) Theta(chi)) e^{Lreg}``."""
    z = _validate(ctx, z)
    d = ctx.point(z)
    g = d.geom
    l1, t1 = log_theta(d.u, g.B)
    l2, t2 = log_theta(d.u + g.chi, g.B)
    l3, t3 = log_theta(0.0, g.B)
    l4, t4 = log_theta(g.chi, g.B)
    ratio = np.exp(l1 + l2 - l3 - l4) * t1 * t2 / (t3 * t4)
    return (ctx.K0 * complex(ratio) * math.exp(L_reg(ctx, z))).real


# ---------------------------------------------------------------------------
# co-rotating frame

def corotating(ctx: SolutionContext, z: complex):
    """Co-rotating ``e^{2 U_Omega}`` and ``a_Omega`` at ``z``.

    ``e^{2U_Omega} = e^{2U} ((1 + Omega a)**2 - Omega**2 rho**2 e^{-4U})`` and
    ``(1 - Omega a_Omega) e^{2U_Omega} = (1 + Omega a) e^{2U}``.

    Returns
    -------
    e2U_omega, a_omega : float
        ``e2U_omega <= 0`` is returned as is; it signals a co-rotating
        ergoregion and is not treated as an error here.
    """
    z = complex(z)
    om = ctx.params.omega
    s = field_sample(ctx, z.real, z.imag, with_kappa=False)
    e2U, a, rho = s.e2U, s.a, z.real
    e2UO = e2U * ((1.0 + om * a) ** 2 - om * om * rho * rho / (e2U * e2U))
    if e2UO <= 0:
        warnings.warn(f"e^(2U_Omega) = {e2UO:.3g} <= 0 at z={z}", NegativeCorotatingNorm,
                      stacklevel=2)
    aO = (1.0 - (1.0 + om * a) * e2U / e2UO) / om if e2UO != 0 else float("nan")
    return e2UO, aO


def corotating_b(ctx: SolutionContext, rho: float, zeta: float, n: int = 24,
                 step: float = 1e-4) -> float:
    """Imaginary part ``b_Omega`` of the co-rotating Ernst potential.

    Integrates ``d b_Omega / d rho = -e^{4U_Omega} (d a_Omega / d zeta) / rho``
    along ``rho`` at fixed ``zeta > 0``, starting on the axis where
    ``b_Omega(0, zeta) = b(0, zeta) - 2 Omega zeta``.  The ``zeta``-derivative
    uses a central difference of width ``2 step``; the segment below the axis
    threshold is added with the trapezoid rule because the integrand vanishes
    linearly there.
    """
    if zeta <= 0:
        raise ValueError("corotating_b expects zeta > 0")
    params = ctx.params
    b_axis = axis_f(params, zeta, ctx.tol).imag - 2.0 * params.omega * zeta
    r_lo = RHO_AXIS_FACTOR * params.rho0

    def integrand(r):
        e2UO, _ = corotating(ctx, complex(r, zeta))
        _, ap = corotating(ctx, complex(r, zeta + step))
        _, am = corotating(ctx, complex(r, zeta - step))
        return -(e2UO ** 2) * (ap - am) / (2.0 * step) / r

    x, w = np.polynomial.legendre.leggauss(n)
    rs = r_lo + (rho - r_lo) * (x + 1) / 2
    total = sum(wi * integrand(ri) for wi, ri in zip(w, rs)) * (rho - r_lo) / 2
    total += 0.5 * r_lo * integrand(r_lo)
    return b_axis + total


# ---------------------------------------------------------------------------
# dispatch

def field_sample(ctx: SolutionContext, rho: float, zeta: float, with_kappa: bool = True
                 ) -> FieldSample:
    """Evaluate all fields at ``(rho, zeta)`` in the closure of the exterior domain.

    * ``zeta < 0``: equatorial symmetry, ``f(rho, -zeta) = conj f(rho, zeta)``;
      ``e^{2U}``, ``a`` and ``e^{2 kappa}`` are even in ``zeta``.
    * ``rho`` below the axis threshold: closed-form axis values with
      ``a = 0`` and ``e^{2 kappa} = 1``.
    * ``zeta = 0``, ``rho < rho0``: the upper face of the disk.
    * The rim point raises :class:`RimPoint`.
    """
    rho, zeta = float(rho), float(zeta)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    params = ctx.params
    if abs(complex(rho, zeta) - params.rho0) < RIM_EXCLUSION * params.rho0:
        raise RimPoint(f"({rho}, {zeta}) is at the rim of the disk")
    if zeta < 0:
        s = field_sample(ctx, rho, -zeta, with_kappa)
        return FieldSample(rho, zeta, s.f.conjugate(), s.e2U, s.a, s.e2kappa, s.err)
    if rho < RHO_AXIS_FACTOR * params.rho0:
        f = axis_f(params, zeta, ctx.tol)
        e2U = axis_e2U(params, zeta, ctx.tol)
        return FieldSample(rho, zeta, f, e2U, 0.0, 1.0, abs(e2U - f.real) + 1e-12)
    z = complex(rho, zeta)
    f = ernst_f(ctx, z)
    e2U_c, a_c = _e2U_a(ctx, z)
    d = ctx.point(z)
    # a carries the cancellation against a0 (see SolutionContext)
    err_a = 2.0 * math.pi * abs(params.a0) * d.err + 8.0 * _EPS * abs(params.a0)
    err = d.err + err_a + abs(e2U_c.imag) + abs(a_c.imag) + abs(f.real - e2U_c.real)
    e2k = metric_e2kappa(ctx, z) if with_kappa else float("nan")
    if rho < AXIS_BLEND_FACTOR * RHO_AXIS_FACTOR * params.rho0 and zeta > 0:
        gap = abs(f - axis_f(params, zeta, ctx.tol))
        if gap > err + 10.0 * (rho / params.rho0) ** 2:
            warnings.warn(f"theta and axis branches differ by {gap:.2e} at ({rho}, {zeta})",
                          AxisBlendWarning, stacklevel=2)
    return FieldSample(rho, zeta, f, e2U_c.real, a_c.real, e2k, err)
