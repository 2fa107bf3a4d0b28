"""The tangency function w and critical-locus location and tracing.

The critical locus is the set of tangencies between the forward and
backward level-set foliations.  It is cut out by the determinant

    w = (d/dx log PHI+) (d/dy log PHI-) - (d/dy log PHI+) (d/dx log PHI-)

of the log-gradient rows of the two extended Böttcher coordinates.  The
zero set is independent of the extension depths (raising a depth rescales
a row by a nonvanishing factor), so depths are always taken minimal and
only zero sets are compared across depths.

Charts: the standard (x, y) chart, the chart t = 1/x at the line at
infinity, and the parabola blow-up chart (u, y, v) = (p(y) - x, y, a/u).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .bottcher import (
    _telescope_minus,
    _telescope_plus,
    min_depth_minus,
    min_depth_plus,
    phi_minus_jet_raw,
    phi_plus_jet_raw,
)
from .errors import (
    BranchFailure,
    DegenerateJacobian,
    DepthTooLarge,
    IllConditioned,
    NoComponentFound,
    NoConvergence,
    SingularPoint,
    StepCollapse,
)
from .henon import HenonParams, PointC2, RegionConstants
from .jets import Jet, seed_x, seed_y
from .polydyn import (
    PolyParams,
    PreimageAddress,
    bottcher_poly,
    preimages_of_zero,
    root_of_address,
)


class ChartTag(Enum):
    STANDARD = "standard"      # (x, y)
    INFINITY = "infinity"      # (t, y) with t = 1/x
    BLOWUP = "blowup"          # (u, y) with u = p(y) - x, v = a/u implied


@dataclass(frozen=True)
class TangencyValue:
    """Value of w with finite-difference gradient and the depths used."""

    w: complex
    grad_w: Optional[tuple[complex, complex]]
    depths: tuple[int, int]


@dataclass
class TracedCurve:
    """Ordered locus samples with chart tags and per-sample residuals."""

    samples: list[tuple[PointC2, ChartTag]]
    closed: bool
    residuals: list[float]
    label: str = ""
    aux: dict = field(default_factory=dict)

    @property
    def points(self) -> list[PointC2]:
        return [s for s, _ in self.samples]


@dataclass(frozen=True)
class LocusSeed:
    point: PointC2
    provenance: str = "Manual"
    address: Optional[PreimageAddress] = None


@dataclass(frozen=True)
class DegenerateComponent:
    """One component of the a = 0 critical locus."""

    kind: str                      # "horizontal" (y = 0) or "vertical" (x = root)
    address: Optional[PreimageAddress]
    root: Optional[complex]
    excluded: str


def _w_from_jets(jp: Jet, jm: Jet) -> complex:
    gpx, gpy = jp.dx / jp.val, jp.dy / jp.val
    gmx, gmy = jm.dx / jm.val, jm.dy / jm.val
    return gpx * gmy - gpy * gmx


def _jets_at_depths(
    h: HenonParams, z: PointC2, n_plus: int, n_minus: int, tol: float
) -> tuple[Jet, Jet]:
    """Böttcher jets of both extensions at prescribed depths (no domain check)."""
    xj, yj = seed_x(z.x), seed_y(z.y)
    for _ in range(n_plus):
        xj, yj = xj * xj + h.c - h.a * yj, xj
    jp, _ = _telescope_plus(h, xj, yj, tol)
    xj, yj = seed_x(z.x), seed_y(z.y)
    if h.a == 0:
        jm = yj * yj + h.c - xj
        if jm.val == 0:
            raise BranchFailure("degenerate backward coordinate vanishes on p(y) = x")
    else:
        for _ in range(n_minus):
            xj, yj = yj, (yj * yj + h.c - xj) / h.a
        jm, _ = _telescope_minus(h, xj, yj, tol)
    return jp, jm


def w_at_depths(h: HenonParams, z: PointC2, n_plus: int, n_minus: int, tol: float = 1e-12) -> complex:
    """w evaluated with both extension depths pinned.

    Pinning keeps finite-difference stencils on one analytic branch;
    minimal depths can jump across stencil points otherwise.
    """
    jp, jm = _jets_at_depths(h, z, n_plus, n_minus, tol)
    return _w_from_jets(jp, jm)


def tangency_depths(
    h: HenonParams, rc: RegionConstants, z: PointC2, max_depth: int = 24
) -> tuple[int, int]:
    n_plus = min_depth_plus(h, rc, z, max_depth)
    n_minus = 0 if h.a == 0 else min_depth_minus(h, rc, z, max_depth)
    return n_plus, n_minus


def grad_w_fd(
    h: HenonParams,
    z: PointC2,
    depths: tuple[int, int],
    tol: float = 1e-12,
    fd_step: float = 1e-6,
) -> tuple[complex, complex]:
    """Central finite differences of w at pinned depths."""
    hx = fd_step * max(1.0, abs(z.x))
    hy = fd_step * max(1.0, abs(z.y))
    wx = (
        w_at_depths(h, PointC2(z.x + hx, z.y), *depths, tol)
        - w_at_depths(h, PointC2(z.x - hx, z.y), *depths, tol)
    ) / (2.0 * hx)
    wy = (
        w_at_depths(h, PointC2(z.x, z.y + hy), *depths, tol)
        - w_at_depths(h, PointC2(z.x, z.y - hy), *depths, tol)
    ) / (2.0 * hy)
    return wx, wy


def tangency_w(
    h: HenonParams,
    rc: RegionConstants,
    z: PointC2,
    tol: float = 1e-12,
    with_grad: bool = True,
    max_depth: int = 24,
) -> TangencyValue:
    """w at z using the minimal extension depths.

    Raises the ext-domain errors when either coordinate cannot be
    extended to z.
    """
    depths = tangency_depths(h, rc, z, max_depth)
    w = w_at_depths(h, z, *depths, tol)
    grad = grad_w_fd(h, z, depths, tol) if with_grad else None
    return TangencyValue(w, grad, depths)


def degenerate_locus(
    p: PolyParams, rc: RegionConstants, k_max: int
) -> list[DegenerateComponent]:
    """Components of the a = 0 locus: the line y = 0 and x = p**-k(0) lines.

    The horizontal line excludes the bounded-orbit set of p and the
    point x = c where it crosses the parabola.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    out = [
        DegenerateComponent(
            "horizontal", None, None, excluded="x in K_p; the point x = c on the parabola"
        )
    ]
    for k in range(k_max + 1):
        for addr, root in sorted(preimages_of_zero(p, k).items(), key=lambda kv: kv[0].bits):
            out.append(
                DegenerateComponent("vertical", addr, root, excluded="|y| <= alpha window")
            )
    return out


def newton_refine(
    h: HenonParams,
    rc: RegionConstants,
    seed: LocusSeed | PointC2,
    fixed: str,
    tol: float = 1e-10,
    max_steps: int = 40,
    trust_radius: float = 1.0,
    cond_floor: float = 1e-8,
    phi_tol: float = 1e-12,
) -> PointC2:
    """Solve w = 0 in the non-fixed coordinate by damped Newton.

    ``fixed`` is "x" or "y".  Raises :class:`IllConditioned` when the
    directional derivative falls under the conditioning floor (scaled by
    the local size of w over the trust region) and :class:`NoConvergence`
    when the iteration stalls or leaves the trust region.
    """
    if fixed not in ("x", "y"):
        raise ValueError("fixed must be 'x' or 'y'")
    z0 = seed.point if isinstance(seed, LocusSeed) else seed
    depths = tangency_depths(h, rc, z0)
    z = z0
    for _ in range(max_steps):
        w = w_at_depths(h, z, *depths, phi_tol)
        if abs(w) < tol:
            return z
        hstep = 1e-6 * max(1.0, abs(z.y) if fixed == "x" else abs(z.x))
        if fixed == "x":
            wp = w_at_depths(h, PointC2(z.x, z.y + hstep), *depths, phi_tol)
            wm = w_at_depths(h, PointC2(z.x, z.y - hstep), *depths, phi_tol)
        else:
            wp = w_at_depths(h, PointC2(z.x + hstep, z.y), *depths, phi_tol)
            wm = w_at_depths(h, PointC2(z.x - hstep, z.y), *depths, phi_tol)
        dw = (wp - wm) / (2.0 * hstep)
        wscale = max(abs(w), abs(wp), abs(wm), 1e-300)
        if abs(dw) < cond_floor * wscale / trust_radius:
            raise IllConditioned(f"|dw| = {abs(dw):.3g} below the conditioning floor at {z}")
        delta = -w / dw
        z = PointC2(z.x, z.y + delta) if fixed == "x" else PointC2(z.x + delta, z.y)
        if abs(z.x - z0.x) + abs(z.y - z0.y) > trust_radius:
            raise NoConvergence(f"Newton left the trust region of {z0}")
    raise NoConvergence(f"Newton did not reach |w| < {tol:.2g} from {z0}")


def trace_locus(
    h: HenonParams,
    rc: RegionConstants,
    start: PointC2,
    chart: ChartTag = ChartTag.STANDARD,
    step: float = 0.05,
    bounds: Optional[Callable[[PointC2], bool]] = None,
    tol: float = 1e-10,
    max_samples: int = 2000,
    min_step: float = 1e-7,
    grad_floor: float = 1e-12,
    phi_tol: float = 1e-12,
) -> TracedCurve:
    """Predictor-corrector trace of a real path on the locus surface.

    The predictor follows the complex kernel direction of (w_x, w_y)
    with the phase aligned to the previous step; the corrector solves
    w = 0 on the transverse complex line.  Terminates on leaving
    ``bounds``, on closing a loop (within step/2 of the start with
    direction agreement above cos 30 deg), or at the sample cap.
    """
    if chart is ChartTag.STANDARD:
        def _w(z: PointC2) -> complex:
            return w_at_depths(h, z, *tangency_depths(h, rc, z), phi_tol)

        def _w_pinned(z: PointC2, ref: PointC2):
            d = tangency_depths(h, rc, ref)
            return lambda q: w_at_depths(h, q, *d, phi_tol)
    elif chart is ChartTag.INFINITY:
        def _w(z: PointC2) -> complex:
            return tangency_w_infinity(h, rc, z.x, z.y, phi_tol)

        def _w_pinned(z: PointC2, ref: PointC2):
            return lambda q: tangency_w_infinity(h, rc, q.x, q.y, phi_tol)
    else:
        raise ValueError("trace_locus supports the standard and infinity charts")

    def _grad(fn, z: PointC2) -> tuple[complex, complex]:
        hx = 1e-6 * max(1.0, abs(z.x))
        hy = 1e-6 * max(1.0, abs(z.y))
        wx = (fn(PointC2(z.x + hx, z.y)) - fn(PointC2(z.x - hx, z.y))) / (2 * hx)
        wy = (fn(PointC2(z.x, z.y + hy)) - fn(PointC2(z.x, z.y - hy))) / (2 * hy)
        return wx, wy

    z = start
    w0 = _w(z)
    if abs(w0) > tol:
        raise NoConvergence(f"start point has |w| = {abs(w0):.3g} > tol")
    samples: list[tuple[PointC2, ChartTag]] = [(z, chart)]
    residuals = [abs(w0)]
    prev_dir: Optional[np.ndarray] = None
    first_dir: Optional[np.ndarray] = None
    cur_step = step
    closed = False
    while len(samples) < max_samples:
        fn = _w_pinned(z, z)
        wx, wy = _grad(fn, z)
        gnorm = math.hypot(abs(wx), abs(wy))
        if gnorm < grad_floor:
            raise SingularPoint(f"grad w below floor at {z}")
        tangent = np.array([-wy, wx]) / gnorm
        if prev_dir is not None:
            phase = np.vdot(prev_dir, tangent)
            if abs(phase) < 1e-12:
                raise SingularPoint(f"tangent direction degenerated at {z}")
            tangent = tangent * (phase.conjugate() / abs(phase))
        if first_dir is None:
            first_dir = tangent
        # predictor + transverse corrector, halving on failure
        while True:
            pred = PointC2(z.x + cur_step * tangent[0], z.y + cur_step * tangent[1])
            normal = np.array([wx, wy]).conjugate()
            normal = normal / math.hypot(abs(normal[0]), abs(normal[1]))
            try:
                znew = _corrector(fn, pred, normal, tol, cur_step)
                break
            except NoConvergence:
                cur_step *= 0.5
                if cur_step < min_step:
                    raise StepCollapse(f"step collapsed at {z}")
        if bounds is not None and not bounds(znew):
            samples.append((znew, chart))
            residuals.append(abs(_w(znew)))
            break
        if len(samples) > 5:
            d0 = abs(znew.x - start.x) + abs(znew.y - start.y)
            align = abs(np.vdot(first_dir, tangent))
            if d0 < cur_step / 2.0 and align > math.cos(math.radians(30.0)):
                closed = True
                break
        samples.append((znew, chart))
        residuals.append(abs(_w(znew)))
        prev_dir = tangent
        z = znew
        cur_step = min(cur_step * 1.3, step)
    return TracedCurve(samples, closed, residuals)


def _corrector(fn, pred: PointC2, normal: np.ndarray, tol: float, step: float) -> PointC2:
    """Newton for w = 0 along the complex line pred + s * normal."""
    s = 0j
    for _ in range(12):
        z = PointC2(pred.x + s * normal[0], pred.y + s * normal[1])
        w = fn(z)
        if abs(w) < tol:
            return z
        hs = 1e-6 * max(1.0, abs(s))
        dw = (
            fn(PointC2(pred.x + (s + hs) * normal[0], pred.y + (s + hs) * normal[1]))
            - fn(PointC2(pred.x + (s - hs) * normal[0], pred.y + (s - hs) * normal[1]))
        ) / (2 * hs)
        if dw == 0:
            raise NoConvergence("flat corrector direction")
        s -= w / dw
        if abs(s) > 2.0 * step:
            raise NoConvergence("corrector left the step neighborhood")
    raise NoConvergence("corrector stalled")


# ---------------------------------------------------------------------------
# chart at infinity (t = 1/x)
# ---------------------------------------------------------------------------

def tangency_w_infinity(
    h: HenonParams, rc: RegionConstants, t: complex, y: complex, tol: float = 1e-12
) -> complex:
    """Chart form of the tangency determinant near x = infinity.

    In the (t, y) chart the locus is cut out by the plain (non-log)
    determinant of the derivative rows of phi_plus and phi_minus**2,
    which stays finite and holomorphic across t = 0.  t = 0 itself is
    evaluated at a representable proxy value.
    """
    if h.a == 0:
        raise DegenerateJacobian("the infinity-chart locus needs a != 0")
    if t == 0:
        t = 1e-12
    x = 1.0 / t
    jp = phi_plus_jet_raw(h, x, y, tol)
    # phi_minus**2 = a * phi_minus(f^-1(x, y)); chain the jets through f^-1
    xj, yj = seed_x(x), seed_y(y)
    xb, yb = yj, (yj * yj + h.c - xj) / h.a
    jm, _ = _telescope_minus(h, xb, yb, tol)
    jm = jm * h.a
    return jp.dx * jm.dy - jp.dy * jm.dx


def locus_infinity_chart(
    h: HenonParams,
    rc: RegionConstants,
    y_window: float = 0.5,
    tol: float = 1e-10,
    n_rays: int = 8,
    n_radii: int = 12,
    fit_window: float = 1e-3,
) -> TracedCurve:
    """The locus component through (t, y) = (0, 0) as a graph y(t).

    Solves w-tilde(t, y(t)) = 0 by continuation outward along rays of t,
    for |t| < 1/alpha and |y| < y_window; fits the tangent ratio dy/dt
    at t = 0 (stored under ``aux["tangent"]``).
    """
    if h.a == 0:
        raise DegenerateJacobian("the infinity-chart locus needs a != 0")
    w00 = tangency_w_infinity(h, rc, 0.0, 0.0, tol)
    samples: list[tuple[PointC2, ChartTag]] = [(PointC2(0.0, 0.0), ChartTag.INFINITY)]
    residuals = [abs(w00)]
    t_max = 0.9 / rc.alpha
    fit_ts: list[complex] = []
    fit_ys: list[complex] = []
    for k in range(n_rays):
        phase = cmath.exp(2j * math.pi * k / n_rays)
        y = 0j
        for j in range(1, n_radii + 1):
            t = phase * t_max * (j / n_radii) ** 2
            y = _newton_y(lambda yy, tt=t: tangency_w_infinity(h, rc, tt, yy, tol), y, tol)
            if abs(y) > y_window:
                break
            samples.append((PointC2(t, y), ChartTag.INFINITY))
            residuals.append(abs(tangency_w_infinity(h, rc, t, y, tol)))
        # dedicated small-|t| samples for the tangent fit
        for frac in (0.5, 1.0):
            t = phase * fit_window * frac
            yf = _newton_y(lambda yy, tt=t: tangency_w_infinity(h, rc, tt, yy, tol), 0j, tol)
            fit_ts.append(t)
            fit_ys.append(yf)
    if len(samples) < 2:
        raise NoComponentFound("no graph y(t) found through (0, 0)")
    tangent = _fit_ratio(fit_ts, fit_ys)
    curve = TracedCurve(samples, closed=False, residuals=residuals, label="infinity-graph")
    curve.aux["tangent"] = tangent
    curve.aux["fit_points"] = list(zip(fit_ts, fit_ys))
    return curve


def _newton_y(fn, y0: complex, tol: float, max_steps: int = 40) -> complex:
    y = complex(y0)
    for _ in range(max_steps):
        w = fn(y)
        if abs(w) < tol:
            return y
        hs = 1e-7 * max(1.0, abs(y))
        dw = (fn(y + hs) - fn(y - hs)) / (2 * hs)
        if dw == 0:
            raise NoConvergence("flat Newton direction in y")
        y -= w / dw
        if abs(y) > 1e3:
            raise NoConvergence("y-iteration diverged")
    raise NoConvergence("y-iteration stalled")


def _fit_ratio(ts: list[complex], ys: list[complex]) -> complex:
    """Least-squares slope m of y ~ m t through the origin."""
    num = sum(complex(y) * complex(t).conjugate() for t, y in zip(ts, ys))
    den = sum(abs(complex(t)) ** 2 for t in ts)
    return num / den


# ---------------------------------------------------------------------------
# parabola blow-up chart (u, y, v) = (p(y) - x, y, a/u)
# ---------------------------------------------------------------------------

def tangency_w_blowup(
    h: HenonParams,
    rc: RegionConstants,
    u: complex,
    y: complex,
    v: Optional[complex] = None,
    tol: float = 1e-12,
) -> complex:
    """Chart form of the tangency determinant near the parabola p(y) = x.

    For u != 0, v is a/u and the chain rule through x = p(y) - u turns
    the plain determinant of (phi_plus, phi_minus**2) into

        u v phi+_x phi-_x + (phi+_x p'(y) + phi+_y) phi-_y

    with the phi_minus jets taken at (y, 1/v).  On the blow-up locus
    u = 0 the limit b_p'(p(y)) p'(y) is used, with v a free chart
    coordinate that drops out.
    """
    if u == 0:
        b = bottcher_poly(PolyParams(h.c), y * y + h.c, tol=tol)
        return b.d_dx * (2.0 * y)
    if v is None:
        if h.a == 0:
            raise DegenerateJacobian("v must be supplied when a = 0")
        v = h.a / u
    a = u * v
    ha = HenonParams(h.c, a, h.R) if a != h.a else h
    x = y * y + h.c - u
    jp = phi_plus_jet_raw(ha, x, y, tol)
    jm = phi_minus_jet_raw(ha, y, 1.0 / v, tol)
    return u * v * jp.dx * jm.dx + (jp.dx * 2.0 * y + jp.dy) * jm.dy


def locus_blowup_chart(
    h: HenonParams,
    rc: RegionConstants,
    xi_address: PreimageAddress = PreimageAddress(""),
    tol: float = 1e-10,
    n_theta: int = 64,
    n_radii: int = 6,
    u_outer: Optional[float] = None,
) -> TracedCurve:
    """Near-parabola continuation of the horizontal locus component.

    Traces the graph y(u) down to the tube radius |u| = |a| alpha around
    the parabola point with y close to the addressed root; only the
    empty address (y near 0) carries a crossing, other windows raise
    :class:`NoComponentFound` since w-tilde(0, y, v) has no zero there.
    """
    if h.a == 0:
        raise DegenerateJacobian("the blow-up continuation needs a != 0")
    y_center = root_of_address(PolyParams(h.c), xi_address)
    if xi_address.bits:
        raise NoComponentFound(
            f"no horizontal component crosses the tube near y = {y_center:.4g}; "
            "w-tilde(0, y, v) vanishes only at y = 0"
        )
    u_in = abs(h.a) * rc.alpha
    u_out = u_outer if u_outer is not None else max(10.0 * u_in, 0.25 * rc.kappa)
    samples: list[tuple[PointC2, ChartTag]] = []
    residuals: list[float] = []
    for k in range(n_theta):
        theta = 2.0 * math.pi * k / n_theta
        phase = cmath.exp(1j * theta)
        y = 0j
        for j in range(n_radii + 1):
            rad = u_out * (u_in / u_out) ** (j / n_radii)
            u = phase * rad
            y = _newton_y(lambda yy, uu=u: tangency_w_blowup(h, rc, uu, yy, tol=tol), y, tol)
            samples.append((PointC2(u, y), ChartTag.BLOWUP))
            residuals.append(abs(tangency_w_blowup(h, rc, u, y, tol=tol)))
    curve = TracedCurve(samples, closed=False, residuals=residuals, label="blowup-graph")
    curve.aux["u_inner"] = u_in
    curve.aux["u_outer"] = u_out
    return curve


def blowup_to_standard(h: HenonParams, chart_point: PointC2) -> PointC2:
    """Map a blow-up chart sample (u, y) back to standard coordinates."""
    u, y = chart_point
    return PointC2(y * y + h.c - u, y)
