"""The complex Hénon map f(x, y) = (x**2 + c - a*y, x) and its region setup.

Covers forward/backward iteration, the V+/V-/W partition of C^2, and the
selection of the region constants (r, alpha, beta, kappa, lam, epsilon)
that make the escaping-region estimates hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import DegenerateJacobian, InfeasibleConstants
from .jets import Jet
from .polydyn import (
    PolyParams,
    component_curves,
    disconnectedness_certificate,
    green_poly,
    level_curve,
)

_OVERFLOW = 1e300


class PointC2(NamedTuple):
    """A point of C^2."""

    x: complex
    y: complex


@dataclass(frozen=True)
class HenonParams:
    """Map parameters: quadratic constant c, Jacobian a, parameter radius R.

    a = 0 is allowed everywhere except inversion (the degenerate map
    collapses to x -> p(x) on the parabola x = p(y)).
    """

    c: complex
    a: complex
    R: float = 0.1

    def __post_init__(self):
        if not abs(self.a) < self.R:
            raise ValueError(f"|a|={abs(self.a):.4g} must be below R={self.R:.4g}")

    @property
    def poly(self) -> PolyParams:
        return PolyParams(self.c)


@dataclass(frozen=True)
class RegionConstants:
    """Derived constants of the escaping-region partition.

    r: escape-rate level strictly between G_p(0) and G_p(c), below 1.
    alpha: outer-region radius making the telescopic bounds hold.
    beta: 2 * max{|p(x)| : G_p(x) <= r}, the box height for cone checks.
    kappa: smallest |y| level at which every degenerate backward leaf is
        horizontal-like.
    lam: half-width of the thickened level annuli (lam < r/4).
    epsilon: |y| cut separating handles from the main component.
    """

    r: float
    alpha: float
    beta: float
    kappa: float
    lam: float
    epsilon: float


class RegionTag(Enum):
    VPLUS = "V+"
    VMINUS = "V-"
    W = "W"


def henon_forward(h: HenonParams, z: PointC2) -> PointC2:
    x, y = z
    return PointC2(x * x + h.c - h.a * y, x)


def henon_inverse(h: HenonParams, z: PointC2) -> PointC2:
    if h.a == 0:
        raise DegenerateJacobian("the map is not invertible at a = 0")
    x, y = z
    return PointC2(y, (y * y + h.c - x) / h.a)


def henon_forward_jet(h: HenonParams, x: Jet, y: Jet) -> tuple[Jet, Jet]:
    return x * x + h.c - h.a * y, x


def henon_inverse_jet(h: HenonParams, x: Jet, y: Jet) -> tuple[Jet, Jet]:
    if h.a == 0:
        raise DegenerateJacobian("the map is not invertible at a = 0")
    return y, (y * y + h.c - x) / h.a


def jacobian_forward(h: HenonParams, z: PointC2) -> np.ndarray:
    """Derivative matrix [[2x, -a], [1, 0]]; its determinant is a."""
    return np.array([[2.0 * z.x, -h.a], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class Orbit:
    points: list[PointC2]
    overflowed: bool


def orbit(h: HenonParams, z: PointC2, n: int) -> Orbit:
    """Orbit segment of length |n|+1; forward for n > 0, backward for n < 0.

    Truncates with the overflow flag set when a coordinate passes 1e300.
    """
    pts = [z]
    step = henon_forward if n >= 0 else henon_inverse
    for _ in range(abs(n)):
        z = step(h, z)
        if abs(z.x) > _OVERFLOW or abs(z.y) > _OVERFLOW:
            return Orbit(pts, overflowed=True)
        pts.append(z)
    return Orbit(pts, overflowed=False)


def classify_region(rc: RegionConstants, z: PointC2) -> RegionTag:
    """V+/V-/W partition tag; ties |x| = |y| above alpha go to V+."""
    ax, ay = abs(z.x), abs(z.y)
    if ax <= rc.alpha and ay <= rc.alpha:
        return RegionTag.W
    if ax >= ay:
        return RegionTag.VPLUS
    return RegionTag.VMINUS


def _alpha_predicate(c: complex, R: float, r: float, alpha: float) -> bool:
    # both telescopic bounds, checked on |y| = alpha (left sides decrease in |y|),
    # plus the escape-rate floor G+ > r on V+ via |phi+/x| > 1 - r
    eq1 = abs(c) / alpha**2 + (R + 1.0) / alpha < r
    eq2 = alpha**2 - abs(c) > (2.0 * R + 1.0) * alpha
    floor = math.log(alpha * (1.0 - r)) > r
    return eq1 and eq2 and floor


def select_constants(p: PolyParams, R: float, n_samples: int = 256) -> RegionConstants:
    """Region constants for the map family over the parameter disk of radius R.

    r is the midpoint of (G_p(0), G_p(c)); alpha comes from a doubling
    search until the telescopic bounds hold on |y| = alpha; beta and
    kappa are measured on escape-rate level curves.
    """
    g0 = disconnectedness_certificate(p)
    gc = green_poly(p, p.c).value
    if not (0.0 < g0 < gc):
        raise InfeasibleConstants(f"need 0 < G_p(0) < G_p(c), got {g0:.4g}, {gc:.4g}")
    r = 0.5 * (g0 + gc)
    if r >= 1.0:
        raise InfeasibleConstants(f"midpoint level r={r:.4g} is not below 1")
    alpha = max(abs(p.c), 2.0 * R + 2.0)
    while not _alpha_predicate(p.c, R, r, alpha):
        alpha *= 2.0
        if alpha > 1e9:
            raise InfeasibleConstants("no admissible alpha below 1e9")
    # beta = 2 max{|p(x)| : G_p(x) <= r} = 2 max{|w| : G_p(w) <= 2r}, the
    # maximum sits on the level curve {G_p = 2r}
    beta = 2.0 * float(np.max(np.abs(level_curve(p, 2.0 * r, n_samples))))
    # horizontal-cone constant: C < min{2|x| : G_p(x) <= r/2}; the two
    # curves of that level bound the sublevel set away from 0
    half_curves = component_curves(p, r, 1, n_samples)
    min_abs = min(float(np.min(np.abs(cv))) for cv in half_curves.values())
    cone_c = 0.95 * 2.0 * min_abs
    # degenerate backward leaves x = p(y) - w have slope |dx/dy| = 2|y|;
    # they are horizontal-like above |y| = cone_c / 2
    kappa = 0.55 * cone_c
    return RegionConstants(
        r=r,
        alpha=alpha,
        beta=beta,
        kappa=kappa,
        lam=r / 8.0,
        epsilon=kappa / 10.0,
    )


def default_setup(c: complex = -3.0, a: complex = 1e-3, R: float = 0.1) -> tuple[HenonParams, RegionConstants]:
    """Convenience constructor for the standard worked instance."""
    h = HenonParams(complex(c), complex(a), R)
    return h, select_constants(h.poly, R)
