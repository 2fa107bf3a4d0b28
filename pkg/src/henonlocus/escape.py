"""Escape-rate (Green) functions for forward and backward Hénon iteration.

G+ measures forward escape, G- backward escape (the latter normalized so
that (G- - log|a|) doubles under one backward step).  Both are evaluated
through the Böttcher coordinates once the orbit reaches the outer
regions, so the functional equations hold to the telescoping tolerance.
"""

from __future__ import annotations

import math

import numpy as np

from .bottcher import phi_minus_value_raw, phi_plus_value_raw
from .errors import DegenerateJacobian
from .henon import HenonParams, PointC2, RegionConstants, RegionTag, classify_region
from .polydyn import EscapeValue, PolyParams

__all__ = [
    "EscapeValue",
    "green_plus",
    "green_minus",
    "green_minus_degenerate",
    "green_plus_grid",
    "green_minus_grid",
]


def green_plus(
    h: HenonParams,
    rc: RegionConstants,
    z: PointC2,
    tol: float = 1e-11,
    max_iter: int = 200,
) -> EscapeValue:
    """Forward escape rate G+(z) = lim 2**-n log|f**n(z)|.

    Once the orbit enters V+ the value is 2**-n log|phi_plus(f**n z)|,
    which makes G+(f z) = 2 G+(z) hold exactly up to the telescoping
    tolerance.  Orbits that stay outside V+ for ``max_iter`` steps get
    value 0 with the escaped flag unset (bounded-orbit proxy).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = complex(z.x), complex(z.y)
    for n in range(max_iter + 1):
        if classify_region(rc, PointC2(x, y)) is RegionTag.VPLUS:
            phi = phi_plus_value_raw(h, x, y, tol)
            return EscapeValue(math.ldexp(math.log(abs(phi)), -n), n, True, True)
        x, y = x * x + h.c - h.a * y, x
    return EscapeValue(0.0, max_iter, converged=False, escaped=False)


def green_minus(
    h: HenonParams,
    rc: RegionConstants,
    z: PointC2,
    tol: float = 1e-11,
    max_iter: int = 200,
) -> EscapeValue:
    """Backward escape rate, satisfying (G- - log|a|) o f**-1 = 2 (G- - log|a|).

    Evaluated as log|a| + 2**-n (log|phi_minus(f**-n z)| - log|a|) at the
    first backward iterate inside V-.
    """
    if h.a == 0:
        raise DegenerateJacobian("use green_minus_degenerate at a = 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    la = math.log(abs(h.a))
    x, y = complex(z.x), complex(z.y)
    for n in range(max_iter + 1):
        if classify_region(rc, PointC2(x, y)) is RegionTag.VMINUS:
            phi = phi_minus_value_raw(h, x, y, tol)
            return EscapeValue(la + math.ldexp(math.log(abs(phi)) - la, -n), n, True, True)
        x, y = y, (y * y + h.c - x) / h.a
        if abs(y) > 1e140:
            # deep in V- already; one more classify pass will terminate
            continue
    return EscapeValue(0.0, max_iter, converged=False, escaped=False)


def green_minus_degenerate(p: PolyParams, z: PointC2) -> EscapeValue:
    """The a = 0 limit of G-: (1/2) log|p(y) - x|, -inf on the parabola."""
    u = z.y * z.y + p.c - z.x
    if u == 0:
        return EscapeValue(-math.inf, 0, True, True)
    return EscapeValue(0.5 * math.log(abs(u)), 0, True, True)


def green_plus_grid(
    h: HenonParams,
    xs: np.ndarray,
    ys: np.ndarray,
    max_iter: int = 200,
    big: float = 1e8,
) -> np.ndarray:
    """Vectorized G+ over matching arrays of coordinates (0 where bounded).

    Records 2**-n log|x_n| at the first crossing of ``big``; the
    neglected telescoping tail is below |a| * big**-1 there.
    """
    x = np.asarray(xs, dtype=complex).copy()
    y = np.asarray(ys, dtype=complex).copy()
    out = np.zeros(x.shape, dtype=float)
    alive = np.ones(x.shape, dtype=bool)
    for n in range(max_iter + 1):
        ax = np.abs(x)
        done = alive & (ax > big) & (ax > np.abs(y))
        if done.any():
            out[done] = np.log(ax[done]) * 2.0 ** (-n)
            alive &= ~done
        if not alive.any():
            break
        xa, ya = x[alive], y[alive]
        x[alive], y[alive] = xa * xa + h.c - h.a * ya, xa
    return out


def green_minus_grid(
    h: HenonParams,
    xs: np.ndarray,
    ys: np.ndarray,
    max_iter: int = 200,
    big: float = 1e8,
) -> np.ndarray:
    """Vectorized G- over matching coordinate arrays (0 where bounded backward)."""
    if h.a == 0:
        raise DegenerateJacobian("use green_minus_degenerate at a = 0")
    la = math.log(abs(h.a))
    x = np.asarray(xs, dtype=complex).copy()
    y = np.asarray(ys, dtype=complex).copy()
    out = np.zeros(x.shape, dtype=float)
    alive = np.ones(x.shape, dtype=bool)
    for n in range(max_iter + 1):
        ay = np.abs(y)
        done = alive & (ay > big) & (ay > np.abs(x))
        if done.any():
            out[done] = la + (np.log(ay[done]) - la) * 2.0 ** (-n)
            alive &= ~done
        if not alive.any():
            break
        xa, ya = x[alive], y[alive]
        x[alive], y[alive] = ya, (ya * ya + h.c - xa) / h.a
    return out
