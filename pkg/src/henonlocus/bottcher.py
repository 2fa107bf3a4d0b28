"""Böttcher coordinates of the Hénon map near infinity.

phi_plus semiconjugates the forward map to z -> z**2 on the outer region
V+; phi_minus semiconjugates the backward map to z -> z**2 / a on V-.
Both are telescopic products over the orbit with principal-branch logs;
their dynamical extensions phi^(2**n) cover everything that ever reaches
the outer regions.  Jets are propagated in forward mode through the
orbit recursion, because the tangency determinant downstream suffers
catastrophic cancellation under finite differences.
"""

from __future__ import annotations

import cmath
import math
from typing import Union

from .errors import (
    BranchFailure,
    DegenerateJacobian,
    NeverEntersVMinus,
    NeverEntersVPlus,
    OnDegenerateParabola,
    OutsideDomain,
)
from .henon import HenonParams, PointC2, RegionConstants, RegionTag, classify_region
from .jets import Jet, jexp, jlog, seed_x, seed_y
from .polydyn import BottcherJet

_HUGE = 1e100
_Num = Union[complex, Jet]


def sigma(k: int) -> int:
    """Exponent bookkeeping of the backward extension: 2**k - 1 for k >= 1, else 0."""
    return (1 << k) - 1 if k >= 1 else 0


def _val(v: _Num) -> complex:
    return v.val if isinstance(v, Jet) else v


def _log(v: _Num) -> _Num:
    return jlog(v) if isinstance(v, Jet) else cmath.log(v)


def _exp(v: _Num) -> _Num:
    return jexp(v) if isinstance(v, Jet) else cmath.exp(v)


def _telescope_plus(h: HenonParams, x: _Num, y: _Num, tol: float, max_terms: int = 80):
    """phi_plus = x * exp(sum 2**-n log(1 + s_n)), s_n = (c - a*y_{n-1}) / x_{n-1}**2.

    Returns (phi, tail_bound).  Converges whenever every |s_n| < 1,
    which the region constants guarantee on V+.
    """
    cur_x, cur_y = x, y
    total: _Num = 0j
    k = 0
    while True:
        s = (h.c - h.a * cur_y) / (cur_x * cur_x)
        if not abs(_val(s)) < 1.0:
            raise BranchFailure(
                f"forward telescopic factor |s_{k + 1}| = {abs(_val(s)):.3g} >= 1"
            )
        k += 1
        total = total + _log(1.0 + s) * 2.0 ** (-k)
        cur_x, cur_y = cur_x * cur_x + h.c - h.a * cur_y, cur_x
        ax = abs(_val(cur_x))
        if ax > _HUGE:
            tail = 0.0
            break
        q = (abs(h.c) + abs(h.a) * abs(_val(cur_y))) / (ax * ax)
        tail = math.ldexp(-math.log1p(-q), -k) if q < 1.0 else math.inf
        if tail < tol:
            break
        if k >= max_terms:
            raise BranchFailure(f"forward telescope did not converge in {max_terms} terms")
    return x * _exp(total), tail


def _telescope_minus(h: HenonParams, x: _Num, y: _Num, tol: float, max_terms: int = 80):
    """phi_minus = y * exp(sum 2**-n log(1 + s_n)) over the backward orbit.

    The factor is a*y_{-n} / y_{-(n-1)}**2 = 1 + s_n with
    s_n = (c - x_{-(n-1)}) / y_{-(n-1)}**2.
    """
    if h.a == 0:
        raise DegenerateJacobian("phi_minus requires a != 0")
    cur_x, cur_y = x, y
    total: _Num = 0j
    k = 0
    while True:
        s = (h.c - cur_x) / (cur_y * cur_y)
        if not abs(_val(s)) < 1.0:
            raise BranchFailure(
                f"backward telescopic factor |s_{k + 1}| = {abs(_val(s)):.3g} >= 1"
            )
        k += 1
        total = total + _log(1.0 + s) * 2.0 ** (-k)
        cur_x, cur_y = cur_y, (cur_y * cur_y + h.c - cur_x) / h.a
        ay = abs(_val(cur_y))
        if ay > _HUGE:
            tail = 0.0
            break
        q = (abs(h.c) + abs(_val(cur_x))) / (ay * ay)
        tail = math.ldexp(-math.log1p(-q), -k) if q < 1.0 else math.inf
        if tail < tol:
            break
        if k >= max_terms:
            raise BranchFailure(f"backward telescope did not converge in {max_terms} terms")
    return y * _exp(total), tail


def phi_plus(h: HenonParams, rc: RegionConstants, z: PointC2, tol: float = 1e-12) -> BottcherJet:
    """Forward Böttcher coordinate on V+, with analytic first partials."""
    if classify_region(rc, z) is not RegionTag.VPLUS:
        raise OutsideDomain(f"{z} is not in V+")
    phi, tail = _telescope_plus(h, seed_x(z.x), seed_y(z.y), tol)
    return BottcherJet(phi.val, phi.dx, phi.dy, depth=0, tail_bound=tail)


def phi_plus_ext(
    h: HenonParams, rc: RegionConstants, z: PointC2, tol: float = 1e-12, max_depth: int = 24
) -> BottcherJet:
    """Dynamical extension: phi_plus at the first forward iterate inside V+.

    The returned jet describes phi^(2**n) = phi_plus o f**n with the
    smallest admissible n (recorded as ``depth``); partials are chained
    through the orbit automatically.
    """
    xj, yj = seed_x(z.x), seed_y(z.y)
    for n in range(max_depth + 1):
        if classify_region(rc, PointC2(xj.val, yj.val)) is RegionTag.VPLUS:
            phi, tail = _telescope_plus(h, xj, yj, tol)
            return BottcherJet(phi.val, phi.dx, phi.dy, depth=n, tail_bound=tail)
        xj, yj = xj * xj + h.c - h.a * yj, xj
    raise NeverEntersVPlus(f"orbit of {z} stayed outside V+ for {max_depth} steps")


def phi_minus(h: HenonParams, rc: RegionConstants, z: PointC2, tol: float = 1e-12) -> BottcherJet:
    """Backward Böttcher coordinate on V-, with analytic first partials."""
    if h.a == 0:
        raise DegenerateJacobian("phi_minus requires a != 0")
    if classify_region(rc, z) is not RegionTag.VMINUS:
        raise OutsideDomain(f"{z} is not in V-")
    phi, tail = _telescope_minus(h, seed_x(z.x), seed_y(z.y), tol)
    return BottcherJet(phi.val, phi.dx, phi.dy, depth=0, tail_bound=tail)


def phi_minus_ext(
    h: HenonParams, rc: RegionConstants, z: PointC2, tol: float = 1e-12, max_depth: int = 24
) -> BottcherJet:
    """Backward extension a**sigma_n * phi_minus o f**-n, or its a = 0 limit.

    For a != 0 the smallest n with f**-n(z) in V- is used.  For a = 0
    the limit is (p(y) - x)**(2**(n-1)) with n = 1, i.e. just p(y) - x,
    undefined exactly on the parabola.
    """
    xj, yj = seed_x(z.x), seed_y(z.y)
    if h.a == 0:
        u = yj * yj + h.c - xj
        if u.val == 0:
            raise OnDegenerateParabola(f"{z} lies on p(y) = x")
        return BottcherJet(u.val, u.dx, u.dy, depth=1, tail_bound=0.0)
    for n in range(max_depth + 1):
        if classify_region(rc, PointC2(xj.val, yj.val)) is RegionTag.VMINUS:
            phi, tail = _telescope_minus(h, xj, yj, tol)
            scale = h.a ** sigma(n)
            return BottcherJet(scale * phi.val, scale * phi.dx, scale * phi.dy, depth=n, tail_bound=tail)
        xj, yj = yj, (yj * yj + h.c - xj) / h.a
    raise NeverEntersVMinus(f"backward orbit of {z} stayed outside V- for {max_depth} steps")


def min_depth_plus(h: HenonParams, rc: RegionConstants, z: PointC2, max_depth: int = 24) -> int:
    """Smallest n with f**n(z) in V+."""
    x, y = complex(z.x), complex(z.y)
    for n in range(max_depth + 1):
        if classify_region(rc, PointC2(x, y)) is RegionTag.VPLUS:
            return n
        x, y = x * x + h.c - h.a * y, x
    raise NeverEntersVPlus(f"orbit of {z} stayed outside V+ for {max_depth} steps")


def min_depth_minus(h: HenonParams, rc: RegionConstants, z: PointC2, max_depth: int = 24) -> int:
    """Smallest n with f**-n(z) in V- (a != 0)."""
    if h.a == 0:
        raise DegenerateJacobian("backward depth requires a != 0")
    x, y = complex(z.x), complex(z.y)
    for n in range(max_depth + 1):
        if classify_region(rc, PointC2(x, y)) is RegionTag.VMINUS:
            return n
        x, y = y, (y * y + h.c - x) / h.a
    raise NeverEntersVMinus(f"backward orbit of {z} stayed outside V- for {max_depth} steps")


def phi_plus_value_raw(h: HenonParams, x: complex, y: complex, tol: float = 1e-12) -> complex:
    """Scalar phi_plus without the V+ membership check.

    Converges anywhere the orbit keeps |s_n| < 1, which extends well
    beyond V+ (e.g. near the critical value of p); raises
    :class:`BranchFailure` otherwise.
    """
    phi, _ = _telescope_plus(h, complex(x), complex(y), tol)
    return phi


def phi_plus_jet_raw(h: HenonParams, x: complex, y: complex, tol: float = 1e-12) -> Jet:
    phi, _ = _telescope_plus(h, seed_x(x), seed_y(y), tol)
    return phi


def phi_minus_value_raw(h: HenonParams, x: complex, y: complex, tol: float = 1e-12) -> complex:
    phi, _ = _telescope_minus(h, complex(x), complex(y), tol)
    return phi


def phi_minus_jet_raw(h: HenonParams, x: complex, y: complex, tol: float = 1e-12) -> Jet:
    phi, _ = _telescope_minus(h, seed_x(x), seed_y(y), tol)
    return phi
