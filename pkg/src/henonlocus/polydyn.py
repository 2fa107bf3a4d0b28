"""One-dimensional dynamics of the quadratic family p(x) = x**2 + c.

Provides the escape-rate (Green) function G_p, the Böttcher coordinate
b_p near infinity, the binary-addressed preimage tree of 0, and samplers
for the level curves {G_p = s}.  Everything here assumes a parameter c
whose Julia set is disconnected, certified numerically by the critical
orbit escaping (G_p(0) > 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchFailure, DepthTooLarge, InfeasibleConstants, NoConvergence, OutsideDomain
from .jets import Jet, jexp, jlog, seed_x

_HUGE = 1e150


@dataclass(frozen=True)
class PolyParams:
    """Parameter of the quadratic map x -> x**2 + c."""

    c: complex


@dataclass(frozen=True)
class EscapeValue:
    """Extended-real escape-rate value with iteration metadata.

    ``value`` is -inf only for the degenerate backward rate on the
    parabola p(y) = x; it is >= 0 for forward rates.
    """

    value: float
    iterations: int
    converged: bool
    escaped: bool


@dataclass(frozen=True)
class BottcherJet:
    """Böttcher-coordinate value with first partials and a truncation bound.

    ``depth`` is the dynamical extension depth n (the jet describes the
    2**n-th power of the base coordinate when n > 0); ``tail_bound``
    bounds the truncation error of the telescopic log series.
    """

    value: complex
    d_dx: complex
    d_dy: complex
    depth: int
    tail_bound: float


@dataclass(frozen=True)
class PreimageAddress:
    """Binary address of one root of p**(k)(x) = 0, k = len(bits).

    Bit convention: appending 0 takes the principal square root in
    x = +-sqrt(parent - c), appending 1 takes its negative.
    """

    bits: str = ""

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError(f"address bits must be 0/1, got {self.bits!r}")

    @property
    def depth(self) -> int:
        return len(self.bits)

    def child(self, bit: int) -> "PreimageAddress":
        return PreimageAddress(self.bits + str(int(bit)))

    def parent(self) -> "PreimageAddress":
        if not self.bits:
            raise ValueError("root address has no parent")
        return PreimageAddress(self.bits[:-1])

    def __str__(self) -> str:
        return self.bits or "ε"


def escape_radius(c: complex) -> float:
    """Radius beyond which quadratic orbits escape monotonically."""
    return max(abs(c), 2.0) + 1.0


def poly_eval(p: PolyParams, x: complex) -> complex:
    return x * x + p.c


def green_poly(p: PolyParams, x: complex, tol: float = 1e-12, max_iter: int = 200) -> EscapeValue:
    """Escape rate G_p(x) = lim 2**-n log|p**(n)(x)|.

    Iterates until the orbit passes the escape radius, then sums the
    telescopic corrections 2**-(n+j) log|x_{n+j} / x_{n+j-1}**2| until
    the geometric tail bound drops below ``tol``.  Returns value 0 with
    ``escaped=False`` when the orbit stays bounded for ``max_iter``
    steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    r_esc = escape_radius(p.c)
    z = complex(x)
    n = 0
    while abs(z) <= r_esc:
        if n >= max_iter:
            return EscapeValue(0.0, n, converged=False, escaped=False)
        z = z * z + p.c
        n += 1
    g = math.ldexp(math.log(abs(z)), -n)
    j = 0
    while True:
        q = abs(p.c) / (abs(z) * abs(z))
        tail = math.ldexp(-math.log1p(-q), -(n + j)) if q < 1.0 else math.inf
        if tail < tol or abs(z) > _HUGE:
            return EscapeValue(g, n + j, converged=True, escaped=True)
        if n + j >= max_iter:
            return EscapeValue(g, n + j, converged=False, escaped=True)
        s = p.c / (z * z)
        z = z * z + p.c
        j += 1
        g += math.ldexp(math.log(abs(1.0 + s)), -(n + j))


def green_poly_grid(p: PolyParams, xs: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Vectorized escape rate over an array of points.

    Records 2**-n log|x_n| at the first crossing of |x_n| > 1e8; the
    neglected tail is below 1e-15.  Non-escaping cells get 0.
    """
    z = np.asarray(xs, dtype=complex).copy()
    out = np.zeros(z.shape, dtype=float)
    alive = np.ones(z.shape, dtype=bool)
    for n in range(max_iter + 1):
        absz = np.abs(z)
        done = alive & (absz > 1e8)
        if done.any():
            out[done] = np.log(absz[done]) * 2.0 ** (-n)
            alive &= ~done
        if not alive.any():
            break
        zn = z[alive]
        z[alive] = zn * zn + p.c
    return out


def disconnectedness_certificate(p: PolyParams, tol: float = 1e-12) -> float:
    """G_p(0); raises if the critical orbit does not escape."""
    g = green_poly(p, 0.0, tol=tol)
    if not g.escaped or g.value <= 0.0:
        raise InfeasibleConstants(
            f"critical orbit of c={p.c} does not escape; Julia set not certified disconnected"
        )
    return g.value


def bottcher_poly(p: PolyParams, x: complex, tol: float = 1e-12, max_terms: int = 80) -> BottcherJet:
    """Böttcher coordinate b_p(x) with its derivative, via the telescopic product.

    b_p(x) = x * exp(sum 2**-k log(1 + s_k)) with s_k = c / x_{k-1}**2 and
    principal-branch logs.  Raises :class:`BranchFailure` when some
    |s_k| >= 1, i.e. the point is too close to the Julia set for direct
    evaluation.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    xj = seed_x(x)
    cur = xj
    total = Jet(0j)
    k = 0
    while True:
        s = p.c / (cur * cur)
        if not abs(s.val) < 1.0:
            raise BranchFailure(
                f"telescopic factor left the principal branch at term {k + 1} (|s|={abs(s.val):.3g})"
            )
        k += 1
        total = total + jlog(1.0 + s) * 2.0 ** (-k)
        cur = cur * cur + p.c
        q = abs(p.c) / (abs(cur.val) * abs(cur.val))
        if abs(cur.val) > _HUGE:
            tail = 0.0
            break
        tail = math.ldexp(-math.log1p(-q), -k) if q < 1.0 else math.inf
        if tail < tol:
            break
        if k >= max_terms:
            raise BranchFailure(f"no convergence after {max_terms} terms (point may not escape)")
    b = xj * jexp(total)
    return BottcherJet(value=b.val, d_dx=b.dx, d_dy=0j, depth=0, tail_bound=tail)


def preimages_of_zero(p: PolyParams, k: int, max_roots: int = 65536) -> dict[PreimageAddress, complex]:
    """All 2**k roots of p**(k)(x) = 0 keyed by binary address.

    Children of a node v are +-sqrt(v - c); bit 0 is the principal
    branch, bit 1 its negative.
    """
    if k < 0:
        raise ValueError("depth must be >= 0")
    if 2**k > max_roots:
        raise DepthTooLarge(f"2**{k} roots exceed the cap of {max_roots}")
    level: dict[PreimageAddress, complex] = {PreimageAddress(""): 0j}
    for _ in range(k):
        nxt: dict[PreimageAddress, complex] = {}
        for addr, v in level.items():
            root = cmath.sqrt(v - p.c)
            nxt[addr.child(0)] = root
            nxt[addr.child(1)] = -root
        level = nxt
    return level


def _newton_bottcher(p: PolyParams, target: complex, x0: complex, tol: float, max_steps: int = 60) -> complex:
    x = complex(x0)
    for _ in range(max_steps):
        b = bottcher_poly(p, x, tol=min(tol * 1e-2, 1e-13))
        err = b.value - target
        if abs(err) < tol * abs(target):
            return x
        step = err / b.d_dx
        while True:
            try:
                bottcher_poly(p, x - step, tol=1e-6)
                break
            except BranchFailure:
                step *= 0.5
                if abs(step) < 1e-300:
                    raise NoConvergence("Böttcher Newton step collapsed")
        x = x - step
    raise NoConvergence(f"Böttcher inversion stalled at target {target:.6g}")


def _lift_sqrt(parent: np.ndarray, c: complex) -> list[np.ndarray]:
    """Continuous lifts x = sqrt(w - c) along a closed sample loop.

    Returns the two closed lifts [L, -L] when w - c does not wind around
    0, or a single closed double-cover lift when it does.
    """
    w = np.asarray(parent, dtype=complex)
    lift = np.empty_like(w)
    lift[0] = cmath.sqrt(w[0] - c)
    for i in range(1, len(w)):
        cand = cmath.sqrt(w[i] - c)
        lift[i] = cand if abs(cand - lift[i - 1]) <= abs(cand + lift[i - 1]) else -cand
    back = cmath.sqrt(w[0] - c)
    if abs(back - lift[-1]) > abs(back + lift[-1]):
        back = -back
    if abs(back - lift[0]) <= abs(back + lift[0]):
        return [lift, -lift]
    return [np.concatenate([lift, -lift])]


def level_curve(p: PolyParams, level: float, n_samples: int = 256, tol: float = 1e-12) -> np.ndarray:
    """Samples of the Jordan curve {G_p = level}, for level above G_p(0).

    High levels are computed by Newton inversion of b_p at the targets
    exp(level + i*theta); lower levels are pulled back from {G = 2*level}
    through the square-root double cover (the curve dips inside the
    radius where the direct telescopic product converges).
    """
    g0 = disconnectedness_certificate(p)
    if level <= g0:
        raise OutsideDomain(
            f"level {level:.6g} is at or below the critical level {g0:.6g}; use pullbacks"
        )
    if level < math.log(2.0 * escape_radius(p.c)):
        parent = level_curve(p, 2.0 * level, max(n_samples // 2, 64), tol)
        lifts = _lift_sqrt(parent, p.c)
        if len(lifts) != 1:
            raise NoConvergence(f"expected a double-cover lift at level {level:.4g}")
        return lifts[0]
    s_hi = max(level, math.log(3.0 * escape_radius(p.c)))
    x = cmath.exp(s_hi)
    for step in range(9):
        s = s_hi + (level - s_hi) * (step + 1) / 9.0
        x = _newton_bottcher(p, cmath.exp(s), x, tol)
    pts = np.empty(n_samples, dtype=complex)
    for i in range(n_samples):
        theta = 2.0 * math.pi * i / n_samples
        x = _newton_bottcher(p, cmath.exp(level + 1j * theta), x, tol)
        pts[i] = x
    return pts


def winding_contains(curve: np.ndarray, z: complex) -> bool:
    """True when the closed sample loop winds once around z."""
    rel = np.asarray(curve) - z
    ang = np.angle(np.roll(rel, -1) / rel)
    total = float(np.sum(ang)) / (2.0 * math.pi)
    return abs(total) > 0.5


def level_curve_children(
    p: PolyParams, parent_curve: np.ndarray, parent_address: PreimageAddress
) -> dict[PreimageAddress, np.ndarray]:
    """Pull a component boundary curve back one level through p.

    The two lifts +-sqrt(w - c) are continued along the curve; each lift
    is labeled by the child root it encloses.  Works because c stays
    outside every sublevel component, so sqrt(w - c) has closed lifts.
    """
    lifts = _lift_sqrt(parent_curve, p.c)
    if len(lifts) != 2:
        raise NoConvergence("component pullback produced a double cover (c inside the curve?)")
    parent_root = _root_of_address(p, parent_address)
    child0 = cmath.sqrt(parent_root - p.c)
    out: dict[PreimageAddress, np.ndarray] = {}
    for curve in lifts:
        if winding_contains(curve, child0):
            out[parent_address.child(0)] = curve
        elif winding_contains(curve, -child0):
            out[parent_address.child(1)] = curve
        else:
            raise NoConvergence("pullback lift does not enclose a child root")
    if len(out) != 2:
        raise NoConvergence("pullback lifts enclose the same child root")
    return out


def _root_of_address(p: PolyParams, addr: PreimageAddress) -> complex:
    v = 0j
    for bit in addr.bits:
        r = cmath.sqrt(v - p.c)
        v = r if bit == "0" else -r
    return v


def root_of_address(p: PolyParams, addr: PreimageAddress) -> complex:
    """Root value for one address (nested square roots along the bits)."""
    return _root_of_address(p, addr)


def component_curves(
    p: PolyParams, level_r: float, depth: int, n_samples: int = 256
) -> dict[PreimageAddress, np.ndarray]:
    """Boundary curves {G_p = level_r / 2**depth} of every depth-``depth`` component.

    Components are labeled by the depth-``depth`` root they contain.
    """
    curves = {PreimageAddress(""): level_curve(p, level_r, n_samples)}
    for _ in range(depth):
        nxt: dict[PreimageAddress, np.ndarray] = {}
        for addr, curve in curves.items():
            nxt.update(level_curve_children(p, curve, addr))
        curves = nxt
    return curves


def component_address_of(
    p: PolyParams, x: complex, depth: int, level_r: float, n_samples: int = 256
) -> PreimageAddress:
    """Address of the depth-``depth`` sublevel component containing x.

    Tests x against every component boundary at the target depth.  The
    component tree cannot be descended along address prefixes: a point
    in one depth-k component may have its depth-(k+1) component inside a
    different pullback chain.
    """
    if depth == 0:
        curve = level_curve(p, level_r, n_samples)
        if not winding_contains(curve, x):
            raise OutsideDomain(f"{x:.6g} lies outside the level-{level_r:.4g} sublevel set")
        return PreimageAddress("")
    for addr, curve in component_curves(p, level_r, depth, n_samples).items():
        if winding_contains(curve, x):
            return addr
    raise OutsideDomain(f"{x:.6g} lies in no depth-{depth} component (G above the level?)")
