"""Forward-mode derivative arithmetic for holomorphic expressions.

A :class:`Jet` carries a complex value together with its first partial
derivatives with respect to two independent complex base variables.
Propagating jets through the orbit recursions gives exact analytic
derivatives of the Böttcher coordinates; finite differences are kept
only as a test oracle because the tangency function is a difference of
nearly parallel gradients near its zero set.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

_Scalar = (int, float, complex)


@dataclass(frozen=True, slots=True)
class Jet:
    """Complex value with partials d/dx and d/dy of the two seed variables."""

    val: complex
    dx: complex = 0j
    dy: complex = 0j

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.dx + other.dx, self.dy + other.dy)
        if isinstance(other, _Scalar):
            return Jet(self.val + other, self.dx, self.dy)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.dx, -self.dy)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.dx - other.dx, self.dy - other.dy)
        if isinstance(other, _Scalar):
            return Jet(self.val - other, self.dx, self.dy)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _Scalar):
            return Jet(other - self.val, -self.dx, -self.dy)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.val * other.val,
                self.dx * other.val + self.val * other.dx,
                self.dy * other.val + self.val * other.dy,
            )
        if isinstance(other, _Scalar):
            return Jet(self.val * other, self.dx * other, self.dy * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            inv = 1.0 / other.val
            q = self.val * inv
            return Jet(q, (self.dx - q * other.dx) * inv, (self.dy - q * other.dy) * inv)
        if isinstance(other, _Scalar):
            inv = 1.0 / other
            return Jet(self.val * inv, self.dx * inv, self.dy * inv)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _Scalar):
            inv = 1.0 / self.val
            q = other * inv
            return Jet(q, -q * inv * self.dx, -q * inv * self.dy)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise TypeError("jet powers are restricted to non-negative integers")
        out = Jet(1.0 + 0j)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def constant(v: complex) -> Jet:
    return Jet(complex(v))


def seed_x(v: complex) -> Jet:
    """Jet of the first base variable itself (dx = 1)."""
    return Jet(complex(v), 1.0 + 0j, 0j)


def seed_y(v: complex) -> Jet:
    """Jet of the second base variable itself (dy = 1)."""
    return Jet(complex(v), 0j, 1.0 + 0j)


def jlog(j: Jet) -> Jet:
    """Principal-branch logarithm."""
    inv = 1.0 / j.val
    return Jet(cmath.log(j.val), j.dx * inv, j.dy * inv)


def jexp(j: Jet) -> Jet:
    e = cmath.exp(j.val)
    return Jet(e, j.dx * e, j.dy * e)


def jsqrt(j: Jet) -> Jet:
    """Principal-branch square root."""
    s = cmath.sqrt(j.val)
    half = 0.5 / s
    return Jet(s, j.dx * half, j.dy * half)
