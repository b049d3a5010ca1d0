"""Primitive vectors, rational targets, wedge coordinates and exact norms.

Everything downstream works with primitive integer vectors v = ((p1, p2), q),
q > 0, which represent the rational point (p1/q, p2/q) at height q.  The
wedge of two such vectors is kept as the integer triple of 2x2 minors
(m12, m13, m23); the pair (m13, m23) is what all the distance formulas use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .util import gcd3

NormChoice = Literal["sup", "euclid"]


@dataclass(frozen=True)
class RatPoint:
    """Exact rational target in the plane."""

    x1: Fraction
    x2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x1", Fraction(self.x1))
        object.__setattr__(self, "x2", Fraction(self.x2))

    @property
    def coords(self) -> tuple[Fraction, Fraction]:
        return (self.x1, self.x2)

    def common_denominator(self) -> tuple[int, int, int]:
        """Return (n1, n2, D) with x = (n1/D, n2/D), D > 0 minimal."""
        d = self.x1.denominator * self.x2.denominator // math.gcd(
            self.x1.denominator, self.x2.denominator)
        return (self.x1.numerator * (d // self.x1.denominator),
                self.x2.numerator * (d // self.x2.denominator), d)


@dataclass(frozen=True)
class PrimVec:
    """Primitive integer vector (p1, p2, q) with q > 0."""

    p1: int
    p2: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"height must be positive, got {self.q}")
        if gcd3(self.p1, self.p2, self.q) != 1:
            raise ValueError(f"vector {(self.p1, self.p2, self.q)} is not primitive")

    @property
    def height(self) -> int:
        """The height |v| of an approximation vector is its denominator."""
        return self.q

    def proj(self) -> RatPoint:
        return RatPoint(Fraction(self.p1, self.q), Fraction(self.p2, self.q))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.p1, self.p2, self.q)

    def __str__(self) -> str:
        return f"(({self.p1},{self.p2}),{self.q})"


def pvec(p1: int, p2: int, q: int) -> PrimVec:
    return PrimVec(p1, p2, q)


@dataclass(frozen=True)
class Wedge2:
    """Wedge u ^ v of two integer 3-vectors, stored as the minor triple."""

    m12: int
    m13: int
    m23: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.m13, self.m23)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m12, self.m13, self.m23)

    def neg(self) -> "Wedge2":
        return Wedge2(-self.m12, -self.m13, -self.m23)

    def is_zero(self) -> bool:
        return self.m12 == 0 and self.m13 == 0 and self.m23 == 0


def wedge(u: PrimVec, v: PrimVec) -> Wedge2:
    """Minor triple of u ^ v (rows (u1,u2,u3) = (p1,p2,q))."""
    return Wedge2(
        u.p1 * v.p2 - u.p2 * v.p1,
        u.p1 * v.q - u.q * v.p1,
        u.p2 * v.q - u.q * v.p2,
    )


def seminorm(w: Wedge2, norm: NormChoice = "sup") -> int | float:
    """Size of the pair part (m13, m23).

    This vanishes only on multiples of a common direction, and for wedges of
    distinct primitive vectors it is a genuine positive integer under "sup".
    The "euclid" variant returns a float; use seminorm_sq for exact work.
    """
    if norm == "sup":
        return max(abs(w.m13), abs(w.m23))
    if norm == "euclid":
        return math.hypot(w.m13, w.m23)
    raise ValueError(f"unknown norm {norm!r}")


def seminorm_sq(w: Wedge2) -> int:
    """Exact squared Euclidean size of the pair part."""
    return w.m13 * w.m13 + w.m23 * w.m23


def residual(x: RatPoint, v: PrimVec, norm: NormChoice = "sup") -> Fraction | float:
    """Approximation residual ||q*x - p|| of v at target x.

    Exact Fraction under "sup" (the default everywhere); float under
    "euclid".  Zero exactly when x is the projective point of v.
    """
    d1 = v.q * x.x1 - v.p1
    d2 = v.q * x.x2 - v.p2
    if norm == "sup":
        return max(abs(d1), abs(d2))
    if norm == "euclid":
        return math.hypot(float(d1), float(d2))
    raise ValueError(f"unknown norm {norm!r}")


def residual_sq(x: RatPoint, v: PrimVec) -> Fraction:
    """Exact squared Euclidean residual."""
    d1 = v.q * x.x1 - v.p1
    d2 = v.q * x.x2 - v.p2
    return d1 * d1 + d2 * d2


def proj_dist(u: PrimVec, v: PrimVec, norm: NormChoice = "sup") -> Fraction | float:
    """Distance between the projective points of u and v.

    In the affine chart both points live in, this is exactly
    seminorm(u ^ v) / (q_u * q_v), which is how it is computed.
    """
    w = wedge(u, v)
    if norm == "sup":
        return Fraction(seminorm(w), u.q * v.q)
    if norm == "euclid":
        return seminorm(w, "euclid") / (u.q * v.q)
    raise ValueError(f"unknown norm {norm!r}")
