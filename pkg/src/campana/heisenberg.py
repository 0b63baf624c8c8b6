"""The Heisenberg group over Q and its two actions on P^3.

An element g(x, z, y) is the matrix

    [[1, x, z],
     [0, 1, y],
     [0, 0, 1]]

stored as the triple (x, z, y).  The group sits in P^3 as [1:x:y:z].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import PrimitivePoint, as_rational, primitive_rep


@dataclass(frozen=True)
class GroupElement:
    x: Fraction = Fraction(0)
    z: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("x", "z", "y"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        one, zero = Fraction(1), Fraction(0)
        return ((one, self.x, self.z), (zero, one, self.y), (zero, zero, one))


IDENTITY = GroupElement()


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return GroupElement(g.x + h.x, g.z + h.z + g.x * h.y, g.y + h.y)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.x, g.x * g.y - g.z, -g.y)


def _check_p3(P: PrimitivePoint) -> None:
    if len(P) != 4:
        raise ValueError(f"expected a point of P^3, got {P}")


def left_act(g: GroupElement, P: PrimitivePoint) -> PrimitivePoint:
    """g . [a:b:c:d] = [a : ax+b : ay+c : az+d+xc]."""
    _check_p3(P)
    a, b, c, d = P
    return primitive_rep((a, a * g.x + b, a * g.y + c, a * g.z + d + g.x * c))


def right_act(P: PrimitivePoint, g: GroupElement) -> PrimitivePoint:
    """[a:b:c:d] . g = [a : ax+b : ay+c : az+by+d]."""
    _check_p3(P)
    a, b, c, d = P
    return primitive_rep((a, a * g.x + b, a * g.y + c, a * g.z + b * g.y + d))


def embed(g: GroupElement) -> PrimitivePoint:
    return primitive_rep((1, g.x, g.y, g.z))


def from_point(P: PrimitivePoint) -> GroupElement:
    """Inverse of embed on points with a != 0."""
    _check_p3(P)
    a, b, c, d = P
    if a == 0:
        raise ValueError(f"{P} lies on the boundary a = 0")
    a = Fraction(a)
    return GroupElement(b / a, d / a, c / a)
