"""Torus points, affine torus endomorphisms and cyclic rotation groups.

The sphere is modelled as the quotient of the torus R^2/Z^2 by a cyclic
rotation group of order 2, 3, 4 or 6 acting linearly in lattice
coordinates.  A sphere point is stored as the lexicographically smallest
point of its orbit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import NamedTuple, Optional

from . import _kernels as K
from .exact_lattice import (
    det2,
    format_rat,
    frac_mod1,
    identity,
    mat_mul,
    mat_pow,
    mat_sub,
    mat_vec,
    parse_rat,
    solve_congruence,
)
from .errors import InvalidInstance


class TorusPoint(NamedTuple):
    """The point ``(x/d, y/d)`` of R^2/Z^2 in lowest terms, ``0 <= x, y < d``."""
    x: int
    y: int
    d: int

    @classmethod
    def of(cls, px, py) -> "TorusPoint":
        px, py = Fraction(px), Fraction(py)
        d = lcm(px.denominator, py.denominator)
        return cls(*K.normalize(int(px * d), int(py * d), d))

    @property
    def coords(self) -> tuple:
        return (Fraction(self.x, self.d), Fraction(self.y, self.d))

    def sort_key(self):
        return self.coords

    def to_json(self) -> list:
        return [format_rat(c) for c in self.coords]

    @classmethod
    def from_json(cls, data) -> "TorusPoint":
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise InvalidInstance(f"point must be a pair, got {data!r}")
        return cls.of(parse_rat(data[0]), parse_rat(data[1]))

    def __str__(self):
        a, b = self.to_json()
        return f"({a},{b})"


ORIGIN = TorusPoint(0, 0, 1)


class SpherePoint(NamedTuple):
    """Orbit of a torus point under the rotation group of order ``n``."""
    rep: TorusPoint
    n: int

    def sort_key(self):
        return self.rep.coords

    def to_json(self) -> list:
        return self.rep.to_json()

    def __str__(self):
        return str(self.rep)


def sorted_points(points):
    return sorted(points, key=lambda p: p.sort_key())


@dataclass(frozen=True)
class AffineEndo:
    """Torus map ``x -> A x + b`` with integer A and rational b (mod Z^2)."""
    A: tuple
    b: tuple = (Fraction(0), Fraction(0))
    kernel: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        a = tuple(tuple(int(v) for v in row) for row in self.A)
        if len(a) != 2 or any(len(r) != 2 for r in a):
            raise InvalidInstance(f"A must be 2x2, got {self.A!r}")
        if any(Fraction(v) != int(v) for row in self.A for v in row):
            raise InvalidInstance(f"A must be integral, got {self.A!r}")
        b = tuple(frac_mod1(v) for v in self.b)
        if len(b) != 2:
            raise InvalidInstance(f"b must have two entries, got {self.b!r}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)
        td = lcm(b[0].denominator, b[1].denominator)
        k = (a[0][0], a[0][1], a[1][0], a[1][1], int(b[0] * td), int(b[1] * td), td)
        object.__setattr__(self, "kernel", k)

    @classmethod
    def linear(cls, A) -> "AffineEndo":
        return cls(A)

    @classmethod
    def identity(cls) -> "AffineEndo":
        return cls(identity(2))

    @property
    def det(self) -> int:
        return det2(self.A)

    @property
    def degree(self) -> int:
        return abs(self.det)

    def compose(self, other: "AffineEndo") -> "AffineEndo":
        """``self . other``."""
        b = mat_vec(self.A, other.b)
        return AffineEndo(mat_mul(self.A, other.A),
                          (b[0] + self.b[0], b[1] + self.b[1]))

    def power(self, k: int) -> "AffineEndo":
        out = AffineEndo.identity()
        for _ in range(k):
            out = self.compose(out)
        return out

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "b": [format_rat(v) for v in self.b]}

    @classmethod
    def from_json(cls, data) -> "AffineEndo":
        if not isinstance(data, dict) or "A" not in data:
            raise InvalidInstance(f"endomorphism must be an object with 'A', got {data!r}")
        A = data["A"]
        if (not isinstance(A, list) or len(A) != 2
                or any(not isinstance(r, list) or len(r) != 2 for r in A)
                or any(isinstance(v, bool) or not isinstance(v, int) for r in A for v in r)):
            raise InvalidInstance(f"'A' must be a 2x2 integer array, got {A!r}")
        b = data.get("b", ["0", "0"])
        if not isinstance(b, list) or len(b) != 2:
            raise InvalidInstance(f"'b' must be a pair of rationals, got {b!r}")
        return cls(tuple(tuple(r) for r in A), (parse_rat(b[0]), parse_rat(b[1])))


def apply(E: AffineEndo, p: TorusPoint) -> TorusPoint:
    return TorusPoint(*K.affine_apply(E.kernel, *p))


def preimages(E: AffineEndo, p: TorusPoint) -> list:
    if E.det == 0:
        raise InvalidInstance("preimages of a singular endomorphism are not finite")
    return sorted_points(TorusPoint(*q) for q in K.affine_preimages(E.kernel, *p))


def deck_group(E: AffineEndo) -> list:
    """Translations v with A v in Z^2; the covering group of x -> A x + b."""
    fam = solve_congruence(E.A, (0, 0))
    return sorted_points(TorusPoint.of(*pt) for pt in fam.points())


@dataclass(frozen=True)
class RotationGroup:
    order: int

    def __post_init__(self):
        if self.order not in K.ROTATIONS:
            raise InvalidInstance(f"rotation order must be 2, 3, 4 or 6, got {self.order!r}")

    @property
    def n(self) -> int:
        return self.order

    @property
    def R(self) -> tuple:
        a, b, c, d = K.ROTATIONS[self.order]
        return ((a, b), (c, d))

    @cached_property
    def powers(self) -> tuple:
        return tuple(mat_pow(self.R, k) for k in range(self.order))

    def to_json(self) -> dict:
        return {"rotation_order": self.order}

    @classmethod
    def from_json(cls, data) -> "RotationGroup":
        if not isinstance(data, dict) or "rotation_order" not in data:
            raise InvalidInstance(f"group must be {{'rotation_order': n}}, got {data!r}")
        n = data["rotation_order"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise InvalidInstance(f"rotation_order must be an integer, got {n!r}")
        return cls(n)


def stabilizer_order(G: RotationGroup, x: TorusPoint) -> int:
    return K.stabilizer_order(G.order, *x)


def orbit(G: RotationGroup, x: TorusPoint) -> list:
    return [TorusPoint(*p) for p in K.orbit_points(G.order, *x)]


def sphere_canonical(G: RotationGroup, x: TorusPoint) -> SpherePoint:
    cx, cy, cd, _ = K.orbit_canonical(G.order, *x)
    return SpherePoint(TorusPoint(cx, cy, cd), G.order)


def projection_critical_points(G: RotationGroup) -> list:
    """Points with nontrivial stabilizer and their local degrees."""
    found = set()
    I = identity(2)
    for k in range(1, G.order):
        fam = solve_congruence(mat_sub(G.powers[k], I), (0, 0))
        found.update(TorusPoint.of(*pt) for pt in fam.points())
    return [(p, stabilizer_order(G, p)) for p in sorted_points(found)]


def check_equivariance(G: RotationGroup, E: AffineEndo) -> Optional[int]:
    """The j with ``E(R x) = R^j E(x)`` on the torus, or None."""
    AR = mat_mul(E.A, G.R)
    for j, Rj in enumerate(G.powers):
        if AR != mat_mul(Rj, E.A):
            continue
        diff = mat_vec(mat_sub(identity(2), Rj), E.b)
        if all(v.denominator == 1 for v in diff):
            return j
    return None
