"""Quotients of torus endomorphisms in the affine rotation-group model.

A :class:`QotePair` bundles a rotation group, an affine endomorphism F and a
precomposer Q.  The projection is ``pi = pi0 . Q`` where ``pi0`` is the
quotient by the group, and the sphere map f is defined by ``pi F = f pi``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

from . import _kernels as K
from .errors import CheckFailure, InconsistentFiber, InvalidInstance, NotCompatible, NotEquivariant
from .exact_lattice import mat_mul, mat_vec
from .torus import (
    AffineEndo,
    RotationGroup,
    SpherePoint,
    TorusPoint,
    check_equivariance,
    projection_critical_points,
    sorted_points,
)

DEFAULT_MARKED_DEPTH = 3


@dataclass(frozen=True)
class QotePair:
    group: RotationGroup
    F: AffineEndo
    Q: AffineEndo = AffineEndo.identity()
    twist: Optional[int] = 0

    @property
    def n(self) -> int:
        return self.group.order

    @property
    def deg_f(self) -> int:
        return self.F.degree

    @property
    def deg_pi(self) -> int:
        return self.group.order * self.Q.degree

    def sphere(self, p: TorusPoint) -> SpherePoint:
        """pi(p) for a point of the domain torus."""
        x, y, d = K.project(self.n, self.Q.kernel, *p)
        return SpherePoint(TorusPoint(x, y, d), self.n)

    def base_sphere(self, p: TorusPoint) -> SpherePoint:
        """pi0(p) for a point of the base torus of pi0."""
        x, y, d, _ = K.orbit_canonical(self.n, *p)
        return SpherePoint(TorusPoint(x, y, d), self.n)

    def with_F(self, F: AffineEndo) -> "QotePair":
        return validate(self.group, F, self.Q, descended=self.twist is None)

    def power(self, k: int) -> "QotePair":
        return self.with_F(self.F.power(k))

    # cached structure -----------------------------------------------------

    @cached_property
    def s_pi(self) -> tuple:
        """Critical points of pi with their local degrees, sorted."""
        out = []
        for s, _ in projection_critical_points(self.group):
            for x in K.affine_preimages(self.Q.kernel, *s):
                x = TorusPoint(*x)
                out.append((x, local_degree_pi(self, x)))
        return tuple(sorted(out, key=lambda t: t[0].sort_key()))

    @cached_property
    def postcritical(self) -> frozenset:
        pf = frozenset(self.sphere(x) for x, _ in self.s_pi)
        for p in pf:
            if eval_f(self, p) not in pf:
                raise CheckFailure(f"P_f is not forward invariant at {p}")
        return pf

    @cached_property
    def critical(self) -> tuple:
        cands = set()
        for x, _ in self.s_pi:
            cands.update(K.project_preimages(self.n, self.F.kernel, self.Q.kernel, *x))
        out = []
        for c in cands:
            p = SpherePoint(TorusPoint(*c), self.n)
            k = local_degree_f(self, p)
            if k >= 2:
                out.append((p, k))
        out.sort(key=lambda t: t[0].sort_key())
        total = sum(k - 1 for _, k in out)
        if total != 2 * self.deg_f - 2:
            raise CheckFailure(
                f"Riemann-Hurwitz fails: sum(deg-1) = {total}, 2d-2 = {2 * self.deg_f - 2}")
        return tuple(out)

    @cached_property
    def level_one(self) -> frozenset:
        out = set(self.postcritical)
        for p in self.postcritical:
            out.update(q for q, _ in sphere_preimages(self, p))
        return frozenset(out)


def validate(group: RotationGroup, F: AffineEndo, Q: Optional[AffineEndo] = None,
             descended: bool = False) -> QotePair:
    """Check that (group, F, Q) defines a sphere map f with ``pi F = f pi``.

    Raises NotEquivariant or NotCompatible; degree problems raise
    InvalidInstance.  ``descended=True`` marks a pair obtained by factoring
    out a subgroup of a valid pair: f exists by construction, so a failed
    single-deck-element test is tolerated and recorded as ``twist=None``.
    Lift independence is still asserted at every evaluation.
    """
    if Q is None:
        Q = AffineEndo.identity()
    if F.degree < 2:
        raise InvalidInstance(f"deg F = |det A| must be at least 2, got {F.degree}")
    if Q.degree == 0:
        raise InvalidInstance("precomposer Q must be nonsingular")
    if check_equivariance(group, F) is None:
        raise NotEquivariant("F")
    if check_equivariance(group, Q) is None:
        raise NotEquivariant("Q")
    k = compatibility_twist(group, F, Q)
    if k is None and not descended:
        raise NotCompatible(
            "no k, lambda with Q F = (R^k, lambda) F Q; pi0 Q F does not factor through pi0 Q")
    return QotePair(group, F, Q, k)


def compatibility_twist(group: RotationGroup, F: AffineEndo, Q: AffineEndo) -> Optional[int]:
    A, b = F.A, F.b
    C, c = Q.A, Q.b
    CA = mat_mul(C, A)
    AC = mat_mul(A, C)
    Cb = mat_vec(C, b)
    Acb = [u + v for u, v in zip(mat_vec(A, c), b)]
    for k, Rk in enumerate(group.powers):
        if CA != mat_mul(Rk, AC):
            continue
        rot = mat_vec(Rk, Acb)
        diff = [Cb[i] + c[i] - rot[i] for i in range(2)]
        if all(Fraction(v).denominator == 1 for v in diff):
            return k
    return None


def pi_fiber(pair: QotePair, p: SpherePoint) -> list:
    return sorted_points(TorusPoint(*x) for x in K.pi_fiber(pair.n, pair.Q.kernel, *p.rep))


def local_degree_pi(pair: QotePair, x: TorusPoint) -> int:
    return K.stabilizer_order(pair.n, *K.affine_apply(pair.Q.kernel, *x))


def eval_f(pair: QotePair, p: SpherePoint) -> SpherePoint:
    fiber = K.pi_fiber(pair.n, pair.Q.kernel, *p.rep)
    images = {K.project(pair.n, pair.Q.kernel, *K.affine_apply(pair.F.kernel, *x))
              for x in fiber}
    if len(images) != 1:
        raise InconsistentFiber(f"f({p}) depends on the lift: {sorted(images)}")
    return SpherePoint(TorusPoint(*images.pop()), pair.n)


def local_degree_f(pair: QotePair, p: SpherePoint) -> int:
    """``deg(pi, F x) / deg(pi, x)``, identical for every lift x of p."""
    n, qk, fk = pair.n, pair.Q.kernel, pair.F.kernel
    ratios = set()
    for x in K.pi_fiber(n, qk, *p.rep):
        top = K.stabilizer_order(n, *K.affine_apply(qk, *K.affine_apply(fk, *x)))
        bottom = K.stabilizer_order(n, *K.affine_apply(qk, *x))
        if top % bottom:
            raise InconsistentFiber(f"deg(pi, F x) = {top} not divisible by deg(pi, x) = {bottom}")
        ratios.add(top // bottom)
    if len(ratios) != 1:
        raise InconsistentFiber(f"local degree of f at {p} varies over the fiber: {sorted(ratios)}")
    return ratios.pop()


def postcritical_set(pair: QotePair) -> list:
    return sorted_points(pair.postcritical)


def critical_set_f(pair: QotePair) -> list:
    return list(pair.critical)


def sphere_preimages(pair: QotePair, p: SpherePoint) -> list:
    """f^-1(p) as ``(point, local degree)`` pairs; degrees sum to deg f."""
    n, qk, fk = pair.n, pair.Q.kernel, pair.F.kernel
    found = set()
    for x in K.pi_fiber(n, qk, *p.rep):
        found.update(K.project_preimages(n, fk, qk, *x))
    out = []
    for c in sorted(found):
        q = SpherePoint(TorusPoint(*c), n)
        out.append((q, local_degree_f(pair, q)))
    total = sum(k for _, k in out)
    if total != pair.deg_f:
        raise CheckFailure(f"preimage multiplicities of {p} sum to {total}, not {pair.deg_f}")
    out.sort(key=lambda t: t[0].sort_key())
    return out


@dataclass(frozen=True)
class MarkedSets:
    levels: tuple

    def sizes(self) -> list:
        return [len(lv) for lv in self.levels]

    def __getitem__(self, m):
        return self.levels[m]


def marked_sets(pair: QotePair, depth: int = DEFAULT_MARKED_DEPTH) -> MarkedSets:
    """Levels ``f^-m(P_f)`` for ``m = 0..depth``; complements are the Y_m."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    levels = [pair.postcritical]
    for _ in range(depth):
        prev = levels[-1]
        nxt = set(prev)
        for p in prev:
            nxt.update(q for q, _ in sphere_preimages(pair, p))
        levels.append(frozenset(nxt))
    # p in f^-(j+1)(P_f)  <=>  f(p) in f^-j(P_f)
    for j in range(depth):
        if not levels[j] <= levels[j + 1]:
            raise CheckFailure(f"marked level {j} is not contained in level {j + 1}")
        for p in levels[j + 1]:
            if eval_f(pair, p) not in levels[j]:
                raise CheckFailure(f"f maps level {j + 1} point {p} outside level {j}")
        if j + 2 < len(levels):
            for p in levels[j + 2] - levels[j + 1]:
                if eval_f(pair, p) in levels[j]:
                    raise CheckFailure(f"{p} maps into level {j} but is not in level {j + 1}")
    return MarkedSets(tuple(levels))


def random_torus_point(rng: random.Random, max_den: int = 1000) -> TorusPoint:
    d = rng.randint(1, max_den)
    return TorusPoint.of(Fraction(rng.randrange(d), d), Fraction(rng.randrange(d), d))


def random_sphere_points(pair: QotePair, count: int, rng: random.Random,
                         exclude=frozenset(), max_den: int = 1000) -> list:
    """``count`` distinct seeded sphere points off ``exclude``."""
    out = []
    seen = set(exclude)
    while len(out) < count:
        p = pair.base_sphere(random_torus_point(rng, max_den))
        if p in seen:
            continue
        seen.add(p)
        out.append(p)
    return out


def lift_identity_check(pair: QotePair, x: TorusPoint) -> tuple:
    """Chain rule at a lift: ``(deg(pi, F x), deg(f, pi x) * deg(pi, x))``."""
    fx = TorusPoint(*K.affine_apply(pair.F.kernel, *x))
    lhs = local_degree_pi(pair, fx)
    rhs = local_degree_f(pair, pair.sphere(x)) * local_degree_pi(pair, x)
    return lhs, rhs

