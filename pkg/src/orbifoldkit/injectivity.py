"""Fiber injectivity of F, transversality, and the quotient by H.

H is the group of translations v with ``F(x + v) = F(x)`` and
``pi(x + v) = pi(x)``.  F is injective on the pi-fibers over
``Y = S^2 - f^-1(P_f)`` exactly when H is trivial; both sides are computed
independently and must agree.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _kernels as K
from .errors import CheckFailure, EmptySolution, PathDisagreement, TrivialH
from .exact_lattice import (
    det2,
    identity,
    inverse2,
    is_integral,
    lattice_index,
    mat_mul,
    mat_sub,
    mat_vec,
    solve_congruence,
    superlattice_basis,
)
from .qote import QotePair, eval_f, local_degree_pi, pi_fiber, random_sphere_points, validate
from .torus import AffineEndo, SpherePoint, TorusPoint, apply, deck_group, sorted_points

SEMANTIC_SAMPLES = 50


@dataclass(frozen=True)
class Witness:
    u: TorusPoint
    v: TorusPoint
    y: SpherePoint

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "v": self.v.to_json(), "y": self.y.to_json()}


@dataclass(frozen=True)
class InjectivityVerdict:
    injective: bool
    witnesses: tuple = ()
    positive_dimensional: bool = False
    h_order: int = 1

    def to_json(self) -> dict:
        return {
            "injective": self.injective,
            "positive_dimensional": self.positive_dimensional,
            "H_order": self.h_order,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def compute_H(pair: QotePair) -> list:
    """Translations killed by both F and Q: ``A v, C v in Z^2``."""
    C = pair.Q.A
    out = []
    for v in deck_group(pair.F):
        if all(x.denominator == 1 for x in mat_vec(C, v.coords)):
            out.append(v)
    return out


def _in_Y(pair: QotePair, v: TorusPoint) -> bool:
    # y = pi(v) lies in Y  <=>  f(y) = pi(F v) is not postcritical
    return pair.sphere(apply(pair.F, v)) not in pair.postcritical


def _verify_witness(pair: QotePair, u: TorusPoint, v: TorusPoint) -> Optional[Witness]:
    y = pair.sphere(v)
    if u == v or pair.sphere(u) != y:
        return None
    if apply(pair.F, u) != apply(pair.F, v) or not _in_Y(pair, v):
        return None
    return Witness(u, v, y)


def _fiber_system(pair: QotePair, k: int):
    """4x4 system in (v, w): A w = 0, (I - R^k)(C v + c) + C w = 0."""
    A, C, c = pair.F.A, pair.Q.A, pair.Q.b
    T = mat_sub(identity(2), pair.group.powers[k])
    TC = mat_mul(T, C)
    M = (
        (0, 0, A[0][0], A[0][1]),
        (0, 0, A[1][0], A[1][1]),
        (TC[0][0], TC[0][1], C[0][0], C[0][1]),
        (TC[1][0], TC[1][1], C[1][0], C[1][1]),
    )
    tc = mat_vec(T, c)
    return M, (Fraction(0), Fraction(0), -tc[0], -tc[1])


def _probe_component(pair, comp):
    """A verified witness on a positive-dimensional solution component."""
    off = comp.offset
    w = TorusPoint.of(off[2], off[3])
    g = comp.generators[0]
    for p in (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53):
        for t in range(1, p):
            s = Fraction(t, p)
            v = TorusPoint.of(off[0] + s * g[0], off[1] + s * g[1])
            u = TorusPoint(*K.normalize(v.x * w.d + w.x * v.d, v.y * w.d + w.y * v.d, v.d * w.d))
            wit = _verify_witness(pair, u, v)
            if wit is not None:
                return wit
    raise CheckFailure("positive-dimensional witness family has no probe point in Y")


def congruence_witnesses(pair: QotePair, limit: int = 4):
    """Solve the fiber systems for every rotation power.

    Returns ``(witnesses, positive_dimensional)``; at most ``limit``
    witnesses are materialized but every solution is examined.
    """
    witnesses = []
    positive = False
    postcritical = pair.postcritical
    fk, qk, n = pair.F.kernel, pair.Q.kernel, pair.n
    for k in range(n):
        M, rhs = _fiber_system(pair, k)
        try:
            fam = solve_congruence(M, rhs)
        except EmptySolution:
            continue
        for comp in fam.components:
            num, den = comp.numerators, comp.denominator
            if any(g[2] or g[3] for g in comp.generators):
                raise CheckFailure("w varies along a component although A is nonsingular")
            if num[2] % den == 0 and num[3] % den == 0:
                continue
            if comp.dimension:
                positive = True
                if len(witnesses) < limit:
                    witnesses.append(_probe_component(pair, comp))
                continue
            vx, vy, vd = K.normalize(num[0], num[1], den)
            fx = K.project(n, qk, *K.affine_apply(fk, vx, vy, vd))
            if SpherePoint(TorusPoint(*fx), n) in postcritical:
                continue
            if len(witnesses) < limit:
                v = TorusPoint(vx, vy, vd)
                u = TorusPoint(*K.normalize(num[0] + num[2], num[1] + num[3], den))
                wit = _verify_witness(pair, u, v)
                if wit is None:
                    raise CheckFailure(f"congruence solution ({u}, {v}) fails direct verification")
                witnesses.append(wit)
            else:
                witnesses.append(None)
    found = [w for w in witnesses if w is not None]
    exists = bool(witnesses)
    return exists, sorted(found, key=lambda w: (w.v.sort_key(), w.u.sort_key())), positive


def decide_pi_injectivity(pair: QotePair) -> InjectivityVerdict:
    """Decide fiber injectivity by H-triviality and by direct congruence
    solving; the two answers must coincide."""
    H = compute_H(pair)
    fast = len(H) == 1
    exists, wits, positive = congruence_witnesses(pair)
    if fast == exists:
        raise PathDisagreement(
            f"H has order {len(H)} but the congruence path "
            f"{'found' if exists else 'found no'} witnesses")
    return InjectivityVerdict(not exists, tuple(wits), positive, len(H))


def iterate_injectivity(pair: QotePair, m: int) -> list:
    """Verdicts for F, F^2, ..., F^m with the same projection."""
    out = []
    for k in range(1, m + 1):
        out.append(decide_pi_injectivity(pair if k == 1 else pair.power(k)))
    if out and out[0].injective and not all(v.injective for v in out):
        raise CheckFailure("an iterate of a pi-injective F is not pi-injective")
    return out


@dataclass(frozen=True)
class TransversalityResult:
    transverse: bool
    points_checked: int
    failure: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {"transverse": self.transverse, "points_checked": self.points_checked}
        if self.failure:
            x, lift, y = self.failure
            out["failure"] = {"x": x.to_json(), "lift": lift.to_json(), "y": y.to_json()}
        return out


def check_transversality(pair: QotePair, extra_samples=100, seed: int = 0) -> TransversalityResult:
    """Every lift of x is an F-image of some lift of each f-preimage of x.

    Checked exhaustively on ``P_f``, ``f^-1(P_f)`` and ``extra_samples``
    (a count of seeded random sphere points, or an explicit list).
    """
    points = list(sorted_points(pair.level_one))
    if isinstance(extra_samples, int):
        points += random_sphere_points(pair, extra_samples, random.Random(seed),
                                       exclude=pair.level_one)
    else:
        points += list(extra_samples)
    n, fk, qk = pair.n, pair.F.kernel, pair.Q.kernel
    for p in points:
        bad = K.transversal_failure(n, fk, qk, *p.rep)
        if bad is not None:
            lift, y = bad
            return TransversalityResult(False, len(points),
                                        (p, TorusPoint(*lift), SpherePoint(TorusPoint(*y), n)))
    return TransversalityResult(True, len(points))


def fiber_degrees_constant(fibers) -> bool:
    """True iff every fiber's list of local degrees is constant."""
    return all(len(set(degs)) <= 1 for degs in fibers)


def fiber_degree_table(pair: QotePair) -> dict:
    return {p: [local_degree_pi(pair, x) for x in pi_fiber(pair, p)]
            for p in sorted_points(pair.postcritical)}


def check_fiber_degree_constancy(pair: QotePair) -> bool:
    """deg(pi, .) constant on every fiber over pi(S_pi); other fibers are
    unbranched."""
    return fiber_degrees_constant(fiber_degree_table(pair).values())


# -- quotient by H -----------------------------------------------------------

@dataclass(frozen=True)
class QuotientStep:
    H: tuple
    basis_change: tuple
    old_pair: QotePair
    new_pair: QotePair
    semantic_points: int = 0

    def to_json(self) -> dict:
        from .exact_lattice import format_rat
        return {
            "H": [h.to_json() for h in self.H],
            "H_order": len(self.H),
            "B": [[format_rat(x) for x in row] for row in self.basis_change],
            "new_pair": pair_to_json(self.new_pair),
            "ledger": {
                "deg_pi_old": self.old_pair.deg_pi,
                "deg_pi_new": self.new_pair.deg_pi,
                "H_order": len(self.H),
                "identity": f"{self.old_pair.deg_pi} = {self.new_pair.deg_pi}*{len(self.H)}",
                "det_F_old": self.old_pair.F.det,
                "det_F_new": self.new_pair.F.det,
            },
            "semantic_points_checked": self.semantic_points,
        }


def pair_to_json(pair: QotePair) -> dict:
    out = {
        "group": pair.group.to_json(),
        "endomorphism": pair.F.to_json(),
        "precompose": pair.Q.to_json(),
    }
    if pair.twist is None:
        out["descended"] = True
    return out


def _as_int(m):
    if not is_integral(m):
        raise CheckFailure(f"expected an integer matrix, got {m!r}")
    return tuple(tuple(int(x) for x in row) for row in m)


def _search_vectors():
    r = 1
    while True:
        ring = [(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)
                if max(abs(a), abs(b)) == r]
        yield from sorted(ring)
        r += 1


def rotation_adapted_basis(n: int, Rp) -> tuple:
    """Unimodular P with ``P^-1 S P = R`` where S is ``Rp`` or its inverse.

    ``Rp`` is an integer matrix of order n; R is the fixed generator.
    """
    if n == 2:
        return identity(2)
    S = Rp
    if det2(((1, S[0][0]), (0, S[1][0]))) < 0:  # det(e1, S e1) < 0
        S = _as_int(inverse2(Rp))
    for e in _search_vectors():
        Se = mat_vec(S, e)
        if e[0] * Se[1] - e[1] * Se[0] != 1:
            continue
        second = Se if n in (3, 4) else (Se[0] - e[0], Se[1] - e[1])
        P = ((e[0], second[0]), (e[1], second[1]))
        R = ((K.ROTATIONS[n][0], K.ROTATIONS[n][1]), (K.ROTATIONS[n][2], K.ROTATIONS[n][3]))
        if mat_mul(S, P) != mat_mul(P, R):
            raise CheckFailure("adapted basis does not conjugate the rotation")
        return P
    raise AssertionError("unreachable")


def quotient_step(pair: QotePair, samples: int = SEMANTIC_SAMPLES, seed: int = 0) -> QuotientStep:
    """Factor out H: the new domain torus is R^2 / (Z^2 + H)."""
    H = compute_H(pair)
    if len(H) == 1:
        raise TrivialH("H is trivial; F is already pi-injective")
    B = superlattice_basis([h.coords for h in H])
    if lattice_index(B) != len(H):
        raise CheckFailure("superlattice index differs from |H|")
    Binv = inverse2(B)
    Rp = _as_int(mat_mul(mat_mul(Binv, pair.group.R), B))
    P = rotation_adapted_basis(pair.n, Rp)
    B = mat_mul(B, P)
    Binv = inverse2(B)
    A_new = _as_int(mat_mul(mat_mul(Binv, pair.F.A), B))
    b_new = mat_vec(Binv, pair.F.b)
    C_new = _as_int(mat_mul(pair.Q.A, B))
    new = validate(pair.group, AffineEndo(A_new, b_new), AffineEndo(C_new, pair.Q.b),
                   descended=True)
    if new.deg_pi * len(H) != pair.deg_pi or new.deg_pi >= pair.deg_pi:
        raise CheckFailure(f"degree ledger broken: {pair.deg_pi} != {new.deg_pi} * {len(H)}")
    if new.F.det != pair.F.det:
        raise CheckFailure("quotient changed det F")
    checked = _check_same_f(pair, new, samples, seed)
    return QuotientStep(tuple(H), B, pair, new, checked)


def _check_same_f(old: QotePair, new: QotePair, samples: int, seed: int) -> int:
    pts = list(sorted_points(old.level_one))
    pts += random_sphere_points(old, samples, random.Random(seed), exclude=old.level_one)
    for p in pts:
        a, b = eval_f(old, p), eval_f(new, p)
        if a != b:
            raise CheckFailure(f"quotient changed f at {p}: {a} vs {b}")
    if new.postcritical != old.postcritical:
        raise CheckFailure("quotient changed the postcritical set")
    return len(pts)


def make_injective(pair: QotePair, samples: int = SEMANTIC_SAMPLES, seed: int = 0):
    """Repeat quotient steps until F is pi-injective.

    Returns ``(final_pair, steps)``; deg(pi) strictly drops at each step.
    """
    steps = []
    cur = pair
    while len(compute_H(cur)) > 1:
        step = quotient_step(cur, samples, seed)
        steps.append(step)
        cur = step.new_pair
    if not decide_pi_injectivity(cur).injective:
        raise CheckFailure("make_injective ended on a non-injective pair")
    return cur, steps


def instance_normal_form(pair: QotePair) -> tuple:
    """Coordinate-free key for pairs whose precomposer is invertible.

    The precomposer is conjugated away and F is taken up to the rotation
    ambiguity ``R^k F``; other pairs are keyed literally.
    """
    C, c = pair.Q.A, pair.Q.b
    if abs(det2(C)) != 1:
        return (pair.n, pair.F.A, pair.F.b, C, c)
    Cinv = _as_int(inverse2(C))
    A2 = mat_mul(mat_mul(C, pair.F.A), Cinv)
    Cb = mat_vec(C, pair.F.b)
    A2c = mat_vec(A2, c)
    b2 = tuple(Cb[i] + c[i] - A2c[i] for i in range(2))
    return (pair.n,) + min(_rotated(pair, A2, b2))


def _rotated(pair, A, b):
    for Rk in pair.group.powers:
        e = AffineEndo(mat_mul(Rk, A), mat_vec(Rk, b))
        yield (e.A, e.b)
