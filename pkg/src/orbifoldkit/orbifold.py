"""Ramification functions, signatures and Euler characteristics.

Works on :class:`RamifiedPortrait`, a finite piece of branch data of a
Thurston map: vertices, the dynamics between them, local degrees and which
vertices have their full preimage list present.  ``INF`` stands for an
infinite ramification value.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import inf as INF
from math import lcm
from typing import Optional

from .errors import CheckFailure, IncompletePortrait, InvalidInstance


class Classification(str, Enum):
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    NOT_REALIZABLE = "not_realizable"


LATTES_SIGNATURES = {(2, 2, 2, 2), (2, 4, 4), (3, 3, 3), (2, 3, 6)}
PERIODIC_CRITICAL_SIGNATURES = {(INF, INF), (2, 2, INF)}
LATTES_TAG = "lattes-type (no periodic critical points)"
PERIODIC_TAG = "parabolic with periodic critical points"


@dataclass
class RamifiedPortrait:
    degree: int
    vertices: tuple
    sigma: dict
    delta: dict
    complete: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InvalidInstance("portrait vertices must be distinct")
        if isinstance(self.degree, bool) or not isinstance(self.degree, int) or self.degree < 2:
            raise InvalidInstance(f"portrait degree must be an integer >= 2, got {self.degree!r}")
        self.delta = {v: self.delta.get(v, 1) for v in self.vertices}
        for v in self.vertices:
            if v not in self.sigma or self.sigma[v] not in vs:
                raise InvalidInstance(f"vertex {v!r} has no image among the vertices")
            k = self.delta[v]
            if isinstance(k, bool) or not isinstance(k, int) or k < 1:
                raise InvalidInstance(f"local degree at {v!r} must be a positive integer")
        self.complete = frozenset(self.complete)
        if not self.complete <= vs:
            raise InvalidInstance("complete vertices must be portrait vertices")
        self._pre = {v: [] for v in self.vertices}
        for v in self.vertices:
            self._pre[self.sigma[v]].append(v)
        for w in self.complete:
            total = sum(self.delta[v] for v in self._pre[w])
            if total != self.degree:
                raise InvalidInstance(
                    f"complete vertex {w!r} has preimage degrees summing to {total}, not {self.degree}")

    def preimages(self, w) -> list:
        return list(self._pre[w])

    @property
    def critical(self) -> list:
        return [v for v in self.vertices if self.delta[v] >= 2]

    @property
    def postcritical(self) -> frozenset:
        out = set()
        frontier = {self.sigma[v] for v in self.critical}
        while frontier:
            out |= frontier
            frontier = {self.sigma[v] for v in frontier} - out
        return frozenset(out)

    def riemann_hurwitz_total(self) -> int:
        return sum(self.delta[v] - 1 for v in self.vertices)

    def to_json(self) -> dict:
        label = str
        return {
            "degree": self.degree,
            "vertices": [label(v) for v in self.vertices],
            "map": {label(v): label(self.sigma[v]) for v in self.vertices},
            "local_degrees": {label(v): self.delta[v] for v in self.vertices},
            "complete": [label(v) for v in self.vertices if v in self.complete],
        }

    @classmethod
    def from_json(cls, data) -> "RamifiedPortrait":
        if not isinstance(data, dict):
            raise InvalidInstance("portrait must be a JSON object")
        try:
            verts = [str(v) for v in data["vertices"]]
            sigma = {str(k): str(v) for k, v in data["map"].items()}
            delta = {str(k): v for k, v in data.get("local_degrees", {}).items()}
            complete = [str(v) for v in data.get("complete", [])]
            degree = data["degree"]
        except (KeyError, AttributeError, TypeError) as exc:
            raise InvalidInstance(f"malformed portrait: {exc}") from exc
        extra = set(delta) - set(verts)
        if extra:
            raise InvalidInstance(f"local degrees given for unknown vertices {sorted(extra)}")
        return cls(degree, tuple(verts), sigma, delta, frozenset(complete))


@dataclass(frozen=True)
class OrbifoldData:
    nu: dict = field(hash=False)
    signature: tuple
    chi: Fraction

    def to_json(self, label=str) -> dict:
        from .exact_lattice import format_rat
        return {
            "nu": {label(k): _fmt_nu(v) for k, v in self.nu.items()},
            "signature": [_fmt_nu(v) for v in self.signature],
            "chi": format_rat(self.chi),
        }


def _fmt_nu(v):
    return "inf" if v == INF else v


def signature_of(nu: dict) -> tuple:
    return tuple(sorted(v for v in nu.values() if v >= 2))


def portrait_from_qote(pair) -> RamifiedPortrait:
    """Branch portrait on ``P_f`` and ``f^-1(P_f)`` of a validated pair."""
    from .qote import eval_f, local_degree_f
    from .torus import sorted_points

    verts = tuple(sorted_points(pair.level_one))
    sigma = {v: eval_f(pair, v) for v in verts}
    delta = {v: local_degree_f(pair, v) for v in verts}
    return RamifiedPortrait(pair.deg_f, verts, sigma, delta, frozenset(pair.postcritical))


def infinite_vertices(portrait: RamifiedPortrait) -> frozenset:
    """Union of the periodic cycles that contain a critical vertex."""
    out = set()
    n = len(portrait.vertices)
    for v in portrait.critical:
        w = portrait.sigma[v]
        cycle = [w]
        for _ in range(n):
            if w == v:
                out.update(cycle)
                break
            w = portrait.sigma[w]
            cycle.append(w)
    return frozenset(out)


def ramification(portrait: RamifiedPortrait) -> OrbifoldData:
    """Least ramification function on the postcritical vertices.

    Infinite values are found first by cycle analysis; the finite part is
    the least fixed point of ``nu(x) = lcm(nu(y) * deg(y) : y -> x)``.
    """
    post = portrait.postcritical
    missing = sorted(map(str, post - portrait.complete))
    if missing:
        raise IncompletePortrait(f"postcritical vertices without full preimages: {missing}")
    inf_set = infinite_vertices(portrait)
    nu = {p: (INF if p in inf_set else 1) for p in post}
    order = sorted(post, key=str)
    for _ in range(len(post) + 2):
        changed = False
        for x in order:
            if nu[x] == INF:
                continue
            val = 1
            for y in portrait.preimages(x):
                ny = nu.get(y, 1)
                if ny == INF:
                    val = INF
                    break
                val = lcm(val, ny * portrait.delta[y])
            if val != nu[x]:
                nu[x] = val
                changed = True
        if not changed:
            break
    else:
        raise CheckFailure("ramification iteration did not stabilize")
    sig = signature_of(nu)
    return OrbifoldData(nu, sig, euler_characteristic(sig))


def satisfies_multiple_condition(portrait: RamifiedPortrait, nu: dict) -> bool:
    for x in portrait.vertices:
        nx = nu.get(x, 1)
        for y in portrait.preimages(x):
            need = nu.get(y, 1)
            if need == INF or nx == INF:
                if nx != INF:
                    return False
                continue
            if nx % (need * portrait.delta[y]):
                return False
    return True


def ramification_oracle(source, depth: int) -> dict:
    """Brute-force lower bound ``lcm{deg(f^m, y) : m <= depth, f^m(y) = p}``.

    ``source`` is a portrait or a validated pair; pairs are expanded with
    exact sphere preimages.  Backward branches leaving the postcritical set
    carry no further degree and are not expanded.
    """
    if isinstance(source, RamifiedPortrait):
        post = source.postcritical

        def pre(x):
            return [(y, source.delta[y]) for y in source.preimages(x)]
    else:
        from .qote import sphere_preimages
        post = source.postcritical
        cache = {}

        def pre(x):
            if x not in cache:
                cache[x] = sphere_preimages(source, x)
            return cache[x]

    out = {}
    for p in post:
        best = 1
        states = {(p, 1)}
        for _ in range(depth):
            nxt = set()
            for x, deg in states:
                if x not in post and x != p:
                    continue
                for y, k in pre(x):
                    nxt.add((y, deg * k))
            for _, deg in nxt:
                best = lcm(best, deg)
            states = nxt
        out[p] = best
    return out


def euler_characteristic(data) -> Fraction:
    """``2 - sum(1 - 1/nu)`` over a signature or OrbifoldData; 1/inf = 0."""
    sig = data.signature if isinstance(data, OrbifoldData) else tuple(data)
    total = Fraction(2)
    for v in sig:
        total -= 1 if v == INF else 1 - Fraction(1, v)
    return total


def classify(data) -> Classification:
    chi = data if isinstance(data, Fraction) else euler_characteristic(data)
    if chi > 0:
        return Classification.NOT_REALIZABLE
    if chi == 0:
        return Classification.PARABOLIC
    return Classification.HYPERBOLIC


def signature_taxonomy(data) -> Optional[str]:
    sig = data.signature if isinstance(data, OrbifoldData) else tuple(data)
    if sig in LATTES_SIGNATURES:
        return LATTES_TAG
    if sig in PERIODIC_CRITICAL_SIGNATURES:
        return PERIODIC_TAG
    return None


def parse_signature(text) -> tuple:
    vals = []
    for tok in text:
        if tok in ("inf", "oo", INF):
            vals.append(INF)
        else:
            vals.append(int(tok))
    return tuple(sorted(vals))
