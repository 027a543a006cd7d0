"""Instance parsing, per-instance analysis reports and parameter sweeps."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Optional

from . import _kernels as K
from .errors import InvalidInstance, NotCompatible, NotEquivariant, OrbifoldKitError
from .exact_lattice import format_rat, identity, mat_mul, mat_sub, mat_vec, solve_congruence
from .injectivity import (
    check_fiber_degree_constancy,
    check_transversality,
    compute_H,
    decide_pi_injectivity,
    fiber_degree_table,
    iterate_injectivity,
    make_injective,
    pair_to_json,
)
from .orbifold import (
    INF,
    RamifiedPortrait,
    classify,
    portrait_from_qote,
    ramification,
    ramification_oracle,
    signature_taxonomy,
)
from .qote import QotePair, eval_f, marked_sets, validate
from .torus import AffineEndo, RotationGroup, TorusPoint, check_equivariance, sorted_points

DEFAULT_SAMPLES = 100
DEFAULT_ITERATES = 3
SEED_ENV = "ORBIFOLDKIT_SEED"


def resolve_seed(seed: Optional[int]) -> int:
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidInstance(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return 0 if seed is None else seed


@dataclass
class InstanceSpec:
    group: RotationGroup
    F: AffineEndo
    Q: Optional[AffineEndo] = None
    samples: int = DEFAULT_SAMPLES
    marked_depth: int = 3
    seed: int = 0
    descended: bool = False

    @classmethod
    def from_json(cls, data) -> "InstanceSpec":
        if not isinstance(data, dict):
            raise InvalidInstance("instance must be a JSON object")
        for key in ("group", "endomorphism"):
            if key not in data:
                raise InvalidInstance(f"instance is missing {key!r}")
        group = RotationGroup.from_json(data["group"])
        F = AffineEndo.from_json(data["endomorphism"])
        Q = _parse_precompose(data.get("precompose"), F)
        opts = data.get("analysis", {})
        if not isinstance(opts, dict):
            raise InvalidInstance("'analysis' must be an object")
        spec = cls(group, F, Q)
        desc = data.get("descended", False)
        if not isinstance(desc, bool):
            raise InvalidInstance("'descended' must be a boolean")
        spec.descended = desc
        for key in ("samples", "marked_depth", "seed"):
            if key in opts:
                val = opts[key]
                if isinstance(val, bool) or not isinstance(val, int) or val < 0:
                    raise InvalidInstance(f"analysis.{key} must be a non-negative integer")
                setattr(spec, key, val)
        return spec

    @classmethod
    def load(cls, path) -> "InstanceSpec":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInstance(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_json(data)

    def pair(self) -> QotePair:
        return validate(self.group, self.F, self.Q, descended=self.descended)


def _parse_precompose(value, F):
    if value is None:
        return None
    if isinstance(value, str):
        key = value.strip()
        if key in ("id", "identity"):
            return None
        if key == "F":
            return F
        if key.startswith("F^"):
            try:
                k = int(key[2:])
            except ValueError:
                k = -1
            if k >= 1:
                return F.power(k)
        raise InvalidInstance(f"unknown precompose shorthand {value!r}")
    return AffineEndo.from_json(value)


# -- per-instance analysis -----------------------------------------------------

def _check(ok: bool, **values) -> dict:
    return {"pass": bool(ok), **values}


def _nu_label(v):
    return "inf" if v == INF else v


def _points(pts) -> list:
    return [p.to_json() for p in sorted_points(pts)]


def chain_rule_failures(pair: QotePair, points, degrees) -> tuple:
    """Check ``deg(pi, F x) = deg(f, pi x) deg(pi, x)`` at every lift."""
    n, fk, qk = pair.n, pair.F.kernel, pair.Q.kernel
    checked = 0
    bad = []
    for p in points:
        for x in K.pi_fiber(n, qk, *p.rep):
            lhs = K.stabilizer_order(n, *K.affine_apply(qk, *K.affine_apply(fk, *x)))
            rhs = degrees[p] * K.stabilizer_order(n, *K.affine_apply(qk, *x))
            checked += 1
            if lhs != rhs:
                bad.append({"lift": TorusPoint(*x).to_json(), "lhs": lhs, "rhs": rhs})
    return checked, bad


def dynamical_postcritical(pair: QotePair, critical) -> frozenset:
    out = set()
    frontier = {eval_f(pair, c) for c, _ in critical}
    while frontier:
        out |= frontier
        frontier = {eval_f(pair, p) for p in frontier} - out
    return frozenset(out)


def analyze_pair(pair: QotePair, *, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                 marked_depth: int = 3, iterates: int = DEFAULT_ITERATES,
                 quotient: bool = False) -> dict:
    """Full exact report for a validated pair; ``report['ok']`` is the verdict."""
    checks = {}
    report = {"instance": pair_to_json(pair),
              "degrees": {"f": pair.deg_f, "pi": pair.deg_pi}}
    try:
        _analyze_into(pair, report, checks, samples, seed, marked_depth, iterates, quotient)
    except OrbifoldKitError as exc:
        checks["internal"] = _check(False, error=f"{type(exc).__name__}: {exc}")
    report["checks"] = checks
    report["ok"] = all(c["pass"] for c in checks.values())
    return report


def _analyze_into(pair, report, checks, samples, seed, marked_depth, iterates, quotient):
    report["S_pi"] = [{"point": x.to_json(), "degree": k} for x, k in pair.s_pi]
    crit = pair.critical
    post = pair.postcritical
    report["P_f"] = _points(post)
    report["S_f"] = [{"point": p.to_json(), "degree": k} for p, k in crit]
    total = sum(k - 1 for _, k in crit)
    checks["riemann_hurwitz"] = _check(total == 2 * pair.deg_f - 2,
                                       sum_deg_minus_one=total, expected=2 * pair.deg_f - 2)
    dyn = dynamical_postcritical(pair, crit)
    checks["postcritical_matches_dynamics"] = _check(
        dyn == post, from_projection=len(post), from_critical_orbits=len(dyn))

    marks = marked_sets(pair, marked_depth)
    report["marked_set_sizes"] = marks.sizes()

    portrait = portrait_from_qote(pair)
    degrees = portrait.delta
    checked, bad = chain_rule_failures(pair, portrait.vertices, degrees)
    checks["chain_rule"] = _check(not bad, lifts_checked=checked, failures=bad[:5])

    orb = ramification(portrait)
    cls = classify(orb)
    report["orbifold"] = {
        "nu": {str(p): _nu_label(orb.nu[p]) for p in sorted_points(orb.nu)},
        "signature": [_nu_label(v) for v in orb.signature],
        "chi": format_rat(orb.chi),
        "classification": cls.value,
        "tag": signature_taxonomy(orb),
    }
    checks["chi_zero"] = _check(orb.chi == 0, chi=format_rat(orb.chi))
    checks["no_infinite_ramification"] = _check(INF not in orb.signature)
    oracle = ramification_oracle(pair, len(portrait.vertices))
    mismatch = [str(p) for p in sorted_points(orb.nu) if oracle[p] != orb.nu[p]]
    checks["oracle_equivalence"] = _check(
        not mismatch, depth=len(portrait.vertices), mismatched=mismatch)

    table = fiber_degree_table(pair)
    const = check_fiber_degree_constancy(pair)
    checks["fiber_degree_constancy"] = _check(
        const, fibers={str(p): degs for p, degs in table.items()})

    verdict = decide_pi_injectivity(pair)
    H = compute_H(pair)
    report["injectivity"] = verdict.to_json()
    report["H"] = [h.to_json() for h in H]
    checks["injectivity_paths_agree"] = _check(True, H_order=len(H),
                                               injective=verdict.injective)

    if verdict.injective:
        if iterates >= 2:
            its = iterate_injectivity(pair, iterates)
            checks["iterates_injective"] = _check(all(v.injective for v in its),
                                             powers=list(range(1, iterates + 1)),
                                             injective=[v.injective for v in its])
        for k in (1, 2):
            target = pair if k == 1 else pair.power(k)
            res = check_transversality(target, samples, seed)
            checks[f"transversality_F{k}"] = _check(res.transverse, **res.to_json())
    if quotient:
        final, steps = make_injective(pair, seed=seed)
        degs = [pair.deg_pi] + [s.new_pair.deg_pi for s in steps]
        report["quotient_trace"] = [s.to_json() for s in steps]
        report["final_pair"] = pair_to_json(final)
        decreasing = all(a > b for a, b in zip(degs, degs[1:]))
        ledger = all(s.old_pair.deg_pi == s.new_pair.deg_pi * len(s.H) for s in steps)
        checks["quotient_ledger"] = _check(decreasing and ledger, deg_pi_chain=degs,
                                           steps=len(steps))
        if steps:
            checks["quotient_preserves_f"] = _check(
                True, points_checked=[s.semantic_points for s in steps])
            checks["quotient_final_constancy"] = _check(check_fiber_degree_constancy(final))


def run_analyze(spec: InstanceSpec, quotient: bool = False) -> dict:
    pair = spec.pair()
    return analyze_pair(pair, samples=spec.samples, seed=spec.seed,
                        marked_depth=spec.marked_depth, quotient=quotient)


def run_quotient(spec: InstanceSpec) -> dict:
    return run_analyze(spec, quotient=True)


def run_portrait(portrait: RamifiedPortrait) -> dict:
    orb = ramification(portrait)
    cls = classify(orb)
    report = {
        "degree": portrait.degree,
        "vertices": len(portrait.vertices),
        "postcritical": sorted(map(str, portrait.postcritical)),
        "orbifold": {
            "nu": {str(p): _nu_label(orb.nu[p]) for p in sorted(orb.nu, key=str)},
            "signature": [_nu_label(v) for v in orb.signature],
            "chi": format_rat(orb.chi),
            "classification": cls.value,
            "tag": signature_taxonomy(orb),
        },
        "riemann_hurwitz_total": portrait.riemann_hurwitz_total(),
    }
    if INF not in orb.signature:
        oracle = ramification_oracle(portrait, len(portrait.vertices))
        report["oracle_agrees"] = all(oracle[p] == orb.nu[p] for p in orb.nu)
    return report


# -- sweeps ---------------------------------------------------------------------

def _fixed_translations(group: RotationGroup) -> list:
    fam = solve_congruence(mat_sub(identity(2), group.R), (0, 0))
    return fam.points()


def instance_key(group: RotationGroup, F: AffineEndo, qmode: str) -> tuple:
    """Canonical form up to conjugation by group-fixed translations and the
    rotation ambiguity ``F -> R^k F``; both leave f unchanged up to
    conjugacy."""
    best = None
    I = identity(2)
    shifts = mat_sub(F.A, I)
    for t in _fixed_translations(group):
        dt = mat_vec(shifts, t)
        b = (F.b[0] + dt[0], F.b[1] + dt[1])
        for Rk in group.powers:
            e = AffineEndo(mat_mul(Rk, F.A), mat_vec(Rk, b))
            cand = (e.A, tuple((x.numerator, x.denominator) for x in e.b))
            if best is None or cand < best:
                best = cand
    return (group.order, qmode) + best


def enumerate_instances(orders, det_max: int, entry_max: int, precompose=("id", "F")):
    """Yield ``(key, group, F, qmode)`` for equivariant candidates, skipping
    duplicates of the canonical form."""
    seen = set()
    rng = range(-entry_max, entry_max + 1)
    for n in orders:
        group = RotationGroup(n)
        for a, b, c, d in product(rng, repeat=4):
            det = a * d - b * c
            if not 2 <= abs(det) <= det_max:
                continue
            A = ((a, b), (c, d))
            j = check_equivariance(group, AffineEndo(A))
            if j is None:
                continue
            Rj = group.powers[j]
            for bvec in solve_congruence(mat_sub(identity(2), Rj), (0, 0)).points():
                F = AffineEndo(A, bvec)
                for qmode in precompose:
                    key = instance_key(group, F, qmode)
                    if key in seen:
                        continue
                    seen.add(key)
                    yield key, group, F, qmode


def _sweep_one(args):
    key, group, F, qmode, samples, seed = args
    Q = F if qmode == "F" else None
    try:
        pair = validate(group, F, Q)
    except (NotEquivariant, NotCompatible, InvalidInstance) as exc:
        return {"key": key, "accepted": False, "reason": f"{type(exc).__name__}: {exc}"}
    rep = analyze_pair(pair, samples=samples, seed=seed, marked_depth=1, quotient=True)
    return {"key": key, "accepted": True, "report": rep}


def run_sweep(orders=(2, 3, 4, 6), det_max: int = 10, entry_max: int = 2,
              precompose=("id", "F"), samples: int = DEFAULT_SAMPLES, seed: int = 0,
              jobs: int = 1, keep_reports: bool = False) -> dict:
    if det_max < 2 and entry_max >= 1:
        raise InvalidInstance("det bound must be at least 2")
    started = time.perf_counter()
    tasks = [(key, g, F, q, samples, seed)
             for key, g, F, q in enumerate_instances(orders, det_max, entry_max, precompose)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks, chunksize=8))
    else:
        results = [_sweep_one(t) for t in tasks]
    results.sort(key=lambda r: r["key"])
    return summarize_sweep(results, orders, det_max, entry_max, precompose, samples, seed,
                           keep_reports, time.perf_counter() - started)


def summarize_sweep(results, orders, det_max, entry_max, precompose, samples, seed,
                    keep_reports, elapsed) -> dict:
    accepted = [r for r in results if r["accepted"]]
    failures = []
    per_check = {}
    signatures = {}
    injective = 0
    for r in accepted:
        rep = r["report"]
        for name, c in rep["checks"].items():
            tally = per_check.setdefault(name, {"pass": 0, "fail": 0})
            tally["pass" if c["pass"] else "fail"] += 1
        if not rep["ok"]:
            failures.append({"instance": rep["instance"],
                             "failed": [k for k, c in rep["checks"].items() if not c["pass"]]})
        sig = ",".join(str(v) for v in rep.get("orbifold", {}).get("signature", []))
        signatures[sig] = signatures.get(sig, 0) + 1
        injective += bool(rep.get("injectivity", {}).get("injective"))
    summary = {
        "parameters": {"orders": list(orders), "det_max": det_max, "entry_max": entry_max,
                       "precompose": list(precompose), "samples": samples, "seed": seed},
        "enumerated": len(results),
        "accepted": len(accepted),
        "rejected": len(results) - len(accepted),
        "pi_injective": injective,
        "signatures": dict(sorted(signatures.items())),
        "checks": dict(sorted(per_check.items())),
        "failures": failures,
        "ok": not failures,
    }
    if keep_reports:
        summary["reports"] = [r["report"] for r in accepted]
    summary["_elapsed"] = elapsed
    return summary


def format_sweep_table(summary: dict) -> str:
    lines = [
        f"instances enumerated: {summary['enumerated']}  accepted: {summary['accepted']}"
        f"  rejected: {summary['rejected']}  pi-injective: {summary['pi_injective']}",
        "signatures: " + ", ".join(f"({k}) x{v}" for k, v in summary["signatures"].items()),
        f"{'check':32s} {'pass':>6s} {'fail':>6s}",
    ]
    for name, t in summary["checks"].items():
        lines.append(f"{name:32s} {t['pass']:6d} {t['fail']:6d}")
    lines.append(f"failures: {len(summary['failures'])}  "
                 f"elapsed: {summary.get('_elapsed', 0.0):.1f}s")
    return "\n".join(lines)


def dumps(data) -> str:
    clean = {k: v for k, v in data.items() if not k.startswith("_")}
    return json.dumps(clean, indent=2) + "\n"
