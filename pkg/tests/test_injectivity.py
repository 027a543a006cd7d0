import random
from fractions import Fraction as Fr
from itertools import product

import pytest
from conftest import TWO
from hypothesis import given, settings
from hypothesis import strategies as st

from orbifoldkit.errors import TrivialH
from orbifoldkit.injectivity import (
    check_fiber_degree_constancy,
    check_transversality,
    compute_H,
    decide_pi_injectivity,
    fiber_degrees_constant,
    instance_normal_form,
    iterate_injectivity,
    make_injective,
    quotient_step,
)
from orbifoldkit.qote import eval_f, pi_fiber, random_sphere_points, validate
from orbifoldkit.torus import AffineEndo, RotationGroup, TorusPoint, apply

P = TorusPoint.of
H = Fr(1, 2)


def brute_force_injective(pair, den):
    """Search all points of (1/den)Z^2 for u != v in one pi-fiber with
    F u = F v and f(pi v) off P_f."""
    fibers = {}
    for i, j in product(range(den), repeat=2):
        v = P(Fr(i, den), Fr(j, den))
        if pair.sphere(apply(pair.F, v)) in pair.postcritical:
            continue
        fibers.setdefault((pair.sphere(v), apply(pair.F, v)), []).append(v)
    return all(len(vs) == 1 for vs in fibers.values())


# H

def test_H_examples(base_pair, qf_pair):
    assert compute_H(base_pair) == [P(0, 0)]
    assert set(compute_H(qf_pair)) == {P(0, 0), P(H, 0), P(0, H), P(H, H)}
    F = AffineEndo(((1, 1), (-1, 1)))
    pair = validate(RotationGroup(2), F, AffineEndo(TWO))
    assert set(compute_H(pair)) == {P(0, 0), P(H, H)}


# verdicts

def test_base_pair_injective(base_pair):
    v = decide_pi_injectivity(base_pair)
    assert v.injective and v.h_order == 1 and not v.witnesses


def test_qf_pair_not_injective_with_verified_witness(qf_pair):
    v = decide_pi_injectivity(qf_pair)
    assert not v.injective and v.h_order == 4 and v.witnesses
    for w in v.witnesses:
        assert w.u != w.v
        assert qf_pair.sphere(w.u) == qf_pair.sphere(w.v) == w.y
        assert apply(qf_pair.F, w.u) == apply(qf_pair.F, w.v)
        assert eval_f(qf_pair, w.y) not in qf_pair.postcritical


def test_quarter_lattice_collisions_sit_over_postcritical(qf_pair):
    """F-collisions inside a fiber do occur at quarter points, but their
    images are postcritical, so they are not counted as witnesses."""
    q = P(Fr(1, 4), 0)
    fiber = pi_fiber(qf_pair, qf_pair.sphere(q))
    images = [apply(qf_pair.F, x) for x in fiber]
    assert len(set(images)) < len(images)
    assert eval_f(qf_pair, qf_pair.sphere(q)) in qf_pair.postcritical


def test_order4_tripling_injective():
    pair = validate(RotationGroup(4), AffineEndo(((3, 0), (0, 3))))
    assert decide_pi_injectivity(pair).injective


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@pytest.mark.parametrize("qf", [False, True])
def test_verdict_matches_brute_force(n, qf):
    F = AffineEndo(TWO)
    pair = validate(RotationGroup(n), F, F if qf else None)
    assert decide_pi_injectivity(pair).injective == brute_force_injective(pair, 12)


def test_iterates(base_pair, qf_pair):
    assert all(v.injective for v in iterate_injectivity(base_pair, 3))
    its = iterate_injectivity(qf_pair, 2)
    assert not its[0].injective and len(its) == 2


# transversality

def test_transversality_base(base_pair):
    res = check_transversality(base_pair, 100, seed=0)
    assert res.transverse and res.points_checked == 110
    assert check_transversality(base_pair.power(2), 100, seed=1).transverse


def test_transversality_fails_for_qf(qf_pair):
    # every non-injective fiber produces a failing triple
    res = check_transversality(qf_pair, 100, seed=0)
    assert not res.transverse
    x, lift, y = res.failure
    assert lift in pi_fiber(qf_pair, x)


def test_transversality_singleton_fiber(base_pair):
    crit = [base_pair.sphere(P(0, 0))]
    assert check_transversality(base_pair, crit).transverse


# fiber-degree constancy

def test_constancy_examples(base_pair, qf_pair):
    assert check_fiber_degree_constancy(base_pair)
    assert check_fiber_degree_constancy(qf_pair)
    assert not fiber_degrees_constant([[2, 2], [1, 2]])
    assert fiber_degrees_constant([[1, 1, 1], [3]])


# quotient step

def test_quotient_qf_to_base(base_pair, qf_pair):
    step = quotient_step(qf_pair)
    assert len(step.H) == 4 and step.new_pair.deg_pi == 2
    assert step.old_pair.deg_pi == step.new_pair.deg_pi * len(step.H)
    assert step.new_pair.F.det == qf_pair.F.det
    assert instance_normal_form(step.new_pair) == instance_normal_form(base_pair)


def test_quotient_trivial_H(base_pair):
    with pytest.raises(TrivialH):
        quotient_step(base_pair)


def test_make_injective_chains(base_pair, qf_pair):
    final, steps = make_injective(base_pair)
    assert final is base_pair and steps == []
    final, steps = make_injective(qf_pair)
    assert len(steps) == 1 and final.deg_pi == 2
    F = AffineEndo(TWO)
    pair = validate(RotationGroup(2), F, F.power(2))
    assert pair.deg_pi == 32
    first = quotient_step(pair)
    assert len(first.H) == 4 and first.new_pair.deg_pi == 8
    final, steps = make_injective(pair)
    degs = [pair.deg_pi] + [s.new_pair.deg_pi for s in steps]
    assert degs == sorted(degs, reverse=True) and len(set(degs)) == len(degs)
    assert decide_pi_injectivity(final).injective and final.deg_pi == 2


@pytest.mark.parametrize("n,A", [(3, ((2, 0), (0, 2))), (4, ((1, -1), (1, 1))),
                                 (6, ((2, 0), (0, 2))), (2, ((1, 1), (-1, 1)))])
def test_quotient_preserves_f_other_groups(n, A):
    F = AffineEndo(A)
    pair = validate(RotationGroup(n), F, F)
    final, steps = make_injective(pair)
    assert steps
    rng = random.Random(5)
    for p in random_sphere_points(pair, 30, rng, exclude=pair.level_one):
        assert eval_f(pair, p) == eval_f(final, p)
    assert final.postcritical == pair.postcritical


MATS2 = [((a, b), (c, d)) for a in range(-2, 3) for b in range(-2, 3)
         for c in range(-2, 3) for d in range(-2, 3) if 2 <= abs(a * d - b * c) <= 5]


@settings(max_examples=25)
@given(st.sampled_from(MATS2), st.booleans())
def test_paths_agree_and_quotient_terminates(A, qf):
    F = AffineEndo(A)
    pair = validate(RotationGroup(2), F, F if qf else None)
    verdict = decide_pi_injectivity(pair)
    assert verdict.injective == (verdict.h_order == 1)
    final, steps = make_injective(pair)
    assert bool(steps) == (not verdict.injective)
    assert check_fiber_degree_constancy(final)
