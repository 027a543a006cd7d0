import random
from fractions import Fraction as Fr

import pytest
from conftest import TWO, doubling
from hypothesis import given
from hypothesis import strategies as st

from orbifoldkit.errors import InvalidInstance, NotCompatible, NotEquivariant
from orbifoldkit.qote import (
    critical_set_f,
    eval_f,
    lift_identity_check,
    local_degree_f,
    local_degree_pi,
    marked_sets,
    pi_fiber,
    postcritical_set,
    random_sphere_points,
    random_torus_point,
    sphere_preimages,
    validate,
)
from orbifoldkit.torus import AffineEndo, RotationGroup, TorusPoint, apply

P = TorusPoint.of
H, Q4 = Fr(1, 2), Fr(1, 4)
QUARTERS = [(0, Q4), (Q4, 0), (Q4, Q4), (H, Q4), (Q4, H), (Q4, 3 * Q4)]


def S(pair, x, y):
    return pair.sphere(P(x, y))


# validate

def test_validate_examples(base_pair, qf_pair):
    assert base_pair.twist == 0 and base_pair.deg_pi == 2 and base_pair.deg_f == 4
    assert qf_pair.twist == 0 and qf_pair.deg_pi == 8
    with pytest.raises(NotEquivariant) as err:
        validate(RotationGroup(4), AffineEndo(((1, 0), (0, 2))))
    assert err.value.which == "F"


def test_validate_rejections():
    with pytest.raises(InvalidInstance):
        validate(RotationGroup(2), AffineEndo(((1, 0), (0, 1))))
    with pytest.raises(NotEquivariant):
        validate(RotationGroup(2), AffineEndo(TWO), AffineEndo(TWO, (Fr(1, 3), 0)))
    # diag(1,3) commutes with F neither exactly nor up to the rotation
    F = AffineEndo(((1, 1), (1, -1)))
    with pytest.raises(NotCompatible):
        validate(RotationGroup(2), F, AffineEndo(((1, 0), (0, 3))))


# fibers and local degrees

def test_pi_fibers(base_pair, qf_pair):
    assert set(pi_fiber(base_pair, S(base_pair, Q4, 0))) == {P(Q4, 0), P(3 * Q4, 0)}
    assert pi_fiber(base_pair, S(base_pair, 0, 0)) == [P(0, 0)]
    assert set(pi_fiber(qf_pair, qf_pair.sphere(P(0, 0)))) == {P(0, 0), P(H, 0), P(0, H), P(H, H)}


def test_local_degree_pi(base_pair, qf_pair):
    assert local_degree_pi(base_pair, P(H, 0)) == 2
    assert local_degree_pi(base_pair, P(Fr(1, 3), Fr(1, 7))) == 1
    assert local_degree_pi(qf_pair, P(Q4, 0)) == 2


def test_eval_f(base_pair):
    assert eval_f(base_pair, S(base_pair, Q4, 0)) == S(base_pair, H, 0)
    assert eval_f(base_pair, S(base_pair, 0, 0)) == S(base_pair, 0, 0)


def test_eval_f_order3_fixed_points_all_lifts():
    pair = doubling(3)
    for x, _ in pair.s_pi:
        p = pair.sphere(x)
        expected = pair.sphere(apply(pair.F, x))
        assert eval_f(pair, p) == expected
        for lift in pi_fiber(pair, p):
            assert pair.sphere(apply(pair.F, lift)) == expected


def test_local_degree_f(base_pair):
    assert local_degree_f(base_pair, S(base_pair, Q4, 0)) == 2
    assert local_degree_f(base_pair, S(base_pair, 0, 0)) == 1
    assert local_degree_f(base_pair, S(base_pair, Fr(2, 7), Fr(3, 11))) == 1


# critical and postcritical structure

def test_postcritical(base_pair, qf_pair):
    half_pts = {S(base_pair, 0, 0), S(base_pair, H, 0), S(base_pair, 0, H), S(base_pair, H, H)}
    assert set(postcritical_set(base_pair)) == half_pts
    assert set(postcritical_set(qf_pair)) == half_pts
    assert len(postcritical_set(doubling(3))) == 3


def test_critical_points_base(base_pair):
    crit = critical_set_f(base_pair)
    assert {p for p, _ in crit} == {S(base_pair, *q) for q in QUARTERS}
    assert {p.rep for p, _ in crit} == {P(*q) for q in QUARTERS}
    assert all(k == 2 for _, k in crit)
    post = base_pair.postcritical
    level1 = marked_sets(base_pair, 1)[1]
    assert {p for p, _ in crit} == set(level1) - set(post)
    assert not {p for p, _ in crit} & post


@pytest.mark.parametrize("n", [3, 4, 6])
def test_riemann_hurwitz_other_groups(n):
    pair = doubling(n)
    assert sum(k - 1 for _, k in pair.critical) == 6


def test_sphere_preimages(base_pair):
    assert sphere_preimages(base_pair, S(base_pair, 0, 0)) == [
        (S(base_pair, *q), 1) for q in [(0, 0), (0, H), (H, 0), (H, H)]]
    assert sphere_preimages(base_pair, S(base_pair, H, 0)) == [
        (S(base_pair, Q4, 0), 2), (S(base_pair, Q4, H), 2)]
    gen = sphere_preimages(base_pair, S(base_pair, Fr(1, 5), Fr(2, 7)))
    assert len(gen) == 4 and all(k == 1 for _, k in gen)


def test_marked_sets(base_pair):
    ms = marked_sets(base_pair, 3)
    assert ms.sizes()[:2] == [4, 10]
    assert marked_sets(base_pair, 0).sizes() == [4]
    for j in range(3):
        assert ms[j] <= ms[j + 1]
        assert all(eval_f(base_pair, p) in ms[j] for p in ms[j + 1])


# random equivariant pairs: the structural identities hold

MATS = [((a, b), (c, d)) for a in range(-2, 3) for b in range(-2, 3)
        for c in range(-2, 3) for d in range(-2, 3) if 2 <= abs(a * d - b * c) <= 6]


@st.composite
def order2_pairs(draw):
    A = draw(st.sampled_from(MATS))
    b = (Fr(draw(st.integers(0, 1)), 2), Fr(draw(st.integers(0, 1)), 2))
    F = AffineEndo(A, b)
    Q = F if draw(st.booleans()) else None
    return validate(RotationGroup(2), F, Q)


@given(order2_pairs(), st.integers(0, 2 ** 16))
def test_structure_identities_on_random_pairs(pair, seed):
    rng = random.Random(seed)
    assert sum(k - 1 for _, k in pair.critical) == 2 * pair.deg_f - 2
    for p in pair.postcritical:
        assert eval_f(pair, p) in pair.postcritical
        assert sum(k for _, k in sphere_preimages(pair, p)) == pair.deg_f
    for _ in range(5):
        x = random_torus_point(rng, 60)
        lhs, rhs = lift_identity_check(pair, x)
        assert lhs == rhs


def test_random_samples_are_seeded_and_off_marked(base_pair):
    a = random_sphere_points(base_pair, 20, random.Random(3), exclude=base_pair.level_one)
    b = random_sphere_points(base_pair, 20, random.Random(3), exclude=base_pair.level_one)
    assert a == b and len(set(a)) == 20
    assert not set(a) & base_pair.level_one
    assert all(p.rep.d <= 1000 for p in a)
