from fractions import Fraction as Fr

import pytest
from conftest import doubling
from hypothesis import given
from hypothesis import strategies as st
from portraits import finite_portraits, random_portrait

from orbifoldkit.errors import IncompletePortrait, InvalidInstance
from orbifoldkit.orbifold import (
    INF,
    LATTES_TAG,
    PERIODIC_TAG,
    Classification,
    RamifiedPortrait,
    classify,
    euler_characteristic,
    infinite_vertices,
    parse_signature,
    portrait_from_qote,
    ramification,
    ramification_oracle,
    satisfies_multiple_condition,
    signature_taxonomy,
)


def z_squared():
    # 0 and inf fixed and critical, 1 fixed; -1 maps to 1
    return RamifiedPortrait(2, ("0", "oo", "1", "-1"),
                            {"0": "0", "oo": "oo", "1": "1", "-1": "1"},
                            {"0": 2, "oo": 2}, frozenset({"0", "oo", "1"}))


def two_two():
    # degree 3: p <-> q is a 2-cycle, each fed by one simple critical point
    return RamifiedPortrait(3, ("a", "r", "p", "q"),
                            {"a": "p", "r": "q", "p": "q", "q": "p"},
                            {"a": 2, "r": 2}, frozenset({"p", "q"}))


def test_portrait_validation():
    with pytest.raises(InvalidInstance):
        RamifiedPortrait(2, ("a",), {"a": "b"}, {})
    with pytest.raises(InvalidInstance):
        RamifiedPortrait(2, ("a",), {"a": "a"}, {"a": 1}, frozenset({"a"}))
    with pytest.raises(InvalidInstance):
        RamifiedPortrait(1, ("a",), {"a": "a"}, {})
    with pytest.raises(InvalidInstance):
        RamifiedPortrait.from_json({"degree": 2, "vertices": ["a"], "map": {"a": "a"},
                                    "local_degrees": {"zz": 2}})


def test_json_round_trip():
    p = z_squared()
    q = RamifiedPortrait.from_json(p.to_json())
    assert q.to_json() == p.to_json()


def test_base_pair_portrait(base_pair):
    portrait = portrait_from_qote(base_pair)
    assert len(portrait.vertices) == 10
    assert len(portrait.critical) == 6
    assert all(portrait.delta[v] == 2 for v in portrait.critical)
    assert {portrait.sigma[v] for v in portrait.critical} <= base_pair.postcritical
    assert portrait.riemann_hurwitz_total() == 6


def test_qf_portrait_matches_base(base_pair, qf_pair):
    a, b = portrait_from_qote(base_pair), portrait_from_qote(qf_pair)
    assert a.vertices == b.vertices and a.sigma == b.sigma and a.delta == b.delta


def test_order3_portrait():
    portrait = portrait_from_qote(doubling(3))
    assert len(portrait.postcritical) == 3
    assert portrait.riemann_hurwitz_total() == 6


def test_base_ramification(base_pair):
    orb = ramification(portrait_from_qote(base_pair))
    assert set(orb.nu.values()) == {2} and len(orb.nu) == 4
    assert orb.signature == (2, 2, 2, 2) and orb.chi == 0
    assert ramification_oracle(base_pair, 4) == orb.nu


@pytest.mark.parametrize("n,sig", [(3, (3, 3, 3)), (4, (2, 4, 4)), (6, (2, 3, 6))])
def test_doubling_signatures(n, sig):
    orb = ramification(portrait_from_qote(doubling(n)))
    assert orb.signature == sig and orb.chi == 0
    assert signature_taxonomy(orb) == LATTES_TAG


def test_z_squared_is_infinite():
    p = z_squared()
    assert infinite_vertices(p) == {"0", "oo"}
    orb = ramification(p)
    assert orb.signature == (INF, INF) and orb.chi == 0
    assert classify(orb) is Classification.PARABOLIC
    assert signature_taxonomy(orb) == PERIODIC_TAG


def test_signature_two_two_not_realizable():
    orb = ramification(two_two())
    assert orb.signature == (2, 2)
    assert orb.chi == 1 and classify(orb) is Classification.NOT_REALIZABLE


def test_incomplete_portrait():
    p = RamifiedPortrait(2, ("a", "b"), {"a": "b", "b": "b"}, {"a": 2})
    with pytest.raises(IncompletePortrait):
        ramification(p)


def test_oracle_depth_zero(base_pair):
    assert set(ramification_oracle(base_pair, 0).values()) == {1}


@pytest.mark.parametrize("sig,chi", [
    ((2, 2, 2, 2), Fr(0)), ((INF, INF), Fr(0)), ((2, 4, 6), Fr(-1, 12)),
    ((2, 2), Fr(1)), ((2, 3, 6), Fr(0)), ((2, 2, INF), Fr(0)), ((), Fr(2))])
def test_euler_characteristic(sig, chi):
    assert euler_characteristic(sig) == chi


def test_classification_and_taxonomy():
    assert classify((2, 2, 2, 2)) is Classification.PARABOLIC
    assert classify((2, 4, 6)) is Classification.HYPERBOLIC
    assert classify((2, 2)) is Classification.NOT_REALIZABLE
    assert signature_taxonomy((2, 3, 6)) == LATTES_TAG
    assert signature_taxonomy((INF, INF)) == PERIODIC_TAG
    assert signature_taxonomy((2, 4, 6)) is None
    assert parse_signature(["4", "inf", "2"]) == (2, 4, INF)


# random portraits: least fixed point against the brute-force oracle

@given(st.integers(0, 10 ** 6))
def test_ramification_matches_oracle(seed):
    p = finite_portraits(1, seed=seed)[0]
    orb = ramification(p)
    assert ramification_oracle(p, len(p.vertices)) == orb.nu
    assert satisfies_multiple_condition(p, orb.nu)


@given(st.integers(0, 10 ** 6))
def test_ramification_is_least(seed):
    """Lowering any value of nu to a proper divisor breaks the condition."""
    p = finite_portraits(1, seed=seed)[0]
    nu = ramification(p).nu
    for x, v in nu.items():
        for smaller in range(1, v):
            if v % smaller == 0:
                trial = dict(nu)
                trial[x] = smaller
                assert not satisfies_multiple_condition(p, trial)


@given(st.integers(0, 10 ** 6))
def test_oracle_monotone_in_depth(seed):
    import random
    rng = random.Random(seed)
    p = None
    while p is None:
        p = random_portrait(rng)
    if infinite_vertices(p):
        return
    prev = ramification_oracle(p, 0)
    for depth in range(1, len(p.vertices) + 1):
        cur = ramification_oracle(p, depth)
        assert all(cur[x] % prev[x] == 0 for x in cur)
        prev = cur
