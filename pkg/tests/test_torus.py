from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbifoldkit.errors import InvalidInstance
from orbifoldkit.exact_lattice import det2, mat_vec
from orbifoldkit.torus import (
    AffineEndo,
    RotationGroup,
    TorusPoint,
    apply,
    check_equivariance,
    deck_group,
    orbit,
    preimages,
    projection_critical_points,
    sphere_canonical,
    stabilizer_order,
)

P = TorusPoint.of
H = Fr(1, 2)
Q4 = Fr(1, 4)
TWO = ((2, 0), (0, 2))

small = st.integers(-3, 3)
mat2 = st.tuples(st.tuples(small, small), st.tuples(small, small))
points = st.builds(lambda d, i, j: P(Fr(i, d), Fr(j, d)),
                   st.integers(1, 30), st.integers(0, 29), st.integers(0, 29))


def test_point_normalization():
    assert P(Fr(5, 4), Fr(-1, 2)) == TorusPoint(1, 2, 4)
    assert P(Fr(2, 4), 0) == TorusPoint(1, 0, 2)
    assert str(P(Q4, 0)) == "(1/4,0)"
    assert TorusPoint.from_json(["3/4", "1"]) == P(Fr(3, 4), 0)


def test_endo_validation():
    with pytest.raises(InvalidInstance):
        AffineEndo.from_json({"A": [[1, 0], [0, 1.5]]})
    with pytest.raises(InvalidInstance):
        AffineEndo.from_json({"A": [[1, 0]], "b": ["0", "0"]})
    e = AffineEndo.from_json({"A": [[2, 0], [0, 2]], "b": ["3/2", "-1/2"]})
    assert e.b == (H, H)
    assert AffineEndo.from_json(e.to_json()) == e


def test_apply_examples():
    F = AffineEndo(TWO)
    assert apply(F, P(Q4, 0)) == P(H, 0)
    assert apply(F, P(H, H)) == P(0, 0)
    assert apply(AffineEndo(((1, 1), (0, 1))), P(Fr(1, 3), Fr(2, 3))) == P(0, Fr(2, 3))


def test_preimage_examples():
    F = AffineEndo(TWO)
    assert set(preimages(F, P(0, 0))) == {P(0, 0), P(H, 0), P(0, H), P(H, H)}
    assert set(preimages(F, P(H, 0))) == {P(Q4, 0), P(3 * Q4, 0), P(Q4, H), P(3 * Q4, H)}
    E = AffineEndo(((2, 1), (0, 2)))
    pre = preimages(E, P(0, 0))
    assert len(pre) == 4 and all(apply(E, x) == P(0, 0) for x in pre)


@given(mat2, st.integers(0, 3), st.integers(0, 3), points)
def test_preimages_are_exact_fibers(A, bx, by, p):
    if det2(A) == 0:
        return
    E = AffineEndo(A, (Fr(bx, 4), Fr(by, 4)))
    pre = preimages(E, p)
    assert len(set(pre)) == abs(det2(A))
    assert all(apply(E, x) == p for x in pre)


def test_deck_groups():
    assert set(deck_group(AffineEndo(TWO))) == {P(0, 0), P(H, 0), P(0, H), P(H, H)}
    assert set(deck_group(AffineEndo(((1, 1), (-1, 1))))) == {P(0, 0), P(H, H)}
    assert set(deck_group(AffineEndo(((3, 0), (0, 1))))) == {P(0, 0), P(Fr(1, 3), 0),
                                                             P(Fr(2, 3), 0)}


@given(mat2)
def test_deck_group_closed(A):
    if det2(A) == 0:
        return
    G = deck_group(AffineEndo(A))
    assert len(G) == abs(det2(A))
    for v in G:
        assert all(Fr(x).denominator == 1 for x in mat_vec(A, v.coords))
        for w in G:
            s = P(v.coords[0] + w.coords[0], v.coords[1] + w.coords[1])
            assert s in G


def test_stabilizers():
    assert stabilizer_order(RotationGroup(2), P(H, 0)) == 2
    assert stabilizer_order(RotationGroup(2), P(Fr(1, 3), 0)) == 1
    assert stabilizer_order(RotationGroup(4), P(H, H)) == 4


def test_projection_critical_points():
    n2 = projection_critical_points(RotationGroup(2))
    assert n2 == [(P(0, 0), 2), (P(0, H), 2), (P(H, 0), 2), (P(H, H), 2)]
    n3 = projection_critical_points(RotationGroup(3))
    assert len(n3) == 3 and all(k == 3 for _, k in n3)
    n4 = dict(projection_critical_points(RotationGroup(4)))
    assert n4 == {P(0, 0): 4, P(H, H): 4, P(H, 0): 2, P(0, H): 2}
    n6 = projection_critical_points(RotationGroup(6))
    assert sorted(k for _, k in n6) == [2, 2, 2, 3, 3, 6]


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_critical_points_have_full_stabilizer_data(n):
    G = RotationGroup(n)
    for x, k in projection_critical_points(G):
        assert k >= 2 and n % k == 0
        assert len(orbit(G, x)) * k == n


def test_sphere_canonical():
    s = sphere_canonical(RotationGroup(2), P(3 * Q4, 0))
    assert s.rep == P(Q4, 0)
    assert len(orbit(RotationGroup(2), P(H, 0))) == 1
    assert sphere_canonical(RotationGroup(4), P(Q4, 0)).rep == P(0, Q4)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@given(points)
def test_canonical_is_orbit_invariant(n, x):
    G = RotationGroup(n)
    orb = orbit(G, x)
    reps = {sphere_canonical(G, y) for y in orb}
    assert len(reps) == 1
    assert reps.pop().rep == min(orb, key=lambda p: p.coords)
    assert len(orb) * stabilizer_order(G, x) == n


def test_equivariance_examples():
    assert check_equivariance(RotationGroup(2), AffineEndo(((3, 1), (5, -2)))) == 1
    assert check_equivariance(RotationGroup(2), AffineEndo(TWO, (H, 0))) == 1
    assert check_equivariance(RotationGroup(4), AffineEndo(((1, 0), (0, 2)))) is None
    assert check_equivariance(RotationGroup(2), AffineEndo(TWO, (Fr(1, 3), 0))) is None


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@given(points)
def test_equivariance_holds_pointwise(n, x):
    G = RotationGroup(n)
    F = AffineEndo(TWO)
    j = check_equivariance(G, F)
    Rx = P(*mat_vec(G.R, x.coords))
    assert apply(F, Rx) == P(*mat_vec(G.powers[j], apply(F, x).coords))


def test_bad_group():
    with pytest.raises(InvalidInstance):
        RotationGroup(5)
