from fractions import Fraction

import pytest

from cubesum.arith import Fp2Elt
from cubesum.curves import (
    O,
    NotOnCurveError,
    Point,
    WeierstrassModel,
    conductor,
    curve_from_json,
    curve_to_json,
    e1_min,
    from_minimal,
    local_data,
    minimal_model,
    mul_sqrt_minus3,
    omega_action,
    point_from_json,
    point_to_json,
    tate_local,
    to_minimal,
    triple_explicit,
)
from cubesum.criterion import enumerate_points

E37 = WeierstrassModel(0, 0, 1, -1, 0, label="37a1")


def test_group_law_on_37a1():
    P = Point(Fraction(0), Fraction(0))
    assert E37.add(P, P) == Point(Fraction(1), Fraction(0))
    assert E37.mul(3, P) == Point(Fraction(-1), Fraction(-1))
    assert E37.add(P, E37.neg(P)) == O
    assert E37.order(P, 50) is None


def test_check_rejects_off_curve():
    with pytest.raises(NotOnCurveError):
        E37.check(Point(Fraction(1), Fraction(1)))


def test_invariants_37a1():
    assert E37.discriminant == 37
    assert E37.c_invariants == (48, -216)


def test_associativity_over_fp2():
    p = 17
    E = e1_min(lambda a: Fp2Elt(a, 0, p))
    pts = enumerate_points(p)
    assert len(pts) == (p + 1) ** 2
    A, B, C = pts[5], pts[77], pts[200]
    assert E.add(E.add(A, B), C) == E.add(A, E.add(B, C))
    assert E.mul(p + 1, pts[123]) == O


def test_sqrt_minus3_squares_to_minus3():
    p = 17
    E = e1_min(lambda a: Fp2Elt(a, 0, p))
    for P in enumerate_points(p)[1:60]:
        assert E.contains(mul_sqrt_minus3(P))
        assert mul_sqrt_minus3(mul_sqrt_minus3(P)) == E.mul(-3, P)


def test_omega_action_is_cube_root_of_identity():
    p = 17
    E = e1_min(lambda a: Fp2Elt(a, 0, p))
    for P in enumerate_points(p)[1:40]:
        Q = omega_action(P)
        assert E.contains(Q)
        assert E.add(E.add(P, Q), omega_action(Q)) == O


def test_triple_explicit_matches_group_law():
    p = 53
    E = e1_min(lambda a: Fp2Elt(a, 0, p))
    pts = enumerate_points(p)
    for P in pts[3:30]:
        assert triple_explicit(P, E) == E.mul(3, P)


@pytest.mark.parametrize(
    "n,N",
    [(1, 27), (3, 243), (5, 675), (7, 441), (17, 7803), (153, 70227), (289, 7803), (2601, 70227)],
)
def test_conductors(n, N):
    assert conductor(minimal_model(n)) == N


def test_local_data_e17():
    data = local_data(minimal_model(17))
    assert set(data) == {3, 17}
    assert data[3].kodaira_type == "II" and data[3].conductor_exponent == 3
    assert data[17].kodaira_type == "IV" and data[17].conductor_exponent == 2
    assert all(d.local_a == 0 for d in data.values())


def test_tate_flags_nonminimal_input():
    E = WeierstrassModel(0, 0, 0, 0, 2**6 * 3**6 * 5)
    assert not tate_local(E, 2).minimal
    assert not tate_local(E, 3).minimal
    assert tate_local(minimal_model(3), 3).minimal


def test_minimal_model_transform_roundtrip():
    Q = Point(Fraction(72, 49), Fraction(23332, 343))
    assert WeierstrassModel(0, 0, 0, 0, 16 * 17 * 17).contains(Q)
    R_ = to_minimal(Q, 17)
    assert minimal_model(17).contains(R_)
    assert from_minimal(R_, 17) == Q


def test_minimal_model_rejects_cubes():
    with pytest.raises(ValueError):
        minimal_model(8)


def test_json_roundtrip():
    E = minimal_model(17)
    assert curve_from_json(curve_to_json(E)) == E
    P = Point(Fraction(1, 3), Fraction(-7, 2))
    assert point_from_json(point_to_json(P)) == P
    assert point_from_json(point_to_json(O)) == O
