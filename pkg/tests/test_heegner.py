from fractions import Fraction

import pytest

from cubesum.curves import Point, WeierstrassModel
from cubesum.heegner import (
    E1,
    eigen_projections,
    gz_check,
    heegner_example_17,
    omega_mult,
    phi_z_summands,
    sigma,
    twist_z1,
)
from cubesum.tower import QOmega, TowerNumber


@pytest.fixture(scope="module")
def example():
    return heegner_example_17(40)


def test_tower_sigma_has_order_three():
    x = TowerNumber(QOmega(1, 2), Fraction(3, 5), QOmega(-1, 7), m=17)
    assert x.sigma(3) == x and x.sigma(1).sigma(2) == x
    assert x.sigma(1) != x
    y = TowerNumber(2, 1, 0, m=17)
    assert (x * y).sigma(1) == x.sigma(1) * y.sigma(1)
    assert x * x.inverse() == TowerNumber(1, m=17)


def test_numeric_point_matches_display(example):
    assert example.numeric_match < 1e-8
    assert example.embedding["sqrt17_sign"] == 1
    assert not example.embedding["complex_conjugate"]


def test_trace_matches_display(example):
    assert example.trace_residual < 1e-8


def test_exact_relations(example):
    assert example.phi_z_on_curve and example.z_matches_phi_z
    assert example.z_trace_zero
    assert example.z1_eigen and example.z2_eigen and example.sum_is_3z
    assert example.z2_torsion_order is not None and example.z2_torsion_order <= 12
    assert example.cube_sum_anchor
    assert example.ok


def test_summands_on_E1():
    A, B = phi_z_summands()
    assert E1.contains(A) and E1.contains(B)


def test_projection_identities_recomputed():
    A, B = phi_z_summands()
    z = E1.add(A, B)
    z1, z2 = eigen_projections(E1, z)
    assert sigma(z1) == omega_mult(z1, 1)
    assert sigma(z2) == omega_mult(z2, 2)
    assert E1.add(z1, z2) == E1.mul(3, z)


def test_twist_is_three_times_a_generator():
    A, B = phi_z_summands()
    z1, _ = eigen_projections(E1, E1.add(A, B))
    k, P = twist_z1(z1)
    C = WeierstrassModel(0, 0, 0, 0, k)
    assert k == -124848 and C.contains(P)
    G = Point(Fraction(84), Fraction(684))
    assert C.mul(-3, G) == P


def test_gz_report():
    r = gz_check()
    assert abs(r.height_z1 - r.height_z1_tate) < 1e-6
    assert r.second_ok
    assert abs(r.L_9p) < 1e-3
    # the left side equals h(z1); against 3 h(z1) this is exactly one third
    assert abs(r.lhs - r.height_z1) < 1e-8
    assert abs(r.ratio - 1 / 3) < 1e-10
    assert not r.in_band
    assert any("open question" in n for n in r.notes)


def test_gz_other_primes_unsupported():
    with pytest.raises(NotImplementedError):
        gz_check(53)
