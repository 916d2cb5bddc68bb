import pytest

from cubesum.arith import primes_in_range
from cubesum.curves import minimal_model
from cubesum.lfunctions import (
    ALCache,
    Classification,
    a_ell,
    a_ell_table,
    an_coefficients,
    classify,
    classify_values,
    count_points,
    expected_sign,
    l_value,
)


def _brute_count(E, ell):
    a1, a2, a3, a4, a6 = (int(a) % ell for a in E.a_invariants)
    n = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % ell == 0:
                n += 1
    return n


@pytest.mark.parametrize("n", [1, 3, 17])
def test_count_points_brute(n):
    E = minimal_model(n)
    for ell in (2, 5, 7, 11, 13, 19, 31, 37):
        if ell not in (3, 17):
            assert count_points(E, ell) == _brute_count(E, ell)


def test_a7_on_E1():
    assert a_ell(1, 7) == -1


def test_supersingular_and_hasse_to_10000():
    E = minimal_model(3)
    for ell in primes_in_range(5, 10_000):
        a = ell + 1 - count_points(E, ell)
        assert a * a <= 4 * ell
        if ell % 3 == 2:
            assert a == 0, ell


def test_bad_primes_use_local_factor():
    assert a_ell(17, 17) == 0 and a_ell(17, 3) == 0
    with pytest.raises(ValueError):
        a_ell(17, 15)


def test_table_parallel_matches_serial():
    assert a_ell_table(17, 3000, workers=2) == a_ell_table(17, 3000, workers=1)


def test_hecke_relations():
    an = an_coefficients(3, 2000)
    table = a_ell_table(3, 2000)
    for m, n in [(4, 7), (13, 25), (8, 31), (7, 121)]:
        assert an[m * n] == an[m] * an[n]
    for ell in (2, 5, 7, 13):
        assert an[ell * ell] == table[ell] ** 2 - ell


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "a.csv"
    c = ALCache(path)
    t1 = a_ell_table(7, 500, cache=c)
    c2 = ALCache(path)
    assert c2.values
    assert a_ell_table(7, 500, cache=c2) == t1


def test_L_of_27a():
    r = l_value(1)
    assert r.conductor == 27 and r.sign == 1
    assert abs(r.value - 0.588879583428483) < 1e-12


def test_l_value_stable_under_more_terms():
    a = l_value(3, target_error=1e-8)
    b = l_value(3, target_error=1e-14)
    assert b.terms > a.terms
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-12


@pytest.mark.parametrize("p", [5, 7, 17, 53, 71, 89, 107])
def test_root_number_rule(p):
    r = l_value(p)
    assert r.sign == expected_sign(p)
    assert r.sign_gap > 0
    if r.sign == -1:
        assert r.value == 0 and r.derivative is not None
        assert "derivative" in r.to_dict()
    else:
        assert "derivative" not in r.to_dict()


def test_E3_nonvanishing():
    assert l_value(3).value > 0.1


def test_central_value_vanishes_for_153():
    r = l_value(153)
    assert r.sign == 1 and abs(r.value) < 1e-3


def test_derivative_positive_for_17():
    assert l_value(17, order=1).derivative > 1


def test_term_cap():
    with pytest.raises(ValueError):
        l_value(17, target_error=1e-10, max_terms=10)


def test_classify_17():
    r = classify(17)
    assert r.classification is Classification.P_ONLY
    assert not r.ambiguous
    assert r.label == "conjectural (BSD-conditional)"


def test_classify_values_cases():
    assert classify_values(1.0, 2.0)[0] is Classification.BOTH
    assert classify_values(1e-9, 2.0)[0] is Classification.P_ONLY
    assert classify_values(2.0, 1e-9)[0] is Classification.P_SQUARED_ONLY
    c, amb = classify_values(1e-9, 1e-9)
    assert c is Classification.NEITHER and amb
    assert classify_values(5e-3, 2.0)[1]


def test_classify_rejects_other_residues():
    with pytest.raises(ValueError):
        classify(19)
