import pytest

from cubesum.arith import primes_in_range
from cubesum.criterion import (
    EquivalenceViolation,
    GroupOracle,
    Verdict,
    build_D,
    check_prime,
    curve_fp2,
    d_has_root,
    d_root_count_fp2,
    divisibility_ladder,
    divisibility_ladder_oracle,
    kernel_sqrt_minus3,
    nine_divisibility,
    nine_divisibility_oracle,
    point_a,
    point_b,
    point_c,
    point_P1,
    scan,
)
from cubesum.curves import O, mul_sqrt_minus3


def test_D_at_17():
    # cbrt(3) = 7 mod 17, k = 6
    assert build_D(17) == [1, 0, 14, 3, 0, 11, 10, 0, 14, 1]


def test_D_rejects_bad_primes():
    for p in (18, 19, 7):
        with pytest.raises(ValueError):
            build_D(p)


def test_example_prime_17():
    r = check_prime(17)
    assert not r.d_has_root
    assert r.verdict is Verdict.GUARANTEED_CUBE_SUM
    assert r.c == ((12, 0), (11, 6))
    assert r.oracle_checked


def test_points_on_curve():
    for p in (17, 53, 89):
        E = curve_fp2(p)
        for P in (point_a(p), point_b(p), point_P1(p), point_c(p)):
            assert E.contains(P)
        assert E.mul(3, point_b(p)) == O


def test_c_is_sqrt_minus3_times_P1():
    for p in (17, 53, 71, 89, 107):
        assert mul_sqrt_minus3(point_P1(p)) == point_c(p)


def test_kernel_of_sqrt_minus3():
    p = 17
    ker = kernel_sqrt_minus3(p)
    assert len(ker) == 3
    assert all(mul_sqrt_minus3(t) == O for t in ker)


def test_roots_at_89():
    has, wit = d_has_root(89, oracle=True)
    assert has and wit
    assert d_root_count_fp2(89) == 9
    assert check_prime(89).verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("p", [17, 53, 71, 107, 179, 197])
def test_rootless_primes(p):
    assert not d_has_root(p)[0]
    assert d_root_count_fp2(p) == 0


def test_equivalence_to_2000():
    for p in primes_in_range(2, 2000, 9, 8):
        assert d_has_root(p)[0] == nine_divisibility(p), p


@pytest.mark.parametrize("p", [17, 53, 89])
def test_nine_divisibility_oracle(p):
    orc = GroupOracle(p)
    assert nine_divisibility_oracle(p, orc) == nine_divisibility(p)
    for n in (0, 1):
        assert divisibility_ladder_oracle(p, n, orc) == divisibility_ladder(p, n)


def test_ladder_at_17():
    assert divisibility_ladder(17, 0) == (True, True)
    assert divisibility_ladder(17, 1) == (False, False)


def test_scan_counts_and_determinism():
    a = scan(2, 1000, workers=1, oracle_max=0)
    b = scan(2, 1000, workers=2, oracle_max=0)
    assert a.to_dict() == b.to_dict()
    assert a.rows == b.rows
    assert not a.failures
    assert a.total == len(list(primes_in_range(2, 1000, 9, 8)))


def test_violation_carries_record():
    exc = EquivalenceViolation("x", {"p": 17})
    assert isinstance(exc, AssertionError)
    assert exc.record == {"p": 17}
