from fractions import Fraction

import mpmath
import pytest

from cubesum.arith import count_hex_representations, sigma
from cubesum.qseries import (
    QSeries,
    SeriesCache,
    TruncationError,
    delta_series,
    dump_series,
    eta_quotient,
    euler_product,
    f_restricted_product,
    f_series,
    j_series,
    load_series,
    param_series,
    rational_power,
    sumkron_direct,
    theta_L,
    G2_series,
    verify_modular_equation,
    verify_sumkron,
    verify_sumkron_range,
    verify_theta_identity,
)


def _naive_euler(N):
    c = [0] * (N + 1)
    c[0] = 1
    for n in range(1, N + 1):
        # multiply by (1 - q^n)
        for k in range(N, n - 1, -1):
            c[k] -= c[k - n]
    return c


def test_euler_product_pentagonal():
    assert list(euler_product(300)) == _naive_euler(300)


def test_known_coefficients():
    assert delta_series(5).coeffs[:5] == (1, -24, 252, -1472, 4830)
    j = j_series(3)
    assert j.prefix == -1 and j.coeffs[:3] == (1, 744, 196884)


def test_f_series_prefix_and_product():
    f = f_series(80)
    assert f.prefix == Fraction(-1, 3)
    assert f_restricted_product(80).first_mismatch(f, upto=80) is None


def test_eta_quotient_against_naive_product():
    N = 50
    e1 = QSeries(_naive_euler(N))
    e3 = QSeries(_naive_euler(N // 3)).substitute(3)
    e3 = QSeries(list(e3.coeffs) + [0] * (N - e3.N))
    naive = e1**4 * (e3**4).inverse()
    got = eta_quotient([(1, 4), (3, -4)], N)
    assert got.prefix == Fraction(-1, 3)
    assert got.coeffs == naive.coeffs


def test_theta_counts_hexagonal_representations():
    th = theta_L(200)
    assert all(th[n] == count_hex_representations(n) for n in range(201))


def test_G2_coefficients():
    G = G2_series(50)
    assert G[0] == Fraction(-1, 24)
    assert all(G[n] == sigma(n) for n in range(1, 51))


def test_arithmetic_and_inverse():
    f = f_series(60)
    one = f * f.inverse()
    assert one.prefix == 0
    assert one.coeffs[0] == 1 and all(c == 0 for c in one.coeffs[1:])
    g = (f**3).cube_root()
    assert g.first_mismatch(f, upto=g.precision) is None


def test_rational_power_roundtrip():
    s = QSeries([1, 3, -2, 5, 7, 1, 0, 4], 0)
    r = s.power_rational(Fraction(2, 3))
    back = r**3
    assert back.first_mismatch(s**2, upto=back.precision) is None


def test_rational_power_of_numbers():
    assert rational_power(Fraction(27, 8), Fraction(2, 3)) == Fraction(9, 4)
    with pytest.raises(ArithmeticError):
        rational_power(Fraction(2), Fraction(1, 2))


def test_misaligned_prefixes():
    with pytest.raises(TypeError):
        QSeries([1, 2], Fraction(1, 3)) + QSeries([1, 2], 0)


def test_truncation_errors():
    s = QSeries([1, 2, 3])
    with pytest.raises(TruncationError):
        s.truncate(5)
    with pytest.raises(TruncationError):
        s.coefficient(7)


def test_substitute():
    s = QSeries([1, 1, 1], 0).substitute(3)
    assert s.coeffs == (1, 0, 0, 1, 0, 0, 1)


def test_theta_identity():
    assert verify_theta_identity(600).ok


def test_modular_equation():
    assert verify_modular_equation(200).ok


def test_modular_equation_detects_a_wrong_constant():
    # perturbing the identity must produce a mismatch report
    f3 = f_series(60) ** 3
    lhs = (f3 + 26) * (f3 + 3) ** 3
    rhs = j_series(25).substitute(3) * f3
    assert lhs.first_mismatch(rhs, upto=50) is not None


@pytest.mark.parametrize("p,expected", [(5, (2, 6)), (7, (2, 4)), (17, (6, 18))])
def test_sumkron_small(p, expected):
    r = verify_sumkron(p)
    assert (r.odd_sum, r.even_sum) == expected == sumkron_direct(p)
    assert r.ok


def test_sumkron_range():
    res = verify_sumkron_range(5, 300)
    assert res and all(r.ok for r in res)
    assert {r.p % 3 for r in res} == {1, 2}


def test_param_series_on_curve():
    x, y = param_series(60)
    assert x.prefix == -2 and x.coeffs[0] == 4
    assert y.prefix == -3
    diff = y * y - x**3
    top = min(diff.precision, 20)
    assert all(diff.coefficient(e) == (144 if e == 0 else 0) for e in range(int(diff.prefix), int(top)))


def test_evaluate_matches_mpmath_product():
    tau = mpmath.mpc(0.1, 0.9)
    with mpmath.workdps(30):
        got = QSeries(list(euler_product(200)), 0).evaluate(tau)
        ref = mpmath.qp(mpmath.expjpi(2 * tau))
        assert abs(got - ref) < mpmath.mpf(10) ** -25


def test_cache_roundtrip(tmp_path):
    f = f_series(40)
    dump_series({"f": f, "j": j_series(10)}, tmp_path / "s.qs")
    back = load_series(tmp_path / "s.qs")
    assert back["f"] == f and back["j"] == j_series(10)
    cache = SeriesCache(tmp_path / "c")
    calls = []

    def build(N):
        calls.append(N)
        return f_series(N)

    assert cache.get("f", 30, build) == cache.get("f", 30, build)
    assert calls == [30]
