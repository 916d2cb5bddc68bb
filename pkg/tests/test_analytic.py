import math
from fractions import Fraction

import mpmath
import pytest

from cubesum.analytic import (
    J_SQRT_MINUS3,
    SINGULAR_MODULUS_MODULUS,
    class_number,
    cm_verify,
    curve_g2_g3,
    dedekind_sum,
    dedekind_sum_direct,
    eval_eta,
    eval_eta_stepwise,
    eval_j,
    eval_j_eta_quotient,
    eval_j_qexpansion,
    eval_param,
    lattice_invariants,
    omega_n,
    period_lattice,
    real_period,
    real_period_bsd,
    real_period_integral,
    real_period_quadrature,
    reduce_tau,
    reduced_forms,
    singular_moduli_dps,
    singular_moduli_norm_test,
    verify_period_relation,
)
from cubesum.curves import WeierstrassModel, minimal_model


def test_dedekind_sum_reciprocity_and_direct():
    for k in range(2, 40):
        for h in range(1, k):
            if math.gcd(h, k) == 1:
                assert dedekind_sum(h, k) == dedekind_sum_direct(h, k)
    assert dedekind_sum(1, 3) == Fraction(1, 18)


def test_eta_at_i():
    with mpmath.workdps(40):
        ref = mpmath.gamma(mpmath.mpf(1) / 4) / (2 * mpmath.pi ** (mpmath.mpf(3) / 4))
        assert abs(eval_eta(mpmath.mpc(0, 1), 40) - ref) < mpmath.mpf(10) ** -35


def test_eta_routes_agree_near_real_axis():
    tau = mpmath.mpc("0.3183", "0.0021")
    with mpmath.workdps(40):
        a = eval_eta(tau, 40)
        b = eval_eta_stepwise(tau, 40)
        assert abs(a - b) < mpmath.mpf(10) ** -30 * max(1, abs(a))


def test_reduce_tau_lands_in_fundamental_domain():
    z, (a, b, c, d) = reduce_tau(mpmath.mpc("0.77", "0.013"))
    assert a * d - b * c == 1
    assert abs(mpmath.re(z)) <= 0.5 + 1e-20 and abs(z) >= 1 - 1e-20


@pytest.mark.parametrize("d,j", [(1, 1728), (3, J_SQRT_MINUS3)])
def test_special_j_values(d, j):
    with mpmath.workdps(50):
        tau = mpmath.mpc(0, mpmath.sqrt(d))
        for fn in (eval_j, eval_j_eta_quotient, eval_j_qexpansion):
            assert abs(fn(tau) - j) < 1e-20


def test_cm_values():
    r = cm_verify(50)
    assert r.psi_ok
    # at w/(2w+1) the eta quotient equals -3w; -3w^2 is its complex conjugate
    assert r.f_error_w < 1e-40
    assert abs(r.f_error_w2 - 3 * 3**0.5) < 1e-12


def test_param_on_curve_at_random_points():
    for tau in (mpmath.mpc(0.1, 0.5), mpmath.mpc(-0.3, 0.2)):
        with mpmath.workdps(40):
            P = eval_param(tau, 40)
            assert abs(P.y**2 - P.x**3 - 144) < 1e-25 * max(1, abs(P.y) ** 2)


def test_class_numbers():
    assert [class_number(D) for D in (-3, -4, -23, -47, -12)] == [1, 1, 3, 5, 1]
    assert class_number(-3 * 17 * 17) == 6


def test_reduced_forms_are_reduced():
    for f in reduced_forms(-867):
        assert f.discriminant == -867
        assert abs(f.b) <= f.a <= f.c
        if abs(f.b) == f.a or f.a == f.c:
            assert f.b >= 0
    with pytest.raises(ValueError):
        reduced_forms(5)


def test_singular_moduli_17():
    r = singular_moduli_norm_test(17)
    assert r.class_number == 6
    assert r.margin >= 1e-5
    assert r.divisible
    assert r.N % SINGULAR_MODULUS_MODULUS**6 == 0
    assert singular_moduli_dps(17) >= 100


def test_real_period_37a1():
    E = WeierstrassModel(0, 0, 1, -1, 0)
    assert abs(real_period_bsd(E, 30) - mpmath.mpf("5.98691729246392")) < 1e-13


def test_period_methods_agree():
    E = minimal_model(3)
    with mpmath.workdps(25):
        a = real_period(E, 25)
        b = real_period_integral(E, 25)
        c = mpmath.re(real_period_quadrature(E, 20))
        assert abs(a - b) < 1e-20 and abs(a - c) < 1e-15


def test_lattice_invariants_match_curve():
    E = minimal_model(3)
    g2, g3 = curve_g2_g3(E)
    L = period_lattice(E, 30)
    G2, G3 = lattice_invariants(L, 30)
    assert abs(G2 - g2) < 1e-15 and abs(G3 - g3) < 1e-15


@pytest.mark.parametrize("p", [17, 53])
def test_period_relation(p):
    assert verify_period_relation(p).ok


def test_omega_n_cube_free():
    with pytest.raises(ValueError):
        omega_n(16)
