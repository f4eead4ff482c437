import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from swapgame import INF, AssumptionViolation, ContractTerms, GameKernel
from swapgame.scale import W, Z, build_coefficients, zeta

from .conftest import models, step_down_terms


def kappa_quad(k, x, A):
    lam, eta, r = k.lam, k.eta, k.r
    zA = float(Z(k.coeffs, x - A))
    inner = quad(lambda u: lam * eta * math.exp(-eta * u) * (zA - float(Z(k.coeffs, x - u))), A, x,
                 epsabs=1e-13, epsrel=1e-12)[0]
    tail = (zA - 1.0) * lam * math.exp(-eta * x)
    return (inner + tail) / r


# -- contract terms ---------------------------------------------------------
def test_terms_derived_fields():
    t = ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.1, 0.2)
    assert t.p_check == pytest.approx(0.025) and t.alpha_check == pytest.approx(0.5)
    assert t.is_step_down and not t.is_step_up
    m = t.mirrored()
    assert m.p_check == pytest.approx(-0.025) and m.gamma_b == 0.2 and m.gamma_s == 0.1
    assert m.is_step_up and m.mirrored() == t


@pytest.mark.parametrize(
    "t",
    [
        ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.1, 0.5),  # gamma_s = alpha_check
        ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.1, 0.7),
        ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.0, 0.0),
        ContractTerms(0.05, 1.0, 0.02, 1.5, 0.1, 0.1),  # p_check > 0 > alpha_check
        ContractTerms(0.05, 1.0, 0.05, 0.5, 0.1, 0.1),  # p_check = 0
    ],
)
def test_canonical_assumption_rejections(t):
    with pytest.raises(AssumptionViolation):
        t.check_canonical()


def test_negative_inputs_rejected():
    with pytest.raises(AssumptionViolation):
        ContractTerms(-0.05, 1.0, 0.0, 0.0, 0.1, 0.1)


# -- payoffs -----------------------------------------------------------------
def test_payoffs_vanish_at_default(kernel):
    for fn in (kernel.h, kernel.g, kernel.f):
        assert fn(0.0) == 0.0 and fn(-1.0) == 0.0


def test_payoff_offsets(kernel):
    x = np.linspace(0.01, 10, 50)
    np.testing.assert_allclose(kernel.g(x) - kernel.h(x), kernel.gb + kernel.gs, atol=1e-14)
    np.testing.assert_allclose(kernel.f(x) - kernel.h(x), kernel.gs, atol=1e-14)
    assert kernel.h(500.0) == pytest.approx(kernel.pc / kernel.r - kernel.gb, abs=1e-12)


def test_cds_limits(kernel):
    assert kernel.cds_value(1e-12, 0.05, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert kernel.cds_value(500.0, 0.05, 1.0) == pytest.approx(-0.05 / kernel.r, abs=1e-10)


# -- rho, kappa --------------------------------------------------------------
def test_rho_values(kernel):
    assert kernel.rho(0.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert kernel.rho(INF) == 0.0
    rng = np.random.default_rng(7)
    for A in rng.uniform(0, 4, 5):
        ref = quad(lambda u: kernel.lam * kernel.eta * math.exp(-kernel.eta * u)
                   * (1 - math.exp(-kernel.phi * (u - A))), A, np.inf, epsabs=1e-14)[0]
        assert kernel.rho(A) == pytest.approx(ref, abs=1e-9)


def test_kappa_against_quadrature(kernel):
    rng = np.random.default_rng(11)
    for _ in range(20):
        A = rng.uniform(0, 3)
        x = A + rng.uniform(0.01, 6)
        ref = kappa_quad(kernel, x, A)
        assert kernel.kappa(x, A) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_kappa_limits_and_domain(kernel):
    assert kernel.kappa(1.0 + 1e-12, 1.0) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValueError):
        kernel.kappa(1.0, 1.0)
    A = 0.7
    ratio = kernel.kappa(A + 60, A) / float(W(kernel.coeffs, 60.0))
    assert ratio == pytest.approx(kernel.rho(A) / kernel.phi, abs=1e-5)


def test_kappa_decreasing_in_A(kernel):
    x = 4.0
    vals = [kernel.kappa(x, A) for A in np.linspace(0, 3.9, 40)]
    assert np.all(np.diff(vals) < 0) and min(vals) >= 0


# -- Psi, psi and their extensions -------------------------------------------
def test_Psi_at_A_plus(kernel):
    assert kernel.Psi(0.8, 0.8 + 1e-10) == pytest.approx(-(kernel.gb + kernel.gs), abs=1e-8)
    lim = -(kernel.pc + kernel.r * kernel.gs) + kernel.beta * kernel.lam * math.exp(-kernel.eta * 0.8)
    assert kernel.psi_hat_at_A(0.8) == pytest.approx(lim, abs=1e-15)
    eps = 1e-8
    assert kernel.psi(0.8, 0.8 + eps) / float(W(kernel.coeffs, eps)) == pytest.approx(lim, rel=1e-6)
    assert kernel.psi_hat(0.8, 0.8 + 1e-7) == pytest.approx(kernel.psi_hat_at_A(0.8), abs=1e-6)


def test_psi_is_derivative_of_Psi(kernel):
    h = 1e-5
    for A, B in [(0.3, 1.0), (0.8, 2.5), (0.0, 4.0), (1.2, 9.0)]:
        fd = (kernel.Psi(A, B + h) - kernel.Psi(A, B - h)) / (2 * h)
        assert kernel.psi(A, B) == pytest.approx(fd, rel=1e-7, abs=1e-9)


def test_hat_forms_match_raw_ratios(kernel):
    for A in (0.0, 0.5, 1.3):
        for y in (0.01, 0.5, 2.0, 7.0, 15.0, 20.0):
            B = A + y
            w = float(W(kernel.coeffs, y))
            assert kernel.Psi_hat(A, B) * w == pytest.approx(kernel.Psi(A, B), rel=1e-9, abs=1e-12)
            assert kernel.psi_hat(A, B) * w == pytest.approx(kernel.psi(A, B), rel=1e-9, abs=1e-12)


def test_infinite_B_forms(kernel):
    for A in (0.0, 0.4, 1.1, 3.0):
        assert kernel.phi * kernel.Psi_hat(A, INF) == pytest.approx(kernel.psi_hat(A, INF), abs=1e-15)
        assert abs(kernel.Psi_hat(A, A + 80) - kernel.Psi_hat(A, INF)) < 1e-6
        assert abs(kernel.psi_hat(A, A + 80) - kernel.psi_hat(A, INF)) < 1e-6


def test_dPsi_hat_dB_by_finite_difference(kernel):
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(20):
        A = rng.uniform(0, 2)
        B = A + rng.uniform(0.2, 10)
        fd = (kernel.Psi_hat(A, B + h) - kernel.Psi_hat(A, B - h)) / (2 * h)
        assert kernel.dPsi_hat_dB(A, B) == pytest.approx(fd, rel=1e-5, abs=1e-9)
        ref = kernel.psi_hat(A, B) - kernel.W_ratio(B - A) * kernel.Psi_hat(A, B)
        assert kernel.dPsi_hat_dB(A, B) == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_psi_at_zero_is_limit_of_closed_form(kernel):
    for B in (0.5, 2.0, 6.0):
        assert kernel.psi(0.0, B) == pytest.approx(kernel.psi(1e-9, B), rel=1e-7)


def test_Psi_hat_rejects_bad_order(kernel):
    with pytest.raises(ValueError):
        kernel.Psi_hat(1.0, 1.0)
    with pytest.raises(ValueError):
        kernel.psi_hat(1.0, 0.5)


# -- Upsilon and exit identities ----------------------------------------------
def test_Upsilon_limits(kernel):
    A, B = 0.6, 2.7
    assert kernel.Upsilon(B - 1e-10, A, B) == pytest.approx(kernel.pc / kernel.r - kernel.gb, abs=1e-7)
    assert kernel.Upsilon(A + 1e-10, A, B) == pytest.approx(kernel.pc / kernel.r + kernel.gs, abs=1e-7)


def test_Upsilon_matches_scale_form(kernel):
    for A, B in [(0.0, 2.0), (0.6, 2.7), (0.3, 8.0), (1.0, INF)]:
        for x in np.linspace(A + 0.05, min(B, A + 6) - 0.05, 7):
            assert kernel.Upsilon(x, A, B) == pytest.approx(kernel.Upsilon_scale_form(x, A, B), rel=1e-9, abs=1e-12)


def test_exit_identities_scale_forms(kernel):
    A, B = 0.5, 2.5
    x = np.linspace(0.55, 2.45, 9)
    up, down, jd = kernel.exit_identities(x, A, B)
    w = W(kernel.coeffs, x - A) / W(kernel.coeffs, B - A)
    np.testing.assert_allclose(up, w, rtol=1e-12)
    np.testing.assert_allclose(down, Z(kernel.coeffs, x - A) - Z(kernel.coeffs, B - A) * w, rtol=1e-10)
    ref_jd = np.array([wi * kernel.kappa(B, A) - kernel.kappa(xi, A) for xi, wi in zip(x, w)])
    np.testing.assert_allclose(jd, ref_jd, rtol=1e-9)


def test_exit_identities_boundaries(kernel):
    up, down, _ = kernel.exit_identities(0.5 + 1e-12, 0.5, 2.5)
    assert up == pytest.approx(0.0, abs=1e-9) and down == pytest.approx(1.0, abs=1e-9)
    up, down, _ = kernel.exit_identities(2.5 - 1e-12, 0.5, 2.5)
    assert up == pytest.approx(1.0, abs=1e-9) and down == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        kernel.exit_identities(3.0, 0.5, 2.5)


def test_exit_identities_survive_far_barriers(kernel):
    up, down, jd = kernel.exit_identities(1.5, 0.5, 400.0)
    assert up < 1e-150 and math.isfinite(down) and math.isfinite(jd)
    up_inf, down_inf, jd_inf = kernel.exit_identities(1.5, 0.5, INF)
    assert down == pytest.approx(down_inf, rel=1e-12) and jd == pytest.approx(jd_inf, rel=1e-12)
    assert down_inf == pytest.approx(float(zeta(kernel.coeffs, 1.0)), rel=1e-14)


@given(models(), st.floats(0.0, 3.0), st.floats(0.01, 0.99), st.floats(0.05, 10.0))
@settings(max_examples=100, deadline=None)
def test_exit_identities_are_subprobabilities(m, A, frac, width):
    k = GameKernel(m, ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.1, 0.1))
    B = A + width
    x = A + frac * width
    up, down, jd = k.exit_identities(x, A, B)
    tol = 1e-12
    assert -tol <= up <= 1 + tol and -tol <= down <= 1 + tol
    assert up + down <= 1 + tol
    assert jd >= -tol and down - jd >= -tol


# -- monotonicity ---------------------------------------------------------
@given(models(), step_down_terms(), st.floats(0.0, 3.0), st.floats(0.01, 10.0), st.floats(0.01, 2.0))
@settings(max_examples=100, deadline=None)
def test_psi_hat_decreasing(m, t, A, y, d):
    k = GameKernel(m, t)
    B = A + y
    tol = 1e-12 * (1 + abs(k.psi_hat(A, B)))
    assert k.psi_hat(A, B + d) <= k.psi_hat(A, B) + tol
    assert k.psi_hat(A + min(d, y / 2), B) <= k.psi_hat(A, B) + tol
    assert k.psi_hat(A, INF) <= k.psi_hat(A, B) + tol


@given(models(), step_down_terms(), st.floats(0.0, 3.0), st.floats(0.01, 10.0))
@settings(max_examples=100, deadline=None)
def test_psi_hat_sign_matches_psi(m, t, A, y):
    k = GameKernel(m, t)
    if k.phi * y > 600:
        return
    a, b = k.psi_hat(A, A + y), k.psi(A, A + y)
    if abs(a) > 1e-10:
        assert (a >= 0) == (b >= 0)
