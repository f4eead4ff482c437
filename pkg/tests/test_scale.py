import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from swapgame import scale
from swapgame.levy import ModelParams, laplace_exponent
from swapgame.scale import W, W_double_prime, W_prime, W_tilted, Z, build_coefficients, zeta

from .conftest import models


def laplace_of_W(coeffs, s):
    """Quadrature of int_0^X e^{-s x} W(x) dx with tail below 1e-10 (relative)."""
    X = math.log(1e10) / (s - coeffs.phi_r) + 10.0
    pieces = np.linspace(0.0, X, 41)
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        # e^{-s x} W(x) = e^{-(s - Phi) x} W_Phi(x), which cannot overflow
        fn = lambda x: math.exp(-(s - coeffs.phi_r) * x) * float(W_tilted(coeffs, x))  # noqa: E731
        total += quad(fn, a, b, epsabs=1e-13, epsrel=1e-12)[0]
    return total


@pytest.mark.parametrize("shift", [0.5, 1.0, 2.0])
def test_laplace_transform_of_W(coeffs, model, shift):
    s = coeffs.phi_r + shift
    val = laplace_of_W(coeffs, s)
    assert val * (laplace_exponent(model, s) - model.r) == pytest.approx(1.0, abs=1e-6)


@given(models())
@settings(max_examples=15, deadline=None)
def test_laplace_transform_random_models(m):
    c = build_coefficients(m)
    s = c.phi_r + 1.0
    assert laplace_of_W(c, s) * (laplace_exponent(m, s) - m.r) == pytest.approx(1.0, rel=1e-6)


def test_weights_sum_to_inverse_slope(coeffs):
    assert sum(coeffs.c) == pytest.approx(1.0 / coeffs.phi_prime_at_phi_r, abs=1e-12)
    assert all(ci > 0 for ci in coeffs.c)


def test_brownian_case_matches_classical_formula():
    m = ModelParams(r=0.03, mu=0.05, nu=0.25, lam=0.0, eta=1.0)
    c = build_coefficients(m)
    a = 0.5 * m.nu**2
    disc = math.sqrt(m.mu**2 + 4 * a * m.r)
    tp, tm = (-m.mu + disc) / (2 * a), (m.mu + disc) / (2 * a)
    x = np.linspace(0.0, 5.0, 11)
    ref = (np.exp(tp * x) - np.exp(-tm * x)) / (a * (tp + tm))
    np.testing.assert_allclose(W(c, x), ref, rtol=1e-12, atol=1e-14)


def test_W_boundary(coeffs, model):
    assert W(coeffs, -1.0) == 0.0
    assert W(coeffs, 0.0) == 0.0
    assert abs(W_prime(coeffs, 0.0) - 2.0 / model.nu**2) < 1e-10
    assert W(coeffs, 3.0) > W(coeffs, 2.0) > W(coeffs, 1.0) > 0


def test_W_derivatives_by_finite_difference(coeffs):
    x = np.linspace(0.1, 10.0, 25)
    h = 1e-5
    fd1 = (W(coeffs, x + h) - W(coeffs, x - h)) / (2 * h)
    fd2 = (W_prime(coeffs, x + h) - W_prime(coeffs, x - h)) / (2 * h)
    np.testing.assert_allclose(W_prime(coeffs, x), fd1, rtol=1e-8)
    np.testing.assert_allclose(W_double_prime(coeffs, x), fd2, rtol=1e-7)


def test_tilted_scale_function(coeffs):
    x = np.linspace(0.0, 30.0, 61)
    phi = coeffs.phi_r
    np.testing.assert_allclose(W_tilted(coeffs, x), np.exp(-phi * x) * W(coeffs, x), rtol=1e-12, atol=1e-15)
    assert np.all(np.diff(W_tilted(coeffs, x)) >= 0)
    assert W_tilted(coeffs, 0.0) == 0.0
    assert abs(W_tilted(coeffs, 50.0) - sum(coeffs.c)) < 1e-8


def test_Z_values(coeffs, model):
    assert Z(coeffs, -5.0) == 1.0
    assert Z(coeffs, 0.0) == 1.0
    ref = 1.0 + model.r * quad(lambda y: float(W(coeffs, y)), 0.0, 2.0, epsabs=1e-13, epsrel=1e-13)[0]
    assert abs(Z(coeffs, 2.0) - ref) < 1e-9
    assert Z(coeffs, 60.0) / W(coeffs, 60.0) == pytest.approx(model.r / coeffs.phi_r, abs=1e-6)


def test_zeta_closed_form(coeffs, model):
    x = np.linspace(0.01, 8.0, 40)
    direct = Z(coeffs, x) - model.r / coeffs.phi_r * W(coeffs, x)
    np.testing.assert_allclose(zeta(coeffs, x), direct, rtol=1e-10, atol=1e-13)
    assert zeta(coeffs, 0.0) == 1.0 and zeta(coeffs, -2.0) == 1.0
    assert zeta(coeffs, 1e-12) == pytest.approx(1.0, abs=1e-9)
    # slowest mode decays like exp(-xi_1 x) with xi_1 ~ 0.15, so zeta(60) ~ 1.16e-4
    lead = model.r * coeffs.c[0] * (1 / coeffs.phi_r + 1 / coeffs.xi[0]) * math.exp(-coeffs.xi[0] * 60.0)
    assert zeta(coeffs, 60.0) == pytest.approx(lead, rel=1e-12)
    assert zeta(coeffs, 100.0) < 1e-6
    vals = zeta(coeffs, x)
    assert np.all((vals > 0) & (vals <= 1)) and np.all(np.diff(vals) < 0)


def test_zeta_prime_by_finite_difference(coeffs):
    x = np.linspace(0.2, 6.0, 20)
    h = 1e-6
    fd = (zeta(coeffs, x + h) - zeta(coeffs, x - h)) / (2 * h)
    np.testing.assert_allclose(scale.zeta_prime(coeffs, x), fd, rtol=1e-7)


def test_log_derivative_limit(coeffs):
    assert abs(W_prime(coeffs, 60.0) / W(coeffs, 60.0) - coeffs.phi_r) < 1e-6


@given(models(), st.floats(0.01, 20.0), st.floats(0.01, 20.0))
@settings(max_examples=100, deadline=None)
def test_log_derivative_nonincreasing(m, x, y):
    c = build_coefficients(m)
    x, y = min(x, y), max(x, y)
    # W'/W = Phi + W_Phi'/W_Phi, evaluated without overflow
    rx = c.phi_r + float(scale.W_tilted_prime(c, x) / W_tilted(c, x))
    ry = c.phi_r + float(scale.W_tilted_prime(c, y) / W_tilted(c, y))
    assert ry <= rx * (1 + 1e-10)
