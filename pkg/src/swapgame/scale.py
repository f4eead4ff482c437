"""Closed-form r-scale function for the exponential-jump model.

Partial fractions of ``1 / (phi(s) - r)`` give

    W(x)  = sum_i C_i [exp(Phi x) - exp(-xi_i x)],        x >= 0,
    C_i   = -1 / phi'(-xi_i),     sum_i C_i = 1 / phi'(Phi).

Everything here accepts scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .levy import (
    ModelParams,
    laplace_exponent_prime,
    negative_roots,
    phi_inverse,
)

__all__ = [
    "ScaleCoefficients",
    "build_coefficients",
    "W",
    "W_prime",
    "W_double_prime",
    "W_tilted",
    "W_tilted_prime",
    "Z",
    "zeta",
    "zeta_prime",
    "W_tilted_prime",
]


@dataclass(frozen=True)
class ScaleCoefficients:
    params: ModelParams
    phi_r: float
    xi: tuple[float, ...]
    c: tuple[float, ...]
    phi_prime_at_phi_r: float

    @property
    def r(self) -> float:
        return self.params.r

    @property
    def w_tilted_limit(self) -> float:
        """W_Phi(inf) = sum C_i."""
        return float(sum(self.c))

    @property
    def W_prime_at_zero(self) -> float:
        return float(sum(ci * (self.phi_r + x) for ci, x in zip(self.c, self.xi)))


def build_coefficients(params: ModelParams) -> ScaleCoefficients:
    """Roots and residue weights for the model's scale function."""
    params.require_analytic()
    phi_r = phi_inverse(params)
    if params.lam > 0:
        xi = negative_roots(params)
    else:
        # pure Brownian: 0.5 nu^2 s^2 + mu s - r has a single negative root
        nu2 = params.nu**2
        xi = ((params.mu + math.sqrt(params.mu**2 + 2.0 * nu2 * params.r)) / nu2,)
    c = tuple(float(-1.0 / laplace_exponent_prime(params, -x)) for x in xi)
    return ScaleCoefficients(
        params=params,
        phi_r=phi_r,
        xi=tuple(float(x) for x in xi),
        c=c,
        phi_prime_at_phi_r=float(laplace_exponent_prime(params, phi_r)),
    )


def _prep(x):
    x = np.asarray(x, dtype=float)
    return x, np.maximum(x, 0.0)


def _out(mask_pos, vals, fill):
    res = np.where(mask_pos, vals, fill)
    return res[()] if res.ndim == 0 else res


def W(coeffs: ScaleCoefficients, x):
    x, xp = _prep(x)
    e = np.exp(coeffs.phi_r * xp)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc + ci * (e - np.exp(-k * xp))
    return _out(x >= 0, acc, 0.0)


def W_prime(coeffs: ScaleCoefficients, x):
    """W'(x) for x > 0; the right limit 2 / nu^2 at x = 0; zero for x < 0."""
    x, xp = _prep(x)
    ph = coeffs.phi_r
    e = np.exp(ph * xp)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc + ci * (ph * e + k * np.exp(-k * xp))
    return _out(x >= 0, acc, 0.0)


def W_double_prime(coeffs: ScaleCoefficients, x):
    x, xp = _prep(x)
    ph = coeffs.phi_r
    e = np.exp(ph * xp)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc + ci * (ph * ph * e - k * k * np.exp(-k * xp))
    return _out(x >= 0, acc, 0.0)


def W_tilted(coeffs: ScaleCoefficients, x):
    """exp(-Phi x) W(x); increases to 1 / phi'(Phi)."""
    x, xp = _prep(x)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc - ci * np.expm1(-(coeffs.phi_r + k) * xp)
    return _out(x >= 0, acc, 0.0)


def W_tilted_prime(coeffs: ScaleCoefficients, x):
    x, xp = _prep(x)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        a = coeffs.phi_r + k
        acc = acc + ci * a * np.exp(-a * xp)
    return _out(x >= 0, acc, 0.0)


def Z(coeffs: ScaleCoefficients, x, r: float | None = None):
    """Z(x) = 1 + r int_0^x W(y) dy; equal to 1 on x <= 0."""
    r = coeffs.r if r is None else r
    x, xp = _prep(x)
    ph = coeffs.phi_r
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc + ci * (np.expm1(ph * xp) / ph + np.expm1(-k * xp) / k)
    return _out(x > 0, 1.0 + r * acc, 1.0)


def zeta(coeffs: ScaleCoefficients, x, r: float | None = None):
    """E^x[exp(-r sigma_0)] = Z(x) - (r / Phi) W(x).

    The growing exponentials cancel exactly, leaving
    ``r sum_i C_i (1/Phi + 1/xi_i) exp(-xi_i x)``, which is what we evaluate.
    """
    r = coeffs.r if r is None else r
    x, xp = _prep(x)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc + ci * (1.0 / coeffs.phi_r + 1.0 / k) * np.exp(-k * xp)
    return _out(x > 0, r * acc, 1.0)


def zeta_prime(coeffs: ScaleCoefficients, x, r: float | None = None):
    r = coeffs.r if r is None else r
    x, xp = _prep(x)
    acc = np.zeros_like(xp)
    for ci, k in zip(coeffs.c, coeffs.xi):
        acc = acc - ci * (k / coeffs.phi_r + 1.0) * np.exp(-k * xp)
    return _out(x > 0, r * acc, 0.0)
