"""Spectrally negative Levy model: Brownian motion with drift minus
compound-Poisson exponential jumps.

    X_t - X_0 = mu t + nu B_t - sum_{n <= N_t} Z_n,   Z_n ~ Exp(eta),  N ~ Poisson(lam)

with Laplace exponent ``phi(s) = mu s + nu^2 s^2 / 2 - lam s / (eta + s)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "laplace_exponent",
    "laplace_exponent_prime",
    "phi_inverse",
    "negative_roots",
    "calibrate_drift",
]

_ROOT_ATOL = 1e-12
_NEWTON_STEPS = 8


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the jump-diffusion log-asset process.

    Attributes
    ----------
    r : float
        Discount rate (per year), strictly positive.
    mu : float
        Linear drift (per year).
    nu : float
        Gaussian coefficient, ``nu >= 0``.
    lam : float
        Jump intensity (per year), ``lam >= 0``.
    eta : float
        Rate of the exponential jump size; mean jump is ``1 / eta``.
    """

    r: float
    mu: float
    nu: float
    lam: float
    eta: float

    def __post_init__(self):
        for name in ("r", "mu", "nu", "lam", "eta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.r <= 0:
            raise ValueError(f"r must be > 0, got {self.r}")
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.nu == 0 and self.mu <= 0:
            raise ValueError("nu = 0 requires mu > 0 (process would be a negative subordinator)")

    @classmethod
    def calibrated(cls, r: float, nu: float, lam: float, eta: float) -> "ModelParams":
        """Risk-neutral parameters: drift chosen so that ``phi(1) = r``."""
        return cls(r=r, mu=calibrate_drift(r, nu, lam, eta), nu=nu, lam=lam, eta=eta)

    @property
    def has_jumps(self) -> bool:
        return self.lam > 0

    def require_analytic(self):
        """The closed-form engine needs a Gaussian component."""
        if self.nu <= 0:
            raise ValueError("the analytic engine requires nu > 0; use the Monte Carlo oracle for nu = 0")


def laplace_exponent(params: ModelParams, s):
    """phi(s) = log E[exp(s X_1)].  Raises at the pole ``s = -eta``."""
    s = np.asarray(s, dtype=float)
    if params.lam > 0 and np.any(s == -params.eta):
        raise ZeroDivisionError("Laplace exponent has a pole at s = -eta")
    out = params.mu * s + 0.5 * params.nu**2 * s**2
    if params.lam > 0:
        out = out - params.lam * s / (params.eta + s)
    return out[()] if out.ndim == 0 else out


def laplace_exponent_prime(params: ModelParams, s):
    s = np.asarray(s, dtype=float)
    out = params.mu + params.nu**2 * s
    if params.lam > 0:
        out = out - params.lam * params.eta / (params.eta + s) ** 2
    return out[()] if out.ndim == 0 else out


def _polish(params: ModelParams, r: float, s: float) -> float:
    # safeguarded Newton: keep a step only if it shrinks the residual
    f = float(laplace_exponent(params, s)) - r
    for _ in range(_NEWTON_STEPS):
        d = float(laplace_exponent_prime(params, s))
        if d == 0.0 or f == 0.0:
            break
        cand = s - f / d
        fc = float(laplace_exponent(params, cand)) - r
        if abs(fc) >= abs(f):
            break
        s, f = cand, fc
    return s


def _real_roots(params: ModelParams, r: float) -> np.ndarray:
    """Real roots of phi(s) = r, sorted ascending.

    With jumps, (phi(s) - r)(eta + s) is a cubic; without, phi(s) - r is a
    quadratic (or linear when nu = 0).
    """
    mu, nu, lam, eta = params.mu, params.nu, params.lam, params.eta
    if lam > 0:
        coeffs = [0.5 * nu**2, mu + 0.5 * nu**2 * eta, mu * eta - lam - r, -r * eta]
    else:
        coeffs = [0.5 * nu**2, mu, -r]
    while coeffs and coeffs[0] == 0.0:
        coeffs = coeffs[1:]
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots.real))].real
    real = np.array([_polish(params, r, float(s)) for s in real if s != -eta])
    return np.sort(real)


def phi_inverse(params: ModelParams, r: float | None = None) -> float:
    """Right inverse Phi(r) = sup{s >= 0 : phi(s) = r}."""
    r = params.r if r is None else r
    if r <= 0:
        raise ValueError("phi_inverse needs r > 0")
    roots = _real_roots(params, r)
    pos = roots[roots > 0]
    if pos.size == 0:  # pragma: no cover - excluded by convexity
        raise ArithmeticError("no positive root of phi(s) = r")
    return float(pos[-1])


def negative_roots(params: ModelParams, r: float | None = None) -> tuple[float, float]:
    """Magnitudes (xi1, xi2) of the two negative roots of phi(s) = r.

    Requires ``nu > 0`` and ``lam > 0``; then ``0 < xi1 < eta < xi2``.
    """
    r = params.r if r is None else r
    if params.nu <= 0:
        raise ValueError("negative_roots requires nu > 0 (only one negative root when nu = 0)")
    if params.lam <= 0:
        raise ValueError("negative_roots requires lam > 0; use the Brownian special case")
    roots = _real_roots(params, r)
    neg = -roots[roots < 0]
    if neg.size != 2:  # pragma: no cover
        raise ArithmeticError(f"expected two negative roots, got {roots}")
    xi1, xi2 = sorted(float(v) for v in neg)
    return xi1, xi2


def calibrate_drift(r: float, nu: float, lam: float, eta: float) -> float:
    """Drift making exp(X) a discounted martingale: phi(1) = r."""
    return r - 0.5 * nu**2 + lam / (eta + 1.0)
