"""Payoffs and fit functions of the step-down default swap game.

All quantities that blow up like ``exp(Phi (B - A))`` are carried in the
tilted basis: with ``y = B - A``, ``E = exp(-Phi y)`` and ``D = W_Phi(y)``,

    Psi_hat(A, B) = (S Psi_hat(A, inf) + E rho_AB) / D,
    psi_hat(A, B) = psi_hat(A, inf) - E u / D,

where ``S = sum C_i`` and ``rho_AB`` is the bounded remainder.  The threshold
``B = inf`` is passed as ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import scale
from .levy import ModelParams
from .scale import ScaleCoefficients, build_coefficients

__all__ = [
    "INF",
    "AssumptionViolation",
    "ContractTerms",
    "GameKernel",
]

INF = math.inf


class AssumptionViolation(ValueError):
    """Contract terms outside the admissible (non-trivial) game."""


@dataclass(frozen=True)
class ContractTerms:
    """Premium/notional before and after exercise, plus exercise fees."""

    p: float
    alpha: float
    p_hat: float
    alpha_hat: float
    gamma_b: float
    gamma_s: float

    def __post_init__(self):
        for name in ("p", "alpha", "p_hat", "alpha_hat", "gamma_b", "gamma_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise AssumptionViolation(f"{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def from_ratio(cls, p, alpha, q, gamma_b, gamma_s) -> "ContractTerms":
        """Terms with ``p_hat = q p`` and ``alpha_hat = q alpha``."""
        return cls(p=p, alpha=alpha, p_hat=q * p, alpha_hat=q * alpha, gamma_b=gamma_b, gamma_s=gamma_s)

    @property
    def p_check(self) -> float:
        return self.p - self.p_hat

    @property
    def alpha_check(self) -> float:
        return self.alpha - self.alpha_hat

    @property
    def is_vanilla(self) -> bool:
        return self.p_check == 0 and self.alpha_check == 0

    @property
    def is_step_up(self) -> bool:
        return self.p_check < 0 and self.alpha_check < 0

    @property
    def is_step_down(self) -> bool:
        return self.p_check > 0 and self.alpha_check > 0

    def mirrored(self) -> "ContractTerms":
        """Symmetric game: (p_check, alpha_check, gamma_b, gamma_s) -> (-p_check, -alpha_check, gamma_s, gamma_b)."""
        return replace(
            self,
            p=self.p_hat,
            p_hat=self.p,
            alpha=self.alpha_hat,
            alpha_hat=self.alpha,
            gamma_b=self.gamma_s,
            gamma_s=self.gamma_b,
        )

    def check_nontrivial(self):
        if self.gamma_b + self.gamma_s <= 0:
            raise AssumptionViolation("need gamma_b + gamma_s > 0; with zero fees the game is exercised at inception")
        if self.p_check == 0 or self.alpha_check == 0:
            raise AssumptionViolation("p_check and alpha_check must both be non-zero")
        if self.p_check * self.alpha_check < 0:
            raise AssumptionViolation("p_check and alpha_check must have the same sign")

    def check_canonical(self):
        """Step-down assumption: alpha_check > gamma_s >= 0, p_check > 0, gamma_b + gamma_s > 0."""
        self.check_nontrivial()
        if not self.is_step_down:
            raise AssumptionViolation("canonical form requires a step-down contract (p_check > 0, alpha_check > 0)")
        if not self.alpha_check > self.gamma_s:
            raise AssumptionViolation(
                f"Assumption violated: alpha_check = {self.alpha_check:g} must exceed gamma_s = {self.gamma_s:g}"
            )


def _dq(k: float, eta: float, y: float) -> float:
    """(exp(-k y) - exp(-eta y)) / (eta - k), stable as k -> eta."""
    d = eta - k
    if d == 0.0:
        return y * math.exp(-eta * y)
    if abs(d) * y < 0.5:
        return math.exp(-eta * y) * math.expm1(d * y) / d
    return (math.exp(-k * y) - math.exp(-eta * y)) / d


class GameKernel:
    """Scale-function expressions for one (model, contract) pair.

    The contract is used through ``(p_check, alpha_check, gamma_b, gamma_s)``
    only and must be in step-down form for the fit functions to carry their
    usual meaning; payoffs and exit identities work for any terms.
    """

    def __init__(self, model: ModelParams | ScaleCoefficients, terms: ContractTerms):
        self.coeffs = model if isinstance(model, ScaleCoefficients) else build_coefficients(model)
        self.params = self.coeffs.params
        self.terms = terms
        self.r = self.params.r
        self.lam = self.params.lam
        self.eta = self.params.eta
        self.phi = self.coeffs.phi_r
        self.S = self.coeffs.w_tilted_limit
        self.pc = terms.p_check
        self.ac = terms.alpha_check
        self.gb = terms.gamma_b
        self.gs = terms.gamma_s
        self.beta = self.ac - self.gs
        self.cost = self.pc + self.r * self.gs
        self._ci = tuple(zip(self.coeffs.c, self.coeffs.xi))

    # -- payoffs -----------------------------------------------------------
    def _zeta(self, x):
        return scale.zeta(self.coeffs, x)

    def h(self, x):
        """Buyer's exercise payoff."""
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, (self.pc / self.r - self.gb) - (self.pc / self.r + self.ac) * self._zeta(x), 0.0)
        return out[()] if out.ndim == 0 else out

    def g(self, x):
        """Seller's exercise payoff (to the buyer)."""
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, (self.pc / self.r + self.gs) - (self.pc / self.r + self.ac) * self._zeta(x), 0.0)
        return out[()] if out.ndim == 0 else out

    def f(self, x):
        """Simultaneous-exercise payoff; never reached by threshold strategies."""
        x = np.asarray(x, dtype=float)
        out = np.where(
            x > 0, (self.pc / self.r - self.gb + self.gs) - (self.pc / self.r + self.ac) * self._zeta(x), 0.0
        )
        return out[()] if out.ndim == 0 else out

    def cds_value(self, x, p: float, alpha: float):
        """Perpetual CDS: (p / r + alpha) zeta(x) - p / r."""
        return (p / self.r + alpha) * self._zeta(x) - p / self.r

    # -- jump integrals ----------------------------------------------------
    def rho(self, A: float) -> float:
        if A == INF:
            return 0.0
        return self.lam * math.exp(-self.eta * A) * self.phi / (self.phi + self.eta)

    def _K_tilted(self, y: float) -> float:
        """exp(-Phi y) int_0^y W(w) exp(-eta (y - w)) dw."""
        ph, eta = self.phi, self.eta
        E = math.exp(-ph * y)
        s = 0.0
        for ci, k in self._ci:
            s += ci * (-math.expm1(-(ph + eta) * y) / (ph + eta) - E * _dq(k, eta, y))
        return s

    def _L(self, y):
        """W(y) / (Phi + eta) - K(y); bounded and decaying."""
        y = np.asarray(y, dtype=float)
        ph, eta = self.phi, self.eta
        out = np.zeros_like(y)
        for ci, k in self._ci:
            dq = np.vectorize(lambda t, k=k: _dq(k, eta, t), otypes=[float])(y) if y.ndim else _dq(k, eta, float(y))
            out = out + ci * ((np.exp(-eta * y) - np.exp(-k * y)) / (ph + eta) + dq)
        return out

    def kappa(self, x: float, A: float) -> float:
        """(1/r) int_A^inf Pi(du) [Z(x - A) - Z(x - u)], closed form for exponential jumps."""
        if not x > A:
            raise ValueError(f"kappa needs x > A, got x={x}, A={A}")
        if self.lam == 0:
            return 0.0
        y = x - A
        return self.lam * math.exp(-self.eta * A) * math.exp(self.phi * y) * self._K_tilted(y)

    # -- tilted building blocks -------------------------------------------
    def _parts(self, y: float):
        ph = self.phi
        E = math.exp(-ph * y)
        D = m = n = 0.0
        for ci, k in self._ci:
            ek = math.exp(-k * y)
            D -= ci * math.expm1(-(ph + k) * y)
            m += ci * ek
            n += ci * (ph + k) * ek
        return E, D, m, n

    def _jump_k(self, y: float) -> float:
        eta = self.eta
        s = 0.0
        for ci, k in self._ci:
            s += ci * (-math.exp(-eta * y) / (self.phi + eta) - _dq(k, eta, y))
        return s

    def _c0(self, A: float) -> float:
        return self.beta * self.lam * math.exp(-self.eta * A)

    def rho_AB(self, A: float, B: float) -> float:
        """Bounded remainder of Psi_hat in the tilted basis (B finite)."""
        y = B - A
        s = 0.0
        for ci, k in self._ci:
            s += ci * (-1.0 / self.phi + math.expm1(-k * y) / k)
        out = -self.cost * s - (self.gb + self.gs)
        if self.lam > 0:
            out += self._c0(A) * self._jump_k(y)
        return out

    # -- fit functions -----------------------------------------------------
    def psi_hat_inf(self, A: float) -> float:
        return -self.cost + self.beta * self.rho(A)

    def psi_hat_at_A(self, A: float) -> float:
        """Limit of psi_hat(A, B) as B decreases to A."""
        return -self.cost + self.beta * self.lam * math.exp(-self.eta * A)

    def Psi_hat_inf(self, A: float) -> float:
        return self.psi_hat_inf(A) / self.phi

    def _check_AB(self, A, B):
        if not (A >= 0 and B > A):
            raise ValueError(f"need 0 <= A < B, got A={A}, B={B}")

    def Psi_hat(self, A: float, B: float) -> float:
        """Psi(A, B) / W(B - A), extended to B = inf."""
        self._check_AB(A, B)
        if B == INF:
            return self.Psi_hat_inf(A)
        E, D, _, _ = self._parts(B - A)
        if D == 0.0:
            return -INF
        return (self.S * self.Psi_hat_inf(A) + E * self.rho_AB(A, B)) / D

    def Psi_hat_scaled(self, A: float, B: float) -> float:
        """W_Phi(B - A) Psi_hat(A, B); same sign as Psi_hat, finite at B = A."""
        self._check_AB(A, B)
        if B == INF:
            return self.S * self.Psi_hat_inf(A)
        E = math.exp(-self.phi * (B - A))
        return self.S * self.Psi_hat_inf(A) + E * self.rho_AB(A, B)

    def _u(self, A: float, y: float, m: float) -> float:
        if self.lam == 0:
            return 0.0
        return self._c0(A) * self.eta * (m / (self.phi + self.eta) + self._jump_k(y))

    def psi_hat(self, A: float, B: float) -> float:
        """psi(A, B) / W(B - A), extended to B = inf."""
        self._check_AB(A, B)
        if B == INF:
            return self.psi_hat_inf(A)
        y = B - A
        E, D, m, _ = self._parts(y)
        if D == 0.0:
            return self.psi_hat_at_A(A)
        return self.psi_hat_inf(A) - E * self._u(A, y, m) / D

    def smooth_fit_gap_scaled(self, A: float, B: float) -> float:
        """exp(Phi (B - A)) [Psi_hat - psi_hat W / W'] at (A, B).

        Vanishes exactly where d/dB Psi_hat(A, B) = 0; tends to
        ``(p_check / r - gamma_b) / S`` as B -> inf.
        """
        self._check_AB(A, B)
        if B == INF:
            return (self.pc / self.r - self.gb) / self.S
        y = B - A
        E, D, m, n = self._parts(y)
        if D == 0.0:
            return -INF
        ph = self.phi
        den = ph * D + E * n
        return (
            self.Psi_hat_inf(A) * (ph * D * m + self.S * n) / (D * den)
            + self.rho_AB(A, B) / D
            + self._u(A, y, m) / den
        )

    def smooth_fit_gap(self, A: float, B: float) -> float:
        """Psi_hat - psi_hat W / W'."""
        if B == INF:
            return 0.0
        return math.exp(-self.phi * (B - A)) * self.smooth_fit_gap_scaled(A, B)

    def W_ratio(self, y: float) -> float:
        """W'(y) / W(y) = Phi + W_Phi'(y) / W_Phi(y)."""
        E, D, _, n = self._parts(y)
        return self.phi + E * n / D

    def dPsi_hat_dB(self, A: float, B: float) -> float:
        """d/dB Psi_hat(A, B) = psi_hat - (W'/W) Psi_hat."""
        self._check_AB(A, B)
        if B == INF:
            return 0.0
        y = B - A
        E, D, _, n = self._parts(y)
        return -(self.phi + E * n / D) * E * self.smooth_fit_gap_scaled(A, B)

    # -- unscaled versions (overflow for large B - A) -----------------------
    def _W(self, y):
        return scale.W(self.coeffs, y)

    def _Z(self, y):
        return scale.Z(self.coeffs, y)

    def Psi(self, A: float, B: float) -> float:
        self._check_AB(A, B)
        return float(
            (self.pc / self.r - self.gb) - (self.pc / self.r + self.gs) * self._Z(B - A) + self.beta * self.kappa(B, A)
        )

    def psi(self, A: float, B: float) -> float:
        """d/dB Psi(A, B)."""
        self._check_AB(A, B)
        y = B - A
        w = float(self._W(y))
        jump = 0.0
        if self.lam > 0:
            K = math.exp(self.phi * y) * self._K_tilted(y)
            jump = self.beta * self.lam * math.exp(-self.eta * A) * (w - self.eta * K)
        return -w * self.cost + jump

    # -- exit identities and the common term Upsilon ------------------------
    def exit_identities(self, x, A: float, B: float):
        """Discounted two-sided exit functionals from (A, B) started at x.

        Returns ``(up, down, jump_default)``:
        E[e^{-rT}; up-crossing B first], E[e^{-rT}; exit below A first],
        E[e^{-rT}; exit by a jump to or below 0].
        """
        x = np.asarray(x, dtype=float)
        if np.any(x <= A) or np.any(x >= B):
            raise ValueError("exit_identities needs A < x < B")
        y = x - A
        zeta_y = self._zeta(y)
        lamA = self.lam * math.exp(-self.eta * A)
        if B == INF:
            up = np.zeros_like(y)
            down = zeta_y
            jd = lamA * self._L(y) if self.lam > 0 else np.zeros_like(y)
        else:
            Y = B - A
            Dy = scale.W_tilted(self.coeffs, y)
            up = np.exp(-self.phi * (Y - y)) * Dy / float(scale.W_tilted(self.coeffs, Y))
            down = zeta_y - float(self._zeta(Y)) * up
            jd = lamA * (self._L(y) - up * float(self._L(Y))) if self.lam > 0 else np.zeros_like(y)
        if x.ndim == 0:
            return float(up), float(down), float(jd)
        return up, down, jd

    def Upsilon(self, x, A: float, B: float):
        """Common term of v_{A,B} - h and v_{A,B} - g on A < x < B."""
        up, down, jd = self.exit_identities(x, A, B)
        return (self.pc / self.r - self.gb) * up + (self.pc / self.r + self.gs) * down + self.beta * jd

    def Upsilon_scale_form(self, x: float, A: float, B: float) -> float:
        """W(x-A) Psi_hat(A,B) + (p_check/r + gamma_s) Z(x-A) - (alpha_check - gamma_s) kappa(x; A)."""
        if not A < x < B:
            raise ValueError("need A < x < B")
        y = x - A
        return float(
            self._W(y) * self.Psi_hat(A, B)
            + (self.pc / self.r + self.gs) * self._Z(y)
            - self.beta * self.kappa(x, A)
        )

    def v_threshold(self, x, A: float, B: float):
        """v_{A,B}(x): seller exits at/below A, buyer at B (B = inf: never)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        low = (x > 0) & (x <= A)
        high = x >= B
        mid = (x > A) & (x < B) & (x > 0)
        out[low] = self.g(x[low])
        out[high] = self.h(x[high])
        if np.any(mid):
            xm = x[mid]
            out[mid] = self.h(xm) + self.Upsilon(xm, A, B) - (self.pc / self.r - self.gb)
        return out[0] if out.size == 1 else out

    def strategy_value(self, x: float, A: float, B: float, upper_payoff: float, lower_const: float,
                       lower_zeta_coef: float) -> float:
        """Expected discounted payoff of the exit from (A, B).

        Pays ``upper_payoff`` on creeping over B and
        ``lower_const - lower_zeta_coef * zeta(X)`` on exiting to X in (0, A];
        nothing at default.  Used to evaluate either player's role without
        the step-down payoff conventions.
        """
        up, down, jd = self.exit_identities(x, A, B)
        z_x = float(self._zeta(x))
        z_B = 0.0 if B == INF else float(self._zeta(B))
        disc_default_after_low = z_x - up * z_B - jd
        return up * upper_payoff + lower_const * (down - jd) - lower_zeta_coef * disc_default_after_low
