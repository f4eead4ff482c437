"""Equilibrium value functions, the step-up transform and the premium solver.

``SwapGame`` bundles one model and one contract.  Step-up contracts are
solved through the mirrored step-down game, and the buyer's value is
``V = C - v`` with ``v`` taken from that game.  Vanilla terms (q = 1) have
no game component and ``V = C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from . import scale
from .equilibrium import EquilibriumSolution, solve_thresholds
from .kernel import INF, AssumptionViolation, ContractTerms, GameKernel
from .levy import ModelParams

__all__ = [
    "BracketError",
    "SwapGame",
    "ValueCurve",
    "value_v",
    "value_V",
    "equilibrium_premium",
    "smoothness_report",
]

REGION_DEFAULT = "default"
REGION_CONTINUE = "continue"


class BracketError(RuntimeError):
    """No sign change of V over the expanded premium bracket."""


@dataclass(frozen=True)
class ValueCurve:
    grid: np.ndarray
    values: np.ndarray
    regions: tuple[str, ...]
    thresholds: tuple[float, float]
    premium: float


class SwapGame:
    """One model/contract pair with its cached equilibrium."""

    def __init__(self, params: ModelParams, terms: ContractTerms, eps: float = 1e-8):
        params.require_analytic()
        self.params = params
        self.terms = terms
        self.eps = eps
        self.vanilla = terms.is_vanilla
        if not self.vanilla:
            terms.check_nontrivial()
        self.mirrored = terms.is_step_up
        self.canonical = terms.mirrored() if self.mirrored else terms
        self.kernel = GameKernel(params, self.canonical)

    @cached_property
    def solution(self) -> EquilibriumSolution | None:
        if self.vanilla:
            return None
        sol = solve_thresholds(self.kernel, eps=self.eps)
        if self.mirrored:
            sol = _with_mirror(sol)
        return sol

    @property
    def thresholds(self) -> tuple[float, float]:
        """(lower, upper) exercise levels; (0, inf) when nobody exercises."""
        sol = self.solution
        return (0.0, INF) if sol is None else (sol.a_star, sol.b_star)

    def cds(self, x):
        return self.kernel.cds_value(x, self.terms.p, self.terms.alpha)

    def v(self, x):
        """Game component in the canonical frame, v_{A*,B*}(x)."""
        if self.vanilla:
            return np.zeros_like(np.asarray(x, dtype=float))[()]
        A, B = self.thresholds
        return self.kernel.v_threshold(x, A, B)

    def V(self, x):
        """Buyer's equilibrium value C +/- v."""
        x = np.asarray(x, dtype=float)
        c = np.where(x > 0, self.cds(np.maximum(x, 0.0)), self.terms.alpha)
        if self.vanilla:
            return c[()]
        v = np.asarray(self.v(x), dtype=float).reshape(x.shape)
        out = c - v if self.mirrored else c + v
        return out[()]

    def region(self, x: float) -> str:
        if x <= 0:
            return REGION_DEFAULT
        A, B = self.thresholds
        lower, upper = ("buyer", "seller") if self.mirrored else ("seller", "buyer")
        if not self.vanilla and x <= A:
            return lower
        if not self.vanilla and x >= B:
            return upper
        return REGION_CONTINUE

    def curve(self, grid) -> ValueCurve:
        grid = np.asarray(grid, dtype=float)
        return ValueCurve(
            grid=grid,
            values=np.atleast_1d(self.V(grid)),
            regions=tuple(self.region(float(x)) for x in grid),
            thresholds=self.thresholds,
            premium=self.terms.p,
        )

    def smoothness_report(self) -> dict:
        return smoothness_report(self)


def _with_mirror(sol: EquilibriumSolution) -> EquilibriumSolution:
    from dataclasses import replace

    return replace(sol, mirrored=True)


def value_v(x, game: SwapGame):
    return game.v(x)


def value_V(x, game: SwapGame):
    return game.V(x)


# one-sided 4-point difference weights, O(h^3)
_FD_W = np.array([-11.0, 18.0, -9.0, 2.0]) / 6.0


def _one_sided(fn, x0: float, h: float) -> tuple[float, float]:
    """(limit, derivative) of fn at x0 from the side given by the sign of h."""
    vals = np.array([float(fn(x0 + k * h)) for k in range(1, 5)])
    # cubic extrapolation of the value back to x0
    limit = 4 * vals[0] - 6 * vals[1] + 4 * vals[2] - vals[3]
    pts = np.concatenate(([limit], vals[:3]))
    return limit, float(_FD_W @ pts) / h


def smoothness_report(game: SwapGame) -> dict:
    """Continuity and smooth-fit residuals of v at the equilibrium thresholds."""
    sol = game.solution
    if sol is None:
        return {}
    k = game.kernel
    A, B = sol.a_star, sol.b_star
    coef = k.pc / k.r + k.ac
    rep: dict = {"case": sol.case_id}
    if A > 0:
        hA = 1e-5 * max(1.0, A)
        lim, d = _one_sided(lambda t: k.v_threshold(t, A, B), A, hA)
        rep["continuity_A"] = lim - float(k.g(A))
        rep["smooth_A"] = d + coef * float(scale.zeta_prime(k.coeffs, A))
    if B < INF:
        hB = 1e-5 * max(1.0, B)
        lim, d = _one_sided(lambda t: k.v_threshold(t, A, B), B, -hB)
        rep["continuity_B"] = lim - float(k.h(B))
        rep["smooth_B"] = d + coef * float(scale.zeta_prime(k.coeffs, B))
    return rep


def equilibrium_premium(
    x: float,
    params: ModelParams,
    q: float,
    alpha: float = 1.0,
    gamma_b: float = 0.1,
    gamma_s: float = 0.1,
    tol: float = 1e-8,
    max_doublings: int = 60,
) -> float:
    """Premium p* with V(x; p*) = 0, where p_hat = q p and alpha_hat = q alpha."""
    r = params.r

    def value(p: float) -> float:
        return float(SwapGame(params, ContractTerms.from_ratio(p, alpha, q, gamma_b, gamma_s)).V(x))

    # p = 0 is a trivial contract unless q = 1; start just above it
    p_lo = 0.0 if q == 1 else 1e-12
    v_lo = value(p_lo)
    p_hi = 10 * r * (alpha + gamma_b)
    v_hi = value(p_hi)
    n = 0
    while v_hi > 0 and n < max_doublings:
        p_lo, v_lo = p_hi, v_hi
        p_hi *= 2
        v_hi = value(p_hi)
        n += 1
    if v_lo * v_hi > 0:
        raise BracketError(f"V does not change sign on [{p_lo:g}, {p_hi:g}]")
    p_star = brentq(value, p_lo, p_hi, xtol=1e-15, maxiter=200)
    if abs(value(p_star)) >= tol:
        raise BracketError(f"premium root not resolved: |V(p*)| = {abs(value(p_star)):.3g}")
    return p_star
