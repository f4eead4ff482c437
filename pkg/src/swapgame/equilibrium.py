"""Equilibrium thresholds (A*, B*) of the step-down game.

The seller exercises once X enters (0, A*]; the buyer once X reaches B*.
``solve_thresholds`` runs the bisection on A driven by the crossing maps
``b_lower`` (first B where Psi_hat >= 0) and ``b_upper`` (first B where
psi_hat <= 0), classifying the outcome into one of four cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .kernel import INF, ContractTerms, GameKernel
from .levy import ModelParams

__all__ = [
    "ConvergenceError",
    "EquilibriumSolution",
    "a_lower",
    "a_upper",
    "b_lower",
    "b_upper",
    "b_mid",
    "solve_thresholds",
]

SCAN_START = 1e-3
LINEAR_SCAN_STEP = 0.05
SCAN_LIMIT = 80.0
_XTOL = 1e-14
_RTOL = 4 * 2.220446049250313e-16


class ConvergenceError(RuntimeError):
    """Bisection hit its iteration cap without meeting the tolerance."""


@dataclass(frozen=True)
class EquilibriumSolution:
    """Thresholds in the canonical (step-down) frame.

    ``a_star`` is the lower exercise level, ``b_star`` the upper one
    (``math.inf`` when that player never exercises).  For a step-up contract
    ``mirrored`` is set: the lower level then belongs to the buyer.
    """

    a_star: float
    b_star: float
    case_id: int
    nash: bool
    fit_residuals: tuple[float, float]
    a_lower: float = 0.0
    a_upper: float = 0.0
    iterations: int = 0
    mirrored: bool = False
    note: str = ""
    b_gap: float = field(default=0.0, compare=False)

    @property
    def seller_threshold(self) -> float:
        return self.b_star if self.mirrored else self.a_star

    @property
    def buyer_threshold(self) -> float:
        return self.a_star if self.mirrored else self.b_star


def _scale(k: GameKernel) -> float:
    return k.cost + abs(k.beta) * k.lam + 1.0


def a_lower(k: GameKernel) -> float:
    """Root of psi_hat(A, inf) = 0, clipped at zero."""
    if k.lam == 0:
        return 0.0
    arg = k.lam * k.beta * k.phi / ((k.phi + k.eta) * k.cost)
    return max(0.0, math.log(arg) / k.eta) if arg > 0 else 0.0


def a_upper(k: GameKernel) -> float:
    """Root of psi_hat(A, A+) = 0, clipped at zero."""
    if k.lam == 0:
        return 0.0
    arg = k.lam * k.beta / k.cost
    return max(0.0, math.log(arg) / k.eta) if arg > 0 else 0.0


def _y_max(k: GameKernel) -> float:
    # beyond this exp(-Phi y) underflows and every tilted function is at its limit
    return 700.0 / k.phi


def _first_crossing(fn, positive: bool, y_hi_limit: float, y0: float = 0.0):
    """Doubling scan from y0 for fn(y) >= 0 (or <= 0); bracketed root or None."""
    prev = y0
    y = max(SCAN_START, 2 * y0)
    while y <= y_hi_limit:
        v = fn(y)
        if (v >= 0) if positive else (v <= 0):
            if v == 0:
                return y
            return brentq(fn, prev, y, xtol=_XTOL, rtol=_RTOL)
        prev, y = y, 2 * y
    return None


def b_upper(k: GameKernel, A: float) -> float:
    """inf{B > A : psi_hat(A, B) <= 0}; psi_hat is decreasing in B."""
    if k.psi_hat_at_A(A) <= 0:
        return A
    if k.psi_hat_inf(A) >= -1e-13 * _scale(k):
        return INF

    def fn(y):
        return k.psi_hat(A, A + y) if y > 0 else k.psi_hat_at_A(A)

    y = _first_crossing(fn, positive=False, y_hi_limit=_y_max(k))
    return INF if y is None else A + y


def b_lower(k: GameKernel, A: float, b_up: float | None = None) -> float:
    """inf{B > A : Psi_hat(A, B) >= 0}.

    Psi(A, .) increases while psi > 0 and decreases after, so the first
    crossing lies below ``b_upper(A)`` if it exists at all.
    """
    bu = b_upper(k, A) if b_up is None else b_up
    if bu == A:
        return INF
    if bu < INF:
        top = k.Psi_hat_scaled(A, bu)
        if top < 0:
            return INF
        if top == 0:
            return bu

        def fn(y):
            return k.Psi_hat_scaled(A, A + y) if y > 0 else -(k.gb + k.gs)

        return A + brentq(fn, 0.0, bu - A, xtol=_XTOL, rtol=_RTOL)
    # psi_hat(A, .) > 0 throughout: Psi is increasing in B
    if abs(k.psi_hat_inf(A)) <= 1e-13 * _scale(k):
        # Psi_hat(A, inf) = 0: Psi(A, B) equals the bounded remainder, whose limit is p_check/r - gamma_b
        if k.pc / k.r - k.gb <= 0:
            return INF

        def fn(y):
            return k.rho_AB(A, A + y)
    else:

        def fn(y):
            return k.Psi_hat_scaled(A, A + y)

    y = _first_crossing(fn, positive=True, y_hi_limit=_y_max(k))
    return INF if y is None else A + y


def _mid_grid(limit):
    y = SCAN_START
    while y < 1.0:
        yield y
        y *= 2
    y = 1.0
    while y <= limit:
        yield y
        y += LINEAR_SCAN_STEP


def b_mid(k: GameKernel, A: float = 0.0) -> float:
    """inf{B > A : Psi_hat - psi_hat W/W' >= 0}, i.e. where d/dB Psi_hat turns non-positive."""

    def fn(y):
        return k.smooth_fit_gap_scaled(A, A + y)

    prev = 0.0
    for y in _mid_grid(SCAN_LIMIT):
        v = fn(y)
        if v >= 0:
            if v == 0:
                return A + y
            lo = prev if prev > 0 else y / 1024
            while fn(lo) >= 0 and lo > 1e-300:
                lo /= 1024
            return A + brentq(fn, lo, y, xtol=_XTOL, rtol=_RTOL)
        prev = y
    # past the scan window the sign equals that of the limit (p_check / r - gamma_b)
    if k.pc / k.r - k.gb <= 0:
        return INF
    y = _first_crossing(fn, positive=True, y_hi_limit=_y_max(k), y0=prev)
    return INF if y is None else A + y


def _residuals(k: GameKernel, A: float, B: float) -> tuple[float, float]:
    if B == INF:
        return k.Psi_hat_inf(A), 0.0
    return k.Psi_hat(A, B), k.dPsi_hat_dB(A, B)


def _finish(k, A, B, case_id, lo, hi, iters, note="", gap=0.0):
    nash = case_id in (1, 2) or k.params.nu == 0
    if case_id in (3, 4) and not nash:
        note = (note + " " if note else "") + (
            "A* = 0 with a Gaussian component: the seller's limit strategy is not admissible; "
            "exercising at a small level delta > 0 is epsilon-optimal"
        )
    return EquilibriumSolution(
        a_star=A,
        b_star=B,
        case_id=case_id,
        nash=nash,
        fit_residuals=_residuals(k, A, B),
        a_lower=lo,
        a_upper=hi,
        iterations=iters,
        note=note,
        b_gap=gap,
    )


def _best_candidate(k: GameKernel, a_values, psi_tol=1e-10, slope_tol=1e-8):
    best, score = None, INF
    for A in a_values:
        bu = b_upper(k, A)
        for B in (bu, b_lower(k, A, bu)):
            if not (A < B < INF):
                continue
            res, slope = _residuals(k, A, B)
            if abs(res) <= psi_tol and abs(slope) <= slope_tol and abs(res) + abs(slope) < score:
                best, score = (A, B), abs(res) + abs(slope)
    return best


def solve_thresholds(
    params: ModelParams | GameKernel,
    terms: ContractTerms | None = None,
    eps: float = 1e-8,
    max_iter: int = 200,
) -> EquilibriumSolution:
    """Equilibrium thresholds for canonical step-down terms."""
    if isinstance(params, GameKernel):
        k = params
    else:
        params.require_analytic()
        k = GameKernel(params, terms)
    k.terms.check_canonical()

    Al, Au = a_lower(k), a_upper(k)

    # Step 1-1: seller's threshold collapses to zero
    if Au == 0 or (Al == 0 and b_lower(k, 0.0) >= b_upper(k, 0.0)):
        B = b_mid(k, 0.0)
        return _finish(k, 0.0, B, 3 if B < INF else 4, Al, Au, 0)

    # Step 1-2: buyer never exercises
    if Al > 0:
        bl = b_lower(k, Al)
        if bl == INF:
            return _finish(k, Al, INF, 2, Al, Au, 0)
        if bl == b_upper(k, Al):
            return _finish(k, Al, bl, 1, Al, Au, 0)

    lo, hi = Al, Au
    for it in range(1, max_iter + 1):
        A = 0.5 * (lo + hi)
        bu = b_upper(k, A)
        bl = b_lower(k, A, bu)
        gap = abs(bu - bl) if bu < INF and bl < INF else INF
        if gap <= eps:
            return _finish(k, A, bu, 1, Al, Au, it, gap=gap)
        if bu > bl:
            lo = A
        else:
            hi = A
        if hi - lo <= 4 * math.ulp(max(hi, 1.0)):
            # A is resolved to machine precision while the first crossing of Psi_hat is
            # a tangency, so the gap in B cannot shrink further.  Take the crossing with
            # the smallest fit residual from either end of the bracket.
            best = _best_candidate(k, (lo, hi))
            if best is not None:
                A, B = best
                return _finish(k, A, B, 1, Al, Au, it, note="stopped at machine resolution in A", gap=gap)
            break
    raise ConvergenceError(
        f"threshold bisection did not converge in {max_iter} iterations (A in [{lo!r}, {hi!r}])"
    )
