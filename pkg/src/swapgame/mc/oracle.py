"""Monte Carlo estimators for the analytic quantities of the game.

Paths are Brownian with drift between exponential jump epochs.  Barrier
crossings inside each Brownian step use the exact bridge crossing
probability and an exact bridge hitting-time draw, so ``grid_dt`` only
controls how often the two barriers are re-checked against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..kernel import INF, ContractTerms, GameKernel
from ..levy import ModelParams
from . import _accel
from ._paths_numba import CENSORED, CREEP_LOW, JUMP_LOW, UP

if _accel.HAVE_NUMBA:
    from ._paths_numba import simulate_batch as _simulate
else:  # pragma: no cover - selected by SWAPGAME_DISABLE_NUMBA
    from ._paths_numpy import simulate_batch_vec as _simulate

__all__ = [
    "McConfig",
    "McEstimate",
    "PathSample",
    "ExitTriple",
    "DeviationResult",
    "GridSaddle",
    "simulate_paths",
    "simulate_default_time",
    "estimate_default_laplace",
    "estimate_exit_triple",
    "estimate_creeping",
    "game_payoffs",
    "estimate_game_value",
    "nash_deviation_test",
    "grid_saddle_search",
]


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 100_000
    horizon: float | None = None
    grid_dt: float = 1.0 / 250.0
    master_seed: int = 20240517
    antithetic: bool = False
    bridge: bool = True
    truncation_tol: float = 1e-4

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not self.grid_dt > 0:
            raise ValueError("grid_dt must be > 0")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic sampling needs an even n_paths")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    def horizon_for(self, r: float) -> float:
        """Time cap with exp(-r T) below the truncation tolerance."""
        if self.horizon is not None:
            return self.horizon
        return math.log(1.0 / self.truncation_tol) / r * (1 + 1e-9)

    def truncation_bound(self, r: float) -> float:
        """Upper bound on |payoff| weight lost by censoring at the horizon."""
        return math.exp(-r * self.horizon_for(r))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def within(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr


def _estimate(samples: np.ndarray, config: McConfig) -> McEstimate:
    n = samples.size
    if config.antithetic:
        units = 0.5 * (samples[0::2] + samples[1::2])
    else:
        units = samples
    se = float(np.std(units, ddof=1) / math.sqrt(units.size)) if units.size > 1 else math.inf
    return McEstimate(mean=float(np.mean(units)), stderr=se, n=n, seed=config.master_seed)


@dataclass(frozen=True)
class PathSample:
    """Per-path exit data; ``t_default`` is inf when default is unobserved."""

    t_exit: np.ndarray
    x_exit: np.ndarray
    kind: np.ndarray
    t_default: np.ndarray
    horizon: float


def simulate_paths(
    params: ModelParams, x0: float, lo: float, hi: float, config: McConfig, follow: bool = False
) -> PathSample:
    """Exit of X from (lo, hi) started at x0; with ``follow`` each exercised path runs on to default."""
    T = config.horizon_for(params.r)
    # after the exit a single barrier remains and whole jump-free segments are exact
    dt_after = math.inf if (config.bridge and params.nu > 0) or params.nu == 0 else config.grid_dt
    t, x, k, td = _simulate(
        float(x0), float(lo), float(hi), params.mu, params.nu, params.lam, params.eta,
        T, config.grid_dt, dt_after, int(config.master_seed), int(config.n_paths),
        bool(config.antithetic), bool(config.bridge), bool(follow),
    )
    return PathSample(t, x, k, td, T)


def simulate_default_time(params: ModelParams, x0: float, config: McConfig) -> PathSample:
    """Default time sigma_0 per path (t_default, inf if censored); kind 2 marks creeping."""
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    return simulate_paths(params, x0, 0.0, INF, config)


def estimate_default_laplace(params: ModelParams, x0: float, config: McConfig) -> McEstimate:
    """E[exp(-r sigma_0)], the Monte Carlo counterpart of zeta(x0)."""
    s = simulate_default_time(params, x0, config)
    return _estimate(np.exp(-params.r * s.t_default), config)


class ExitTriple(tuple):
    """(up, down, jump_default) estimates, plus the raw per-path arrays."""

    def __new__(cls, up, down, jump_default, samples=None):
        obj = super().__new__(cls, (up, down, jump_default))
        obj.samples = samples
        return obj

    up = property(lambda self: self[0])
    down = property(lambda self: self[1])
    jump_default = property(lambda self: self[2])


def estimate_exit_triple(params: ModelParams, x: float, A: float, B: float, config: McConfig) -> ExitTriple:
    if not 0 <= A < x < B:
        raise ValueError("need 0 <= A < x < B")
    s = simulate_paths(params, x, A, B, config)
    disc = np.exp(-params.r * s.t_exit)
    exited = s.kind != CENSORED
    up = np.where(s.kind == UP, disc, 0.0)
    down = np.where(exited & (s.kind != UP), disc, 0.0)
    jd = np.where((s.kind == JUMP_LOW) & (s.x_exit <= 0.0), disc, 0.0)
    arrays = {"up": up, "down": down, "jump_default": jd, "creep": np.where(s.kind == CREEP_LOW, disc, 0.0)}
    return ExitTriple(_estimate(up, config), _estimate(down, config), _estimate(jd, config), arrays)


def estimate_creeping(params: ModelParams, x: float, A: float, B: float, config: McConfig) -> McEstimate:
    """E[exp(-r T); X_T = A] for the exit time T of (A, B)."""
    return _estimate(estimate_exit_triple(params, x, A, B, config).samples["creep"], config)


def game_payoffs(
    params: ModelParams,
    x: float,
    A: float,
    B: float,
    terms: ContractTerms,
    config: McConfig,
    continuation: str = "payoff",
) -> np.ndarray:
    """Per-path discounted game payoff under (sigma_A, tau_B) for step-down terms.

    With ``continuation="payoff"`` an exercise at theta pays
    e^{-r theta} h(B) (buyer) or e^{-r theta} g(X_theta) (seller).  With
    ``"simulate"`` the path is followed to default instead and pays
    p_check / r (e^{-r theta} - e^{-r sigma_0}) - alpha_check e^{-r sigma_0}
    minus gamma_b or plus gamma_s times e^{-r theta}, which does not use the
    scale functions at all.  Default before exercise pays nothing.
    """
    if continuation not in ("payoff", "simulate"):
        raise ValueError(f"unknown continuation mode {continuation!r}")
    simulate = continuation == "simulate" or params.nu == 0
    r = params.r
    pc, ac = terms.p_check, terms.alpha_check
    s = simulate_paths(params, x, A, B, config, follow=simulate)
    buyer = s.kind == UP
    seller = ((s.kind == CREEP_LOW) | (s.kind == JUMP_LOW)) & (s.x_exit > 0.0)
    # upward passage is always continuous
    assert np.all(s.x_exit[buyer] == (x if x >= B else B))
    d_ex = np.exp(-r * s.t_exit)
    out = np.zeros(s.kind.size)
    if simulate:
        d_def = np.exp(-r * s.t_default)
        base = (pc / r) * (d_ex - d_def) - ac * d_def
        out[buyer] = base[buyer] - terms.gamma_b * d_ex[buyer]
        out[seller] = base[seller] + terms.gamma_s * d_ex[seller]
    else:
        k = GameKernel(params, terms)
        out[buyer] = d_ex[buyer] * k.h(s.x_exit[buyer])
        out[seller] = d_ex[seller] * k.g(s.x_exit[seller])
    return out


def estimate_game_value(
    params: ModelParams,
    x: float,
    A: float,
    B: float,
    terms: ContractTerms,
    config: McConfig,
    continuation: str = "payoff",
) -> McEstimate:
    """Estimate of v_{A,B}(x) in the step-down frame (B = inf allowed)."""
    return _estimate(game_payoffs(params, x, A, B, terms, config, continuation), config)


@dataclass(frozen=True)
class DeviationResult:
    player: str
    level: float
    base: float
    deviated: float
    diff: float
    diff_stderr: float
    passed: bool


def nash_deviation_test(
    params: ModelParams,
    x: float,
    a_star: float,
    b_star: float,
    terms: ContractTerms,
    perturbations=(0.8, 1.0, 1.2),
    config: McConfig = McConfig(n_paths=20_000),
    k: float = 3.0,
) -> list[DeviationResult]:
    """Unilateral threshold deviations evaluated with common random numbers.

    The buyer (upper threshold) must not gain and the seller (lower
    threshold) must not lose beyond ``k`` standard errors of the paired
    difference.
    """
    base = game_payoffs(params, x, a_star, b_star, terms, config)
    base_mean = float(np.mean(base))
    if b_star < INF:
        b_levels = [f * b_star for f in perturbations]
    else:
        b_levels = [f * max(x, a_star) for f in perturbations if f > 1] + [2 * max(x, a_star)]
    results = []

    def paired(dev, player, level):
        d = _estimate(dev - base, config)
        gain = d.mean if player == "buyer" else -d.mean
        results.append(
            DeviationResult(player, level, base_mean, float(np.mean(dev)), d.mean, d.stderr, gain <= k * d.stderr)
        )

    for b in b_levels:
        paired(game_payoffs(params, x, a_star, b, terms, config), "buyer", b)
    for f in perturbations:
        a = f * a_star
        paired(game_payoffs(params, x, a, b_star, terms, config), "seller", a)
    return results


@dataclass(frozen=True)
class GridSaddle:
    a_grid: np.ndarray
    b_grid: np.ndarray
    values: np.ndarray = field(repr=False)
    i_star: int
    j_star: int

    @property
    def a_hat(self) -> float:
        return float(self.a_grid[self.i_star])

    @property
    def b_hat(self) -> float:
        return float(self.b_grid[self.j_star])


def grid_saddle_search(
    params: ModelParams, x: float, terms: ContractTerms, a_grid, b_grid, config: McConfig
) -> GridSaddle:
    """Brute-force max over B of min over A of the estimated v(x; sigma_A, tau_B)."""
    a_grid = np.asarray(a_grid, dtype=float)
    b_grid = np.asarray(b_grid, dtype=float)
    vals = np.empty((a_grid.size, b_grid.size))
    for i, a in enumerate(a_grid):
        for j, b in enumerate(b_grid):
            vals[i, j] = float(np.mean(game_payoffs(params, x, a, b, terms, config)))
    j_star = int(np.argmax(vals.min(axis=0)))
    i_star = int(np.argmin(vals[:, j_star]))
    return GridSaddle(a_grid, b_grid, vals, i_star, j_star)
