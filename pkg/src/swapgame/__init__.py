"""Nash equilibria of step-up/step-down credit default swap games under a
Brownian motion plus exponential-jump Levy model."""
from .equilibrium import ConvergenceError, EquilibriumSolution, solve_thresholds
from .kernel import INF, AssumptionViolation, ContractTerms, GameKernel
from .levy import ModelParams, calibrate_drift, laplace_exponent, negative_roots, phi_inverse
from .scale import ScaleCoefficients, build_coefficients
from .valuation import SwapGame, ValueCurve, equilibrium_premium, smoothness_report, value_v, value_V

__all__ = [
    "INF",
    "AssumptionViolation",
    "ContractTerms",
    "ConvergenceError",
    "EquilibriumSolution",
    "GameKernel",
    "ModelParams",
    "ScaleCoefficients",
    "SwapGame",
    "ValueCurve",
    "build_coefficients",
    "calibrate_drift",
    "equilibrium_premium",
    "laplace_exponent",
    "negative_roots",
    "phi_inverse",
    "smoothness_report",
    "solve_thresholds",
    "value_V",
    "value_v",
]
