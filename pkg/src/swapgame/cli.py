"""Command-line interface: ``swapgame <command> --config <path> [--seed N] [--out <path>]``."""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import scale
from .config import ConfigError, RunConfig, load_config
from .equilibrium import ConvergenceError
from .kernel import INF, AssumptionViolation, GameKernel
from .levy import calibrate_drift
from .mc import estimate_default_laplace, estimate_exit_triple, estimate_game_value
from .valuation import BracketError, SwapGame, equilibrium_premium

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_MC = 0, 2, 3, 4


def fmt(v, precision: int = 10) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{precision}g}"


def write_csv(rows, header, out: str | None, precision: int) -> None:
    """Write rows to ``out`` atomically (temp file + rename), or to stdout."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v, precision) for v in row])
    if out is None:
        sys.stdout.write(buf.getvalue())
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(prefix=".swapgame-", suffix=".csv", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_calibrate(cfg: RunConfig, args) -> int:
    print(f"mu = {calibrate_drift(cfg.r, cfg.nu, cfg.lam, cfg.eta):.4f}")
    return EXIT_OK


def cmd_thresholds(cfg: RunConfig, args) -> int:
    game = SwapGame(cfg.model(), cfg.terms(), eps=cfg.eps)
    sol = game.solution
    p = cfg.precision
    if sol is None:
        print("vanilla contract: no exercise, V = C")
        return EXIT_OK
    print(f"A_star = {fmt(sol.a_star, p)}")
    print(f"B_star = {fmt(sol.b_star, p)}")
    print(f"case = {sol.case_id}")
    print(f"nash = {fmt(sol.nash)}")
    print(f"seller_threshold = {fmt(sol.seller_threshold, p)}")
    print(f"buyer_threshold = {fmt(sol.buyer_threshold, p)}")
    print(f"residual_Psi_hat = {fmt(sol.fit_residuals[0], p)}")
    print(f"residual_dPsi_hat_dB = {fmt(sol.fit_residuals[1], p)}")
    if sol.note:
        print(f"note = {sol.note}")
    return EXIT_OK


def cmd_curve(cfg: RunConfig, args) -> int:
    game = SwapGame(cfg.model(), cfg.terms(), eps=cfg.eps)
    grid = np.linspace(cfg.x_min, cfg.x_max, cfg.x_points)
    cur = game.curve(grid)
    rows = zip(cur.grid, cur.values, cur.regions)
    write_csv(rows, ["x", "V", "region"], args.out, cfg.precision)
    return EXIT_OK


def cmd_premium(cfg: RunConfig, args) -> int:
    q = _require_q(cfg)
    p_star = equilibrium_premium(cfg.x, cfg.model(), q, cfg.alpha, cfg.gamma_b, cfg.gamma_s, tol=cfg.eps)
    if args.out:
        write_csv([(cfg.x, q, p_star)], ["x", "q", "p_star"], args.out, cfg.precision)
    print(f"p_star = {fmt(p_star, cfg.precision)}")
    return EXIT_OK


def cmd_sweep_p(cfg: RunConfig, args) -> int:
    model = cfg.model()
    rows = []
    for p in np.linspace(cfg.p_min, cfg.p_max, cfg.p_points):
        game = SwapGame(model, cfg.terms(p=float(p)), eps=cfg.eps)
        A, B = game.thresholds
        case = game.solution.case_id if game.solution else 0
        rows.append((p, A, B, case, float(game.V(cfg.x))))
    write_csv(rows, ["p", "A_star", "B_star", "case", "V"], args.out, cfg.precision)
    return EXIT_OK


def cmd_sweep_gamma(cfg: RunConfig, args) -> int:
    q = _require_q(cfg)
    model = cfg.model()
    rows = []
    for gam in np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_points):
        fees = {"gamma_s": float(gam)} if cfg.gamma_side == "seller" else {"gamma_b": float(gam)}
        gb, gs = fees.get("gamma_b", cfg.gamma_b), fees.get("gamma_s", cfg.gamma_s)
        rows.append((gam, equilibrium_premium(cfg.x, model, q, cfg.alpha, gb, gs, tol=cfg.eps)))
    write_csv(rows, ["gamma", "p_star"], args.out, cfg.precision)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    model = cfg.model()
    mc = cfg.mc(seed=args.seed)
    coeffs = scale.build_coefficients(model)
    rows = []

    def check(name, analytic, est):
        rows.append((name, analytic, est.mean, est.stderr, est.within(analytic)))

    check("zeta", float(scale.zeta(coeffs, cfg.x)), estimate_default_laplace(model, cfg.x, mc))
    lo, hi = cfg.exit_lower, cfg.exit_upper
    game = SwapGame(model, cfg.terms(), eps=cfg.eps)
    kern = GameKernel(coeffs, game.canonical)
    if lo < cfg.x < hi:
        up, down, jd = kern.exit_identities(cfg.x, lo, hi)
        est = estimate_exit_triple(model, cfg.x, lo, hi, mc)
        check("exit_up", up, est.up)
        check("exit_down", down, est.down)
        check("exit_jump_default", jd, est.jump_default)
    if game.solution is not None:
        A, B = game.thresholds
        check("game_value", float(kern.v_threshold(cfg.x, A, B)),
              estimate_game_value(model, cfg.x, A, B, game.canonical, mc))
    write_csv(rows, ["check", "analytic", "mc_mean", "mc_stderr", "pass"], args.out, cfg.precision)
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_MC


def _require_q(cfg: RunConfig) -> float:
    if cfg.q is None:
        raise ConfigError("premium search needs the ratio q (p_hat = q p, alpha_hat = q alpha)")
    return cfg.q


COMMANDS = {
    "calibrate": cmd_calibrate,
    "thresholds": cmd_thresholds,
    "curve": cmd_curve,
    "premium": cmd_premium,
    "sweep-p": cmd_sweep_p,
    "sweep-gamma": cmd_sweep_gamma,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swapgame", description="Step-up/step-down default swap games.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="INI file with [model] [contract] [numerics] [mc] [output]")
    ap.add_argument("--seed", type=int, default=None, help="override [mc] seed")
    ap.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg = cfg.__class__(**{**cfg.__dict__, "seed": args.seed})
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, AssumptionViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BracketError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
