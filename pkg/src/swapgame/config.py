"""INI run configuration for the command-line front end."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace

from .kernel import ContractTerms
from .levy import ModelParams, calibrate_drift
from .mc import McConfig

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    pass


# field -> (section, key)
_LAYOUT = {
    "r": ("model", "r"),
    "nu": ("model", "nu"),
    "lam": ("model", "lambda"),
    "eta": ("model", "eta"),
    "mu": ("model", "mu"),
    "p": ("contract", "p"),
    "alpha": ("contract", "alpha"),
    "q": ("contract", "q"),
    "p_hat": ("contract", "p_hat"),
    "alpha_hat": ("contract", "alpha_hat"),
    "gamma_b": ("contract", "gamma_b"),
    "gamma_s": ("contract", "gamma_s"),
    "x": ("contract", "x"),
    "eps": ("numerics", "eps"),
    "x_min": ("numerics", "x_min"),
    "x_max": ("numerics", "x_max"),
    "x_points": ("numerics", "x_points"),
    "p_min": ("numerics", "p_min"),
    "p_max": ("numerics", "p_max"),
    "p_points": ("numerics", "p_points"),
    "gamma_min": ("numerics", "gamma_min"),
    "gamma_max": ("numerics", "gamma_max"),
    "gamma_points": ("numerics", "gamma_points"),
    "gamma_side": ("numerics", "gamma_side"),
    "n_paths": ("mc", "n_paths"),
    "grid_dt": ("mc", "grid_dt"),
    "horizon": ("mc", "horizon"),
    "seed": ("mc", "seed"),
    "antithetic": ("mc", "antithetic"),
    "exit_lower": ("mc", "exit_lower"),
    "exit_upper": ("mc", "exit_upper"),
    "precision": ("output", "precision"),
}

_OPTIONAL = {"mu", "q", "p_hat", "alpha_hat", "horizon"}


@dataclass(frozen=True)
class RunConfig:
    r: float = 0.03
    nu: float = 0.2
    lam: float = 1.0
    eta: float = 2.0
    mu: float | None = None  # None: calibrate so that phi(1) = r
    p: float = 0.05
    alpha: float = 1.0
    q: float | None = 0.5
    p_hat: float | None = None
    alpha_hat: float | None = None
    gamma_b: float = 0.10
    gamma_s: float = 0.10
    x: float = 1.5
    eps: float = 1e-8
    x_min: float = 0.01
    x_max: float = 6.0
    x_points: int = 200
    p_min: float = 0.01
    p_max: float = 0.2
    p_points: int = 50
    gamma_min: float = 0.0
    gamma_max: float = 0.3
    gamma_points: int = 20
    gamma_side: str = "seller"
    n_paths: int = 100_000
    grid_dt: float = 1.0 / 250.0
    horizon: float | None = None
    seed: int = 20240517
    antithetic: bool = False
    exit_lower: float = 0.5
    exit_upper: float = 2.5
    precision: int = 10

    def __post_init__(self):
        if (self.q is None) == (self.p_hat is None or self.alpha_hat is None):
            if self.q is None:
                raise ConfigError("contract needs either q or both p_hat and alpha_hat")
            if self.p_hat is not None or self.alpha_hat is not None:
                raise ConfigError("give either q or p_hat/alpha_hat, not both")
        if self.gamma_side not in ("seller", "buyer"):
            raise ConfigError("gamma_side must be 'seller' or 'buyer'")
        for name in ("x_points", "p_points", "gamma_points", "n_paths", "precision"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        try:
            self.model()
            self.terms()
            self.mc()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def drift(self) -> float:
        return calibrate_drift(self.r, self.nu, self.lam, self.eta) if self.mu is None else self.mu

    def model(self) -> ModelParams:
        return ModelParams(r=self.r, mu=self.drift, nu=self.nu, lam=self.lam, eta=self.eta)

    def terms(self, p: float | None = None, **fees) -> ContractTerms:
        p = self.p if p is None else p
        gb = fees.get("gamma_b", self.gamma_b)
        gs = fees.get("gamma_s", self.gamma_s)
        if self.q is not None:
            return ContractTerms.from_ratio(p, self.alpha, self.q, gb, gs)
        return ContractTerms(p, self.alpha, self.p_hat, self.alpha_hat, gb, gs)

    def mc(self, seed: int | None = None) -> McConfig:
        return McConfig(
            n_paths=self.n_paths,
            horizon=self.horizon,
            grid_dt=self.grid_dt,
            master_seed=self.seed if seed is None else seed,
            antithetic=self.antithetic,
        )

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        for f in fields(self):
            sec, key = _LAYOUT[f.name]
            if not cp.has_section(sec):
                cp.add_section(sec)
            v = getattr(self, f.name)
            if v is None:
                v = "calibrate" if f.name == "mu" else "none"
            elif isinstance(v, float):
                v = repr(v)
            cp.set(sec, key, str(v))
        lines = []
        for sec in cp.sections():
            lines.append(f"[{sec}]")
            lines += [f"{k} = {v}" for k, v in cp.items(sec)]
            lines.append("")
        return "\n".join(lines)


def _coerce(name: str, raw: str, default):
    text = raw.strip()
    if name in _OPTIONAL and text.lower() in ("", "none", "calibrate"):
        if name == "mu" or text.lower() != "calibrate":
            return None
    if name == "gamma_side":
        return text.lower()
    if name == "antithetic":
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"antithetic: not a boolean: {raw!r}")
    try:
        if isinstance(default, int) and not isinstance(default, bool):
            return int(text)
        val = float(text)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{name}: must be finite")
    return val


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    known = {(sec, key) for sec, key in _LAYOUT.values()}
    for sec in cp.sections():
        for key in cp[sec]:
            if (sec, key) not in known:
                raise ConfigError(f"unknown key [{sec}] {key}")
    defaults = RunConfig()
    kw = {}
    explicit_split = cp.has_option("contract", "p_hat") or cp.has_option("contract", "alpha_hat")
    for f in fields(RunConfig):
        sec, key = _LAYOUT[f.name]
        if cp.has_option(sec, key):
            kw[f.name] = _coerce(f.name, cp.get(sec, key), getattr(defaults, f.name))
    if explicit_split and "q" not in kw:
        kw["q"] = None
    return replace(defaults, **kw) if kw else defaults


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
