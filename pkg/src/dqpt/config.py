"""Run configuration: a single YAML file drives every CLI subcommand.

Structural problems (missing keys, wrong types, unreadable files) raise
ConfigError; values violating a physical or numerical constraint raise
ParameterError.  The CLI maps these onto exit codes 2 and 3 respectively.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .model import BlochDispersion, QuenchSchedule, dispersion_from_mapping
from .thermal import Temperature


class ConfigError(Exception):
    """The configuration file cannot be parsed or is structurally invalid."""


class ParameterError(Exception):
    """A configuration value violates a physics or numerics constraint."""


@dataclass(frozen=True)
class TauStarRef:
    """Symbolic inter-quench duration ``tau_star:n=<int>,kc=<branch index>``."""

    n: int
    kc: int


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n_steps: int

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)


@dataclass
class RunConfig:
    """Parsed configuration; optional sections stay None until required."""

    raw: Mapping
    path: str
    h0: BlochDispersion | None = None
    h1: BlochDispersion | None = None
    h2: BlochDispersion | None = None
    temperature: Temperature | None = None
    tau: float | TauStarRef | None = None
    n_modes: int | None = None
    time_grid: TimeGrid | None = None
    output_dir: Path = field(default_factory=lambda: Path("out"))
    n_max: int = 3
    n_scan: int = 512
    kink_threshold: float | None = None

    def schedule(self, tau: float) -> QuenchSchedule:
        try:
            return QuenchSchedule(self.h0, self.h1, self.h2, tau)
        except ValueError as exc:
            raise ParameterError(str(exc)) from exc


_TAU_STAR_RE = re.compile(r"^tau_star:n=(\d+),kc=(\d+)$")


def load_run_config(path: str | Path) -> RunConfig:
    """Read and validate the parts of the config shared by all subcommands."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise ConfigError(f"config file {path} must contain a mapping at top level")

    cfg = RunConfig(raw=raw, path=str(path))
    if "output_dir" in raw:
        if not isinstance(raw["output_dir"], str):
            raise ConfigError("output_dir must be a string path")
        cfg.output_dir = Path(raw["output_dir"])

    default_kind = raw.get("model")
    if default_kind is not None and default_kind not in ("ssh", "kitaev", "tabulated"):
        raise ConfigError(f"unknown model kind {default_kind!r}")
    hams = raw.get("hamiltonians")
    if hams is not None:
        if not isinstance(hams, Mapping):
            raise ConfigError("'hamiltonians' must be a mapping with keys h0, h1, h2")
        for name in ("h0", "h1", "h2"):
            if name not in hams:
                raise ConfigError(f"'hamiltonians' is missing {name!r}")
            try:
                setattr(cfg, name, dispersion_from_mapping(hams[name], default_kind))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"{name}: {exc}") from exc
            except ValueError as exc:
                raise ParameterError(f"{name}: {exc}") from exc

    if "temperature" in raw:
        cfg.temperature = parse_temperature(raw["temperature"])
    if "tau" in raw:
        cfg.tau = parse_tau(raw["tau"])
    if "n_modes" in raw:
        cfg.n_modes = _positive_int(raw, "n_modes", minimum=2)
    if "time_grid" in raw:
        cfg.time_grid = parse_time_grid(raw["time_grid"])
    if "n_max" in raw:
        cfg.n_max = _positive_int(raw, "n_max", minimum=0)
    if "n_scan" in raw:
        cfg.n_scan = _positive_int(raw, "n_scan", minimum=64)
    if "kink_threshold" in raw:
        cfg.kink_threshold = _positive_real(raw, "kink_threshold")
    return cfg


def parse_temperature(value: Any) -> Temperature:
    """Accept {'T': x} (T = 0 means beta = inf) or {'beta': x | 'inf'}."""
    if not isinstance(value, Mapping):
        raise ConfigError("temperature must be a mapping with key 'T' or 'beta'")
    keys = set(value)
    if keys == {"T"}:
        t = _real(value["T"], "T")
        try:
            return Temperature.from_temperature(t)
        except ValueError as exc:
            raise ParameterError(str(exc)) from exc
    if keys == {"beta"}:
        beta = value["beta"]
        if isinstance(beta, str):
            if beta.strip().lower() in ("inf", "+inf", "infinity"):
                beta = math.inf
            else:
                raise ConfigError(f"beta string must be 'inf', got {beta!r}")
        beta = _real(beta, "beta")
        try:
            return Temperature.from_beta(beta)
        except ValueError as exc:
            raise ParameterError(str(exc)) from exc
    raise ConfigError("temperature needs exactly one of the keys 'T' or 'beta'")


def parse_tau(value: Any) -> float | TauStarRef:
    if isinstance(value, str):
        m = _TAU_STAR_RE.match(value.strip())
        if not m:
            raise ConfigError(
                f"tau string must look like 'tau_star:n=<int>,kc=<int>', got {value!r}")
        return TauStarRef(n=int(m.group(1)), kc=int(m.group(2)))
    tau = _real(value, "tau")
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    return tau


def parse_time_grid(value: Any) -> TimeGrid:
    if not isinstance(value, Mapping):
        raise ConfigError("time_grid must be a mapping with keys t_max, n_steps")
    if "t_max" not in value or "n_steps" not in value:
        raise ConfigError("time_grid needs both t_max and n_steps")
    t_max = _real(value["t_max"], "t_max")
    if not t_max > 0:
        raise ParameterError(f"t_max must be positive, got {t_max}")
    n_steps = value["n_steps"]
    if isinstance(n_steps, bool) or not isinstance(n_steps, int):
        raise ConfigError(f"n_steps must be an integer, got {n_steps!r}")
    if n_steps < 2:
        raise ParameterError(f"n_steps must be >= 2, got {n_steps}")
    return TimeGrid(t_max=t_max, n_steps=n_steps)


def require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"config {cfg.path} is missing required entries: "
                          + ", ".join(_entry_name(n) for n in missing))


def section(cfg: RunConfig, name: str) -> Mapping:
    value = cfg.raw.get(name)
    if value is None:
        raise ConfigError(f"config {cfg.path} is missing the {name!r} section")
    if not isinstance(value, Mapping):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return value


def _entry_name(attr: str) -> str:
    if attr in ("h0", "h1", "h2"):
        return f"hamiltonians.{attr}"
    return attr


def _real(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _positive_real(raw: Mapping, key: str) -> float:
    v = _real(raw[key], key)
    if not v > 0:
        raise ParameterError(f"{key} must be positive, got {v}")
    return v


def _positive_int(raw: Mapping, key: str, minimum: int) -> int:
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    if v < minimum:
        raise ParameterError(f"{key} must be >= {minimum}, got {v}")
    return v
