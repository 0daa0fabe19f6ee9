"""Experiment configuration: defaults, flat key=value files, CLI overrides.

Precedence is built-in defaults < config file < command-line flags.
The file format is one `key = value` pair per line; `#` starts a
comment; values are typed as int, float, comma-separated float lists,
or bare strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

DEFAULTS = {
    "gamma1": 2.0,
    "t_f": 1.0,
    "b0": 1.0,
    "steps": 4000,
}

__all__ = ["ExperimentConfig", "load_config", "parse_config_file", "DEFAULTS"]


@dataclass
class ExperimentConfig:
    """Resolved parameters for one CLI run."""

    subcommand: str = ""
    gamma1: float = 2.0
    gamma2: float | None = None
    gammas: list = field(default_factory=list)   # extra spins to trace
    b0: float = 1.0
    t_f: float = 1.0
    kappa: float | None = None
    eta: float | None = None
    mu: float | None = None
    xi: float | None = None
    omega: float | None = None
    epsilon: float | None = None
    steps: int = 4000
    n_quad: int = 64
    kmin: float | None = None
    kmax: float | None = None
    kstep: float = 0.05
    ratio_min: float | None = None
    ratio_max: float | None = None
    ratio_count: int | None = None
    eta_min: float | None = None
    eta_max: float | None = None
    eta_count: int | None = None
    epsilons: list | None = None   # robust/baseline epsilon grid
    kappas: list | None = None     # robust comparison protocols
    etas: list | None = None       # per-protocol eta values paired with kappas
    tfxi: list | None = None       # bell fidelity sweep, t_f in units of 1/xi
    out_dir: str = "."
    fmt: str = "csv"
    workers: int | None = None

    def validate(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"parameter {f.name!r} must be finite, got {v!r}")
        if self.t_f <= 0.0:
            raise ConfigError(f"parameter 't_f' must be positive, got {self.t_f!r}")
        if self.steps < 16:
            raise ConfigError(f"parameter 'steps' must be >= 16, got {self.steps!r}")
        if self.n_quad < 8:
            raise ConfigError(f"parameter 'n_quad' must be >= 8, got {self.n_quad!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"parameter 'fmt' must be 'csv' or 'json', got {self.fmt!r}")
        for name in ("ratio_count", "eta_count"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"parameter {name!r} must give a nonempty grid, got {v!r}")


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if "," in raw:
        try:
            return [float(x) for x in raw.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse list value for key {key!r}: {raw!r}") from exc
    for caster in (int, float):
        try:
            return caster(raw)
        except ValueError:
            continue
    return raw


def parse_config_file(path) -> dict:
    """Flat `key = value` document with `#` comments; typed scalars/arrays."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    out: dict = {}
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key] = _parse_value(key, raw)
    return out


def load_config(path=None, overrides: dict | None = None,
                subcommand: str = "") -> ExperimentConfig:
    """Build a validated config from defaults, an optional file, and overrides.

    `overrides` holds CLI flag values; entries that are None are ignored
    so that file values (and then defaults) win.
    """
    cfg = ExperimentConfig(subcommand=subcommand)
    for key, value in DEFAULTS.items():
        setattr(cfg, key, value)

    known = {f.name for f in fields(ExperimentConfig)}
    if path is not None:
        for key, value in parse_config_file(path).items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(cfg, key, value)
    cfg.validate()
    return cfg
