"""Study configuration: flat key/value files (YAML syntax) plus CLI overrides."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import yaml

from ..fem1d import SpaceTag
from ..snapshots import GRID_TOL


class ConfigError(ValueError):
    pass


def parse_number(value) -> float:
    """Accept floats and fractions such as ``1/16``."""
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(Fraction(str(value).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {value!r}") from exc


def parse_list(value, conv=parse_number) -> list:
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    elif not isinstance(value, (list, tuple)):
        value = [value]
    return [conv(v) for v in value]


@dataclass
class StudyConfig:
    example: str = "cex1"
    k: Optional[int] = None
    alpha: float = 1.0
    delta: float = 0.01
    nu: float = 1.0
    T: Optional[float] = None
    dt_list: Optional[list] = None
    r_list: Optional[list] = None
    h: float = 1.0 / 4096
    space: SpaceTag = SpaceTag.L2
    dq: Optional[bool] = None  # None runs both cases
    ic_kind: Optional[str] = None  # None: L2 for noDQ, Ritz for DQ
    seed: int = 0
    output: Optional[str] = None
    format: str = "csv"
    # cex2 ROM runs use a shorter error horizon than the basis horizon
    rom_T: Optional[float] = None
    rom_dt: Optional[float] = None
    proj_r: Optional[int] = None
    per_step_dt: Optional[float] = None
    midpoint_forcing: bool = False
    table: Optional[str] = None

    @property
    def n_elems(self) -> int:
        n = round(1.0 / self.h)
        if n < 2 or abs(n * self.h - 1.0) > 1e-9:
            raise ConfigError(f"1/h must be an integer >= 2, got h={self.h}")
        return n

    def snapshot(self) -> dict:
        d = dataclasses.asdict(self)
        d["space"] = self.space.value
        return d


FIELDS = {f.name for f in dataclasses.fields(StudyConfig)}


def _coerce(key: str, value):
    if value is None:
        return None
    if key in ("k", "seed", "proj_r"):
        return int(value)
    if key in ("alpha", "delta", "nu", "T", "h", "rom_T", "rom_dt", "per_step_dt"):
        return parse_number(value)
    if key == "dt_list":
        return parse_list(value)
    if key == "r_list":
        return parse_list(value, int)
    if key == "space":
        return SpaceTag.parse(value)
    if key in ("dq", "midpoint_forcing"):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    return str(value)


def make_config(values: dict) -> StudyConfig:
    unknown = set(values) - FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return StudyConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, overrides: Optional[dict] = None, defaults: Optional[dict] = None) -> StudyConfig:
    """Merge ``defaults``, then the file at ``path``, then non-None ``overrides``."""
    values = dict(defaults or {})
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict) or any(isinstance(v, dict) for v in data.values()):
            raise ConfigError(f"{path}: expected a flat key/value mapping")
        values.update(data)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return make_config(values)


def _is_int(x: float) -> bool:
    return abs(x - round(x)) <= GRID_TOL * max(1.0, abs(x))


def validate(config: StudyConfig) -> None:
    """Reject time grids that break the counterexamples' boundary condition."""
    if config.example not in ("cex1", "cex2", "custom"):
        raise ConfigError(f"unknown example {config.example!r}")
    if config.format not in ("csv", "md"):
        raise ConfigError(f"unknown format {config.format!r}")
    config.n_elems
    if config.nu <= 0:
        raise ConfigError("nu must be positive")
    dts = list(config.dt_list or [])
    for extra in (config.rom_dt, config.per_step_dt):
        if extra is not None:
            dts.append(extra)
    for dt in dts:
        if dt <= 0:
            raise ConfigError(f"time step must be positive, got {dt}")
        if config.k is not None and config.example != "custom" and (not _is_int(config.k * dt) or round(config.k * dt) < 1):
            raise ConfigError(
                f"k*dt = {config.k * dt:.12g} (k={config.k}, dt={dt:.12g}) is not a positive integer: "
                "snapshots would not vanish at x = 1, violating the homogeneous Dirichlet boundary condition"
            )
        if config.T is not None and (not _is_int(config.T / dt) or round(config.T / dt) < 1):
            raise ConfigError(f"T/dt = {config.T / dt:.12g} is not a positive integer (T={config.T}, dt={dt:.12g})")
    if config.r_list is not None and any(r < 1 for r in config.r_list):
        raise ConfigError("ranks must be positive")
