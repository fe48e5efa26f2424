"""JSON run configuration for the command-line harness."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from .minimizer import MinimizerConfig
from .model import MIN_POINTS, ProblemParams, RadialGrid, default_grid, make_grid, validate_params

SWEEP_VARIABLES = ("b", "omega", "q")
SPACINGS = ("linear", "log")


class ConfigError(ValueError):
    """Unreadable, malformed or out-of-range configuration."""


@dataclass(frozen=True)
class GridSettings:
    r_max: Optional[float] = None
    num_points: Optional[int] = None

    def build(self, n: int) -> RadialGrid:
        base = default_grid(n)
        r_max = base.r_max if self.r_max is None else self.r_max
        num = base.num_points if self.num_points is None else self.num_points
        return make_grid(n, r_max, num)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def values(self) -> List[float]:
        if self.count == 1:
            return [float(self.start)]
        if self.spacing == "log":
            return [float(x) for x in np.geomspace(self.start, self.stop, self.count)]
        return [float(x) for x in np.linspace(self.start, self.stop, self.count)]


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."
    prefix: str = "run"
    write_profile: bool = True
    write_report: bool = True


@dataclass(frozen=True)
class RunConfig:
    params: ProblemParams
    grid: GridSettings = field(default_factory=GridSettings)
    minimizer: MinimizerConfig = field(default_factory=MinimizerConfig)
    sweep: Optional[SweepSpec] = None
    output: OutputSettings = field(default_factory=OutputSettings)

    def lattice(self) -> List[ProblemParams]:
        if self.sweep is None:
            return [self.params]
        return [self.params.replace(**{self.sweep.variable: x}) for x in self.sweep.values()]


def _section(raw: dict, name: str, cls, required=()):
    data = raw.get(name, {})
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"'{name}' must be an object")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    missing = [k for k in required if k not in data]
    if missing:
        raise ConfigError(f"missing keys in '{name}': {missing}")
    return data


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where} must be a finite number")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer")
    return value


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(raw) - {"params", "grid", "minimizer", "sweep", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "params" not in raw:
        raise ConfigError("missing 'params'")
    pd = _section(raw, "params", ProblemParams, ("n", "q", "b", "omega"))
    params = ProblemParams(_integer(pd["n"], "params.n"), _number(pd["q"], "params.q"),
                           _number(pd["b"], "params.b"), _number(pd["omega"], "params.omega"))

    gd = _section(raw, "grid", GridSettings)
    grid = GridSettings(None if gd.get("r_max") is None else _number(gd["r_max"], "grid.r_max"),
                        None if gd.get("num_points") is None else _integer(gd["num_points"], "grid.num_points"))
    if grid.r_max is not None and grid.r_max <= 0:
        raise ConfigError("grid.r_max must be positive")
    if grid.num_points is not None and grid.num_points < MIN_POINTS:
        raise ConfigError(f"grid.num_points must be at least {MIN_POINTS}")

    md = _section(raw, "minimizer", MinimizerConfig)
    try:
        minimizer = MinimizerConfig(**md)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"minimizer: {exc}") from exc

    sweep = None
    if raw.get("sweep") is not None:
        sd = _section(raw, "sweep", SweepSpec, ("variable", "start", "stop", "count"))
        if sd["variable"] not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}")
        spacing = sd.get("spacing", "linear")
        if spacing not in SPACINGS:
            raise ConfigError(f"sweep.spacing must be one of {SPACINGS}")
        count = _integer(sd["count"], "sweep.count")
        if count < 1:
            raise ConfigError("sweep.count must be at least 1")
        sweep = SweepSpec(sd["variable"], _number(sd["start"], "sweep.start"),
                          _number(sd["stop"], "sweep.stop"), count, spacing)
        if spacing == "log" and not (sweep.start > 0 and sweep.stop > 0):
            raise ConfigError("log spacing needs positive bounds")

    od = _section(raw, "output", OutputSettings)
    output = OutputSettings(**od)

    cfg = RunConfig(params, grid, minimizer, sweep, output)
    for p in cfg.lattice():
        check = validate_params(p)
        if not check:
            raise ConfigError(f"invalid parameters {p.as_dict()}: " + "; ".join(check.reasons))
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw)
