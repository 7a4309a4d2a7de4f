"""Run configuration: a flat JSON object with dotted keys.

    {"gamma": 2.5, "beta": 1.0, "lambda": 1.0,
     "grid.half_width": 20.0, "grid.points": 2000,
     "solver.k_levels": 6, "solver.tol": 1e-14, "solver.scheme": "factorized",
     "zeromode.spacing": 0.01,
     "outputs.format": "csv", "outputs.directory": "."}

Every key is optional; missing keys take the defaults above.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .fields import ModelParams
from .numerics.grid import Grid


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        self.reason = message
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class GridConfig:
    half_width: float = 20.0
    points: int = 2000


@dataclass(frozen=True)
class SolverConfig:
    k_levels: int = 6
    tol: float = 1e-14
    scheme: str = "factorized"


@dataclass(frozen=True)
class ZeroModeConfig:
    spacing: float = 0.01


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    directory: str = "."


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 2.5
    beta: float = 1.0
    lam: float = 1.0
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    zeromode: ZeroModeConfig = field(default_factory=ZeroModeConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        validate(self)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.gamma, self.beta, self.lam)

    def make_grid(self) -> Grid:
        return Grid.box(self.grid.half_width, self.grid.points)

    def to_flat(self) -> dict:
        out = {"gamma": self.gamma, "beta": self.beta, "lambda": self.lam}
        for section in ("grid", "solver", "zeromode", "outputs"):
            for k, v in asdict(getattr(self, section)).items():
                out[f"{section}.{k}"] = v
        return out

    def with_updates(self, flat: dict) -> "RunConfig":
        return from_flat({**self.to_flat(), **flat})


def _keys() -> dict[str, tuple[str | None, str, type]]:
    table = {"gamma": (None, "gamma", float), "beta": (None, "beta", float), "lambda": (None, "lam", float)}
    for section, cls in (("grid", GridConfig), ("solver", SolverConfig), ("zeromode", ZeroModeConfig), ("outputs", OutputConfig)):
        for f in fields(cls):
            table[f"{section}.{f.name}"] = (section, f.name, type(getattr(cls(), f.name)))
    return table


KEYS = _keys()


def _fail(key, message):
    raise ConfigError(message, key)


def validate(cfg: RunConfig):
    for key, value in (("gamma", cfg.gamma), ("beta", cfg.beta), ("lambda", cfg.lam),
                       ("grid.half_width", cfg.grid.half_width), ("solver.tol", cfg.solver.tol),
                       ("zeromode.spacing", cfg.zeromode.spacing)):
        if not math.isfinite(value):
            _fail(key, "must be finite")
    if cfg.gamma <= 0:
        _fail("gamma", f"must be > 0, got {cfg.gamma}")
    if cfg.grid.half_width <= 0:
        _fail("grid.half_width", f"must be > 0, got {cfg.grid.half_width}")
    if cfg.grid.points < 16:
        _fail("grid.points", f"must be >= 16, got {cfg.grid.points}")
    if cfg.solver.tol <= 0:
        _fail("solver.tol", f"must be > 0, got {cfg.solver.tol}")
    if cfg.solver.k_levels < 1:
        _fail("solver.k_levels", "must be >= 1")
    if cfg.solver.scheme not in ("factorized", "direct"):
        _fail("solver.scheme", f"must be 'factorized' or 'direct', got {cfg.solver.scheme!r}")
    if not 0 < cfg.zeromode.spacing < cfg.grid.half_width:
        _fail("zeromode.spacing", "must lie in (0, grid.half_width)")
    if cfg.outputs.format not in ("csv", "json"):
        _fail("outputs.format", f"must be 'csv' or 'json', got {cfg.outputs.format!r}")


def _coerce(key, value, kind):
    if kind is int:
        if isinstance(value, bool) or not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            _fail(key, f"expected an integer, got {value!r}")
        return int(value)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            _fail(key, f"expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        _fail(key, f"expected a string, got {value!r}")
    return value


def from_flat(flat: dict) -> RunConfig:
    top: dict = {}
    sections: dict[str, dict] = {"grid": {}, "solver": {}, "zeromode": {}, "outputs": {}}
    for key, value in flat.items():
        if key not in KEYS:
            _fail(key, f"unknown key; known keys are {', '.join(KEYS)}")
        section, name, kind = KEYS[key]
        value = _coerce(key, value, kind)
        (top if section is None else sections[section])[name] = value
    return RunConfig(
        **top,
        grid=replace(GridConfig(), **sections["grid"]),
        solver=replace(SolverConfig(), **sections["solver"]),
        zeromode=replace(ZeroModeConfig(), **sections["zeromode"]),
        outputs=replace(OutputConfig(), **sections["outputs"]),
    )


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", line=1)
    try:
        return from_flat(data)
    except ConfigError as exc:
        raise ConfigError(exc.reason, exc.key, _line_of(text, exc.key or "")) from None
