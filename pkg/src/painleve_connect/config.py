"""JSON run configuration for the command-line drivers.

One JSON object per run.  Keys not listed on the relevant dataclass are
rejected.  ``verify`` takes an object with optional ``hm``, ``connect``,
``gl`` and ``rescale`` sections plus ``artifacts``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .grids import Grid1D, Grid2D, SolverConfig


class ConfigError(ValueError):
    pass


def _from_dict(cls, data: dict | None):
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(f"{cls.__name__}: expected a JSON object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{cls.__name__}: unknown key(s) {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{cls.__name__}: {exc}") from exc


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-10
    max_newton_iters: int = 30
    damping_min: float = 1.0 / 64.0
    linsolve_tol: float = 1e-10

    def solver_config(self, clamp_bound: float = 10.0) -> SolverConfig:
        return SolverConfig(self.abs_tol, self.max_newton_iters, self.damping_min,
                            self.linsolve_tol, clamp_bound)


@dataclass(frozen=True)
class HMConfig(Tolerances):
    a: float = -12.0
    b: float = 8.0
    n: int = 2001

    def __post_init__(self):
        self.solver_config()
        self.grid()

    def grid(self) -> Grid1D:
        return Grid1D(self.a, self.b, self.n)


@dataclass(frozen=True)
class ConnectConfig(Tolerances):
    x1min: float = -12.0
    x1max: float = 6.0
    x2min: float = 0.0
    x2max: float = 16.0
    n1: int = 361
    n2: int = 321
    descent_tol: float = 1e-2
    max_descent_iters: int = 400

    def __post_init__(self):
        self.solver_config()
        self.grid()
        if self.x2min != 0.0:
            raise ValueError("x2min must be 0 (odd reflection axis)")
        if not self.descent_tol > 0:
            raise ValueError("descent_tol must be positive")

    def grid(self) -> Grid2D:
        return Grid2D(self.x1min, self.x1max, self.x2min, self.x2max, self.n1, self.n2)


@dataclass(frozen=True)
class GLConfig(Tolerances):
    epsilons: tuple = (0.1, 0.05, 0.025)
    chi: float = 0.5
    L: float = 2.5
    nodes_per_unit: int = 8

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        self.solver_config()
        if not self.epsilons:
            raise ValueError("epsilons must be non-empty")
        if any(e <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        if not 0 < self.chi < 1:
            raise ValueError("chi must lie in (0, 1)")
        if not self.L > math.sqrt(math.log(1.0 / self.chi)) + 1.0:
            raise ValueError("L must exceed rho + 1")
        if self.nodes_per_unit < 2:
            raise ValueError("nodes_per_unit must be >= 2")


@dataclass(frozen=True)
class RescaleConfig:
    x1_level: float = -11.0
    x2_offset: float = 0.0
    t2_window: float = 4.0
    samples: int = 161
    y_csv: str | None = None
    connect: ConnectConfig = field(default_factory=ConnectConfig)

    def __post_init__(self):
        if isinstance(self.connect, dict):
            object.__setattr__(self, "connect", _from_dict(ConnectConfig, self.connect))
        if not self.x1_level < 0:
            raise ValueError("x1_level must be negative")
        if not self.t2_window > 0:
            raise ValueError("t2_window must be positive")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")


@dataclass(frozen=True)
class VerifyConfig:
    hm: HMConfig = field(default_factory=HMConfig)
    connect: ConnectConfig = field(default_factory=ConnectConfig)
    gl: GLConfig = field(default_factory=GLConfig)
    rescale: RescaleConfig = field(default_factory=RescaleConfig)
    artifacts: str | None = None
    seed: int = 0

    def __post_init__(self):
        for name, cls in (("hm", HMConfig), ("connect", ConnectConfig),
                          ("gl", GLConfig), ("rescale", RescaleConfig)):
            value = getattr(self, name)
            if isinstance(value, dict):
                object.__setattr__(self, name, _from_dict(cls, value))


COMMANDS = {
    "hm": HMConfig,
    "connect": ConnectConfig,
    "gl": GLConfig,
    "rescale": RescaleConfig,
    "verify": VerifyConfig,
}


def load_config(command: str, path: str | Path | None):
    cls = COMMANDS[command]
    if path is None:
        return cls()
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return _from_dict(cls, data)
