"""INI configuration for the experiment suites.

Every key has a default; unknown sections or keys are rejected.  List
values are comma separated.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

OUT_ENV = "GEVLC_OUT"


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class GridSection:
    dim: int = 3
    n: int = 32
    box_length: float = 2 * math.pi


@dataclass(frozen=True)
class InitialDataSection:
    seed: int = 42
    m0: float = 0.05
    large_m0: float = 200.0
    d_bar: tuple[float, ...] = (0.0, 0.0, 1.0)
    velocity_share: float = 0.5
    velocity_exponent: float = 2.0
    director_exponent: float = 3.0


@dataclass(frozen=True)
class SolverSection:
    scheme: str = "etd_midpoint"
    dt: float = 0.005
    t_end: float = 0.5
    sample_every: int = 2
    cfl: float = 0.5
    renormalize: bool = False
    nse_amplitude: float = 1.0
    nse_t_end: float = 0.1
    nse_dt: float = 0.0025
    nse_reference_dt: float = 0.001
    nse_tol: float = 1e-6


@dataclass(frozen=True)
class PicardSection:
    horizon: float = 0.25
    steps: int = 50
    max_iters: int = 30
    contraction_tol: float = 1e-10
    epsilon: float = 0.1
    zeta: float = 0.01
    c0: float = 1.0
    c1: float = 1.0
    max_ratio: float = 0.75
    agreement_tol: float = 1e-5
    max_halvings: int = 3
    probe_m0: float = 5.0


@dataclass(frozen=True)
class NormsSection:
    p: float = 2.0
    q: float = 2.0
    theta: float = 1.0
    decay_orders: tuple[int, ...] = (1, 2)
    decay_times: tuple[float, ...] = (0.05, 0.1, 0.2, 0.4)
    decay_bound: float = 20.0
    decay_slope_margin: float = 0.2
    gevrey_bound: float = 10.0
    radius_factor: float = 0.9
    radius_window: tuple[float, ...] = (0.05, 0.5)
    min_radius: float = 0.05
    heat_control_t: float = 0.25
    heat_slope_tol: float = 0.02
    kernel_orders: tuple[int, ...] = (0, 1, 2)
    kernel_times: tuple[float, ...] = (0.25, 1.0, 4.0)
    kernel_n: int = 128
    kernel_refined_n: int = 256
    kernel_box: float = 32.0
    bilinear_sizes: tuple[int, ...] = (16, 32, 64)
    bilinear_times: tuple[float, ...] = (0.0, 0.1, 1.0)
    octant_samples: int = 10000
    toolkit_trials: int = 20
    interpolation_trials: int = 100
    bernstein_window: float = 64.0


@dataclass(frozen=True)
class OutputSection:
    dir: str = ""
    snapshots: bool = False
    csv: bool = True

    def resolved_dir(self) -> Path:
        return Path(self.dir or os.environ.get(OUT_ENV, "gevlc-out"))


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSection = field(default_factory=GridSection)
    initial_data: InitialDataSection = field(default_factory=InitialDataSection)
    solver: SolverSection = field(default_factory=SolverSection)
    picard: PicardSection = field(default_factory=PicardSection)
    norms: NormsSection = field(default_factory=NormsSection)
    output: OutputSection = field(default_factory=OutputSection)

    def validate(self) -> "ExperimentConfig":
        n = self.norms
        if not (1 < n.p < math.inf and 1 < n.q < math.inf):
            raise ConfigError("p and q must lie in (1, inf)")
        gap = 1 / n.q - 1 / n.p
        if not (-min(1 / 3, 1 / (2 * n.p)) <= gap + 1e-15 and gap <= 1 / 3 + 1e-15):
            raise ConfigError(f"(p, q) = ({n.p}, {n.q}) violates -min(1/3, 1/(2p)) <= 1/q - 1/p <= 1/3")
        if not 0 < n.theta <= 1:
            raise ConfigError("theta must lie in (0, 1]")
        if self.grid.dim != 3:
            raise ConfigError("solver experiments run in dim = 3")
        if len(self.initial_data.d_bar) != 3:
            raise ConfigError("d_bar needs three entries")
        if len(n.radius_window) != 2:
            raise ConfigError("radius_window needs two entries")
        if self.solver.scheme not in ("etd1", "etd_midpoint"):
            raise ConfigError(f"unknown scheme {self.solver.scheme!r}")
        return self

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(self, initial_data=dataclasses.replace(self.initial_data, seed=seed))

    def with_output(self, out: str) -> "ExperimentConfig":
        return dataclasses.replace(self, output=dataclasses.replace(self.output, dir=out))

    def as_dict(self, include_output: bool = True) -> dict[str, dict[str, Any]]:
        return {
            f.name: dataclasses.asdict(getattr(self, f.name))
            for f in dataclasses.fields(self)
            if include_output or f.name != "output"
        }


_SECTION_TYPES = {
    "grid": GridSection,
    "initial_data": InitialDataSection,
    "solver": SolverSection,
    "picard": PicardSection,
    "norms": NormsSection,
    "output": OutputSection,
}


def _parse_value(default: Any, text: str) -> Any:
    if isinstance(default, bool):
        return _bool(text)
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, tuple):
        return _ints(text) if default and isinstance(default[0], int) else _floats(text)
    return text.strip()


def _format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(repr(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    sections = {}
    for name in cp.sections():
        if name not in _SECTION_TYPES:
            raise ConfigError(f"unknown section [{name}]")
        cls = _SECTION_TYPES[name]
        defaults = cls()
        known = {f.name for f in dataclasses.fields(cls)}
        values = {}
        for key, raw in cp.items(name):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            try:
                values[key] = _parse_value(getattr(defaults, key), raw)
            except ValueError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}") from exc
        sections[name] = cls(**values)
    return ExperimentConfig(**sections).validate()


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig().validate()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text)


def render_config(cfg: ExperimentConfig | None = None) -> str:
    cfg = cfg or ExperimentConfig()
    lines = []
    for name, values in cfg.as_dict().items():
        lines.append(f"[{name}]")
        for key, v in values.items():
            lines.append(f"{key} = {_format_value(v if not isinstance(v, list) else tuple(v))}")
        lines.append("")
    return "\n".join(lines)
