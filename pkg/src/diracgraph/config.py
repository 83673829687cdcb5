"""
YAML experiment configuration.

A config file holds one mapping per section (graph, solver, initial, boundary,
sampling, sweep, output). Unknown sections and keys are rejected; every
validation error names the dotted field it refers to.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
import yaml

from diracgraph.boundary import BoundaryPolicy, EndMode, KernelKind, VertexMode
from diracgraph.errors import ConfigError, GraphError
from diracgraph.graph import DEFAULT_LENGTH, StarGraph, build_star_graph
from diracgraph.solver import DEFAULT_OVERFLOW_FACTOR, SimParams, StartMode

REQUIRED_KEYS = (
    "graph.dx",
    "graph.bonds",
    "solver.mass",
    "solver.dt",
    "solver.n_steps | solver.t_final",
    "initial.x0",
    "initial.sigma",
)

_STEP_TOL = 1e-9
_SWEEP_PARAM = re.compile(r"^alpha(\d+)$")

E = TypeVar("E", bound=enum.Enum)


@dataclass(frozen=True)
class BondConfig:
    alpha: float
    length: float = DEFAULT_LENGTH
    end_mode: Optional[EndMode] = None


@dataclass(frozen=True)
class GraphConfig:
    dx: float
    bonds: Tuple[BondConfig, ...]


@dataclass(frozen=True)
class SolverConfig:
    mass: float
    dt: float
    n_steps: int
    overflow_factor: float = DEFAULT_OVERFLOW_FACTOR
    start: StartMode = StartMode.TAYLOR


@dataclass(frozen=True)
class InitialConfig:
    x0: float
    sigma: float
    bond: int = 1
    normalize: bool = True
    amplitude: float = 1.0


@dataclass(frozen=True)
class BoundaryConfig:
    vertex_mode: VertexMode = VertexMode.WEIGHTED
    end_mode: EndMode = EndMode.DIRICHLET
    kernel: KernelKind = KernelKind.I0


@dataclass(frozen=True)
class SamplingConfig:
    sample_every: int = 10
    snapshot_times: Tuple[float, ...] = ()


@dataclass(frozen=True)
class SweepConfig:
    start: float
    stop: float
    points: int
    param: str = "alpha1"

    @property
    def bond_id(self) -> int:
        m = _SWEEP_PARAM.match(self.param)
        assert m is not None
        return int(m.group(1))

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class OutputConfig:
    dir: Path = Path("out")
    checkpoint: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphConfig
    solver: SolverConfig
    initial: InitialConfig
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: Optional[SweepConfig] = None

    @property
    def end_modes(self) -> Tuple[EndMode, ...]:
        return tuple(b.end_mode or self.boundary.end_mode for b in self.graph.bonds)

    @property
    def t_final(self) -> float:
        return self.solver.n_steps * self.solver.dt

    def build_graph(self) -> StarGraph:
        return build_star_graph([(b.alpha, b.length, self.graph.dx) for b in self.graph.bonds])

    def sim_params(self) -> SimParams:
        s = self.solver
        return SimParams(s.mass, s.dt, self.graph.dx, s.n_steps, s.overflow_factor)

    def build_policy(self, graph: StarGraph) -> BoundaryPolicy:
        return BoundaryPolicy(
            vertex_mode=self.boundary.vertex_mode,
            end_modes=self.end_modes,
            alphas=graph.alphas,
            kernel_kind=self.boundary.kernel,
        )

    def with_alpha(self, bond_id: int, alpha: float) -> "ExperimentConfig":
        bonds = list(self.graph.bonds)
        bonds[bond_id - 1] = replace(bonds[bond_id - 1], alpha=float(alpha))
        return replace(self, graph=replace(self.graph, bonds=tuple(bonds)))

    def with_output_dir(self, path: Path) -> "ExperimentConfig":
        return replace(self, output=replace(self.output, dir=Path(path)))

    def with_sweep(self, sweep: SweepConfig) -> "ExperimentConfig":
        _check_sweep(sweep, len(self.graph.bonds))
        return replace(self, sweep=sweep)


# =========================
# Field parsers
# =========================

def _section(data: Mapping[str, Any], name: str, allowed: Sequence[str]) -> Dict[str, Any]:
    raw = data.get(name)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {', '.join(map(str, unknown))}")
    return raw


def _required(section: Mapping[str, Any], where: str, key: str) -> Any:
    if key not in section:
        raise ConfigError(f"{where}.{key}: required key is missing")
    return section[key]


def _float(value: Any, where: str, *, positive: bool = False, non_negative: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(f"{where}: must be finite, got {value!r}")
    if positive and not out > 0:
        raise ConfigError(f"{where}: must be positive, got {value!r}")
    if non_negative and out < 0:
        raise ConfigError(f"{where}: must be non-negative, got {value!r}")
    return out


def _int(value: Any, where: str, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{where}: expected true/false, got {value!r}")
    return value


def _enum(kind: Type[E], value: Any, where: str) -> E:
    try:
        return kind(value)
    except ValueError:
        choices = "|".join(str(m.value) for m in kind)
        raise ConfigError(f"{where}: expected one of {choices}, got {value!r}") from None


# =========================
# Sections
# =========================

def _parse_graph(data: Mapping[str, Any]) -> GraphConfig:
    sec = _section(data, "graph", ("dx", "bonds"))
    dx = _float(_required(sec, "graph", "dx"), "graph.dx", positive=True)
    raw_bonds = _required(sec, "graph", "bonds")
    if not isinstance(raw_bonds, list) or len(raw_bonds) < 2:
        raise ConfigError("graph.bonds: expected a list of at least 2 bonds")

    bonds = []
    for i, raw in enumerate(raw_bonds, start=1):
        where = f"graph.bonds[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected a mapping, got {raw!r}")
        unknown = sorted(set(raw) - {"alpha", "length", "end_mode"})
        if unknown:
            raise ConfigError(f"{where}: unknown key(s) {', '.join(map(str, unknown))}")
        if "alpha" not in raw:
            raise ConfigError(f"{where}.alpha: required key is missing")
        bonds.append(
            BondConfig(
                alpha=_float(raw["alpha"], f"{where}.alpha", positive=True),
                length=_float(raw.get("length", DEFAULT_LENGTH), f"{where}.length", positive=True),
                end_mode=_enum(EndMode, raw["end_mode"], f"{where}.end_mode") if "end_mode" in raw else None,
            )
        )
    return GraphConfig(dx, tuple(bonds))


def _parse_solver(data: Mapping[str, Any]) -> SolverConfig:
    sec = _section(data, "solver", ("mass", "dt", "n_steps", "t_final", "overflow_factor", "start"))
    mass = _float(_required(sec, "solver", "mass"), "solver.mass", non_negative=True)
    dt = _float(_required(sec, "solver", "dt"), "solver.dt", positive=True)

    if ("n_steps" in sec) == ("t_final" in sec):
        raise ConfigError("solver: give exactly one of n_steps or t_final")
    if "n_steps" in sec:
        n_steps = _int(sec["n_steps"], "solver.n_steps", minimum=0)
    else:
        t_final = _float(sec["t_final"], "solver.t_final", non_negative=True)
        ratio = t_final / dt
        n_steps = int(round(ratio))
        if abs(ratio - n_steps) > _STEP_TOL * max(1.0, ratio):
            raise ConfigError(f"solver.t_final: {t_final} is not a whole number of steps of dt={dt}")

    return SolverConfig(
        mass=mass,
        dt=dt,
        n_steps=n_steps,
        overflow_factor=_float(
            sec.get("overflow_factor", DEFAULT_OVERFLOW_FACTOR), "solver.overflow_factor", positive=True
        ),
        start=_enum(StartMode, sec.get("start", StartMode.TAYLOR.value), "solver.start"),
    )


def _parse_initial(data: Mapping[str, Any]) -> InitialConfig:
    sec = _section(data, "initial", ("x0", "sigma", "bond", "normalize", "amplitude"))
    return InitialConfig(
        x0=_float(_required(sec, "initial", "x0"), "initial.x0"),
        sigma=_float(_required(sec, "initial", "sigma"), "initial.sigma", positive=True),
        bond=_int(sec.get("bond", 1), "initial.bond", minimum=1),
        normalize=_bool(sec.get("normalize", True), "initial.normalize"),
        amplitude=_float(sec.get("amplitude", 1.0), "initial.amplitude", non_negative=True),
    )


def _parse_boundary(data: Mapping[str, Any]) -> BoundaryConfig:
    sec = _section(data, "boundary", ("vertex_mode", "end_mode", "kernel"))
    return BoundaryConfig(
        vertex_mode=_enum(VertexMode, sec.get("vertex_mode", "weighted"), "boundary.vertex_mode"),
        end_mode=_enum(EndMode, sec.get("end_mode", "dirichlet"), "boundary.end_mode"),
        kernel=_enum(KernelKind, sec.get("kernel", "i0"), "boundary.kernel"),
    )


def _parse_sampling(data: Mapping[str, Any]) -> SamplingConfig:
    sec = _section(data, "sampling", ("sample_every", "snapshot_times"))
    raw_times = sec.get("snapshot_times", [])
    if not isinstance(raw_times, list):
        raise ConfigError(f"sampling.snapshot_times: expected a list, got {raw_times!r}")
    times = tuple(
        _float(t, f"sampling.snapshot_times[{i}]", non_negative=True) for i, t in enumerate(raw_times)
    )
    return SamplingConfig(
        sample_every=_int(sec.get("sample_every", 10), "sampling.sample_every", minimum=1),
        snapshot_times=times,
    )


def _parse_sweep(data: Mapping[str, Any]) -> Optional[SweepConfig]:
    if data.get("sweep") is None:
        return None
    sec = _section(data, "sweep", ("param", "start", "stop", "points"))
    param = sec.get("param", "alpha1")
    if not isinstance(param, str) or not _SWEEP_PARAM.match(param):
        raise ConfigError(f"sweep.param: expected alpha<j>, got {param!r}")
    return SweepConfig(
        start=_float(_required(sec, "sweep", "start"), "sweep.start", positive=True),
        stop=_float(_required(sec, "sweep", "stop"), "sweep.stop", positive=True),
        points=_int(_required(sec, "sweep", "points"), "sweep.points", minimum=2),
        param=param,
    )


def _parse_output(data: Mapping[str, Any]) -> OutputConfig:
    sec = _section(data, "output", ("dir", "checkpoint"))
    out_dir = sec.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError(f"output.dir: expected a path string, got {out_dir!r}")
    return OutputConfig(Path(out_dir), _bool(sec.get("checkpoint", True), "output.checkpoint"))


def _check_sweep(sweep: SweepConfig, n_bonds: int) -> None:
    if not (sweep.start > 0 and sweep.stop > 0):
        raise ConfigError(f"sweep: range must be positive, got [{sweep.start}, {sweep.stop}]")
    if sweep.points < 2:
        raise ConfigError(f"sweep.points: must be >= 2, got {sweep.points}")
    m = _SWEEP_PARAM.match(sweep.param)
    if m is None or not 1 <= int(m.group(1)) <= n_bonds:
        raise ConfigError(f"sweep.param: {sweep.param!r} names no bond of a {n_bonds}-bond graph")


def _cross_check(cfg: ExperimentConfig) -> None:
    n_bonds = len(cfg.graph.bonds)
    lam = cfg.solver.dt / cfg.graph.dx
    if lam > 1.0:
        raise ConfigError(f"solver.dt: CFL violated, dt/dx = {lam:.6g} > 1")

    try:
        graph = cfg.build_graph()
    except GraphError as e:
        raise ConfigError(f"graph: {e}") from None

    if cfg.initial.bond > n_bonds:
        raise ConfigError(f"initial.bond: no bond {cfg.initial.bond} in a {n_bonds}-bond graph")
    if cfg.boundary.vertex_mode is VertexMode.TRANSPARENT and cfg.initial.bond != 1:
        raise ConfigError("initial.bond: a transparent vertex simulates bond 1 only")
    bond = graph.bond(cfg.initial.bond)
    if not bond.contains(cfg.initial.x0):
        lo, hi = bond.bounds
        raise ConfigError(f"initial.x0: {cfg.initial.x0} lies outside bond {bond.id} ([{lo}, {hi}])")

    horizon = cfg.t_final * (1.0 + _STEP_TOL) + _STEP_TOL
    for i, t in enumerate(cfg.sampling.snapshot_times):
        if t > horizon:
            raise ConfigError(f"sampling.snapshot_times[{i}]: {t} is past the final time {cfg.t_final}")

    if cfg.sweep is not None:
        _check_sweep(cfg.sweep, n_bonds)


def config_from_dict(data: Any) -> ExperimentConfig:
    if data is None:
        raise ConfigError(f"empty config; required keys: {', '.join(REQUIRED_KEYS)}")
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = sorted(set(data) - {"graph", "solver", "initial", "boundary", "sampling", "sweep", "output"})
    if unknown:
        raise ConfigError(f"unknown section(s) {', '.join(map(str, unknown))}")
    missing = [s for s in ("graph", "solver", "initial") if s not in data]
    if missing:
        raise ConfigError(
            f"missing section(s) {', '.join(missing)}; required keys: {', '.join(REQUIRED_KEYS)}"
        )

    cfg = ExperimentConfig(
        graph=_parse_graph(data),
        solver=_parse_solver(data),
        initial=_parse_initial(data),
        boundary=_parse_boundary(data),
        sampling=_parse_sampling(data),
        output=_parse_output(data),
        sweep=_parse_sweep(data),
    )
    _cross_check(cfg)
    return cfg


def load_config(path: Path | str) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark is not None else str(path)
        raise ConfigError(f"{where}: {e.problem or e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from None
    try:
        return config_from_dict(data)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from None
