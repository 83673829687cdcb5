from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from diracgraph import artifacts
from diracgraph.checkpoint import save_checkpoint
from diracgraph.config import ExperimentConfig, SweepConfig
from diracgraph.diagnostics import max_relative_drift, transmitted_fractions
from diracgraph.errors import ConfigError, DiracGraphError
from diracgraph.solver import RunResult, SimulationState, run

logger = logging.getLogger(__name__)

THREADS_ENV = "DIRACGRAPH_SWEEP_THREADS"

TIMESERIES_FILE = "timeseries.csv"
SUMMARY_FILE = "summary.json"
CHECKPOINT_FILE = "final_state.pb"
SWEEP_FILE = "sweep.csv"
SWEEP_SUMMARY_FILE = "sweep_summary.json"


@dataclass
class ExperimentResult:
    run: RunResult
    summary: Dict[str, Any]
    paths: List[Path] = field(default_factory=list)


def summarize(result: RunResult) -> Dict[str, Any]:
    final = result.final
    policy = result.state.policy
    try:
        fractions: Optional[List[float]] = list(transmitted_fractions(final))
    except ValueError:
        fractions = None
    return {
        "R_final": final.reflection,
        "fractions_final": fractions,
        "max_energy_drift": max_relative_drift([r.energy for r in result.records]),
        "max_norm_drift": max_relative_drift([r.total_norm for r in result.records]),
        "sum_rule_residual": policy.sum_rule_residual,
        "vertex_factor": policy.vertex_factor,
        "vertex_mode": policy.vertex_mode.value,
        "steps": result.params.n_steps,
        "time_level": final.time_level,
        "t_final": final.t,
    }


def run_experiment(
    config: ExperimentConfig,
    *,
    state: Optional[SimulationState] = None,
) -> ExperimentResult:
    """Run one simulation and write its artifacts to config.output.dir."""
    out_dir = Path(config.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    result = run(config, state=state)
    written: List[Path] = []
    try:
        written.append(artifacts.write_timeseries(out_dir / TIMESERIES_FILE, result.records))
        written.extend(artifacts.write_snapshots(out_dir, result.snapshots))
        summary = summarize(result)
        written.append(artifacts.write_json(out_dir / SUMMARY_FILE, summary))
        if config.output.checkpoint:
            written.append(save_checkpoint(out_dir / CHECKPOINT_FILE, result.graph, result.params, result.state))
    except BaseException:
        artifacts.remove_outputs(written)
        raise

    logger.info("R_final=%.6g, artifacts in %s", summary["R_final"], out_dir)
    return ExperimentResult(result, summary, written)


# =========================
# Sweeps
# =========================

@dataclass(frozen=True)
class SweepPoint:
    index: int
    value: float
    r_final: float
    status: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class SweepResult:
    param: str
    points: List[SweepPoint]

    @property
    def failures(self) -> List[SweepPoint]:
        return [p for p in self.points if not p.ok]

    def argmin(self) -> Optional[SweepPoint]:
        ok = [p for p in self.points if p.ok]
        if not ok:
            return None
        return min(ok, key=lambda p: (p.r_final, p.index))

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                self.param: [p.value for p in self.points],
                "R_final": [p.r_final for p in self.points],
                "status": [p.status for p in self.points],
            }
        )

    def summary(self) -> Dict[str, Any]:
        best = self.argmin()
        return {
            "param": self.param,
            "points": len(self.points),
            "argmin": best.value if best else None,
            "min_R": best.r_final if best else None,
            "failures": [{"value": p.value, "status": p.status} for p in self.failures],
        }


def sweep_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV}: expected a positive integer, got {raw!r}")
    return n


def _run_point(config: ExperimentConfig, sweep: SweepConfig, index: int, value: float) -> SweepPoint:
    try:
        result = run(config.with_alpha(sweep.bond_id, value))
    except DiracGraphError as e:
        logger.warning("sweep point %s=%.6g failed: %s", sweep.param, value, e)
        return SweepPoint(index, value, float("nan"), f"{type(e).__name__}: {e}")
    logger.info("sweep point %s=%.6g: R=%.6g", sweep.param, value, result.final.reflection)
    return SweepPoint(index, value, result.final.reflection, "ok")


def sweep_alpha1(
    config: ExperimentConfig,
    sweep: Optional[SweepConfig] = None,
    *,
    threads: Optional[int] = None,
) -> Tuple[SweepResult, List[Path]]:
    """
    Run one independent simulation per sweep value of alpha_j (alpha1 by default)
    and write sweep.csv / sweep_summary.json. Failed points are recorded, not raised.
    """
    sweep = sweep or config.sweep
    if sweep is None:
        raise ConfigError("sweep: no sweep section in the config and no sweep given")
    config = config.with_sweep(sweep)
    values = sweep.values()
    workers = max(1, min(threads or sweep_threads(), len(values)))
    logger.info("sweeping %s over [%g, %g] (%d points, %d thread(s))",
                sweep.param, sweep.start, sweep.stop, sweep.points, workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_point, config, sweep, i, float(v)) for i, v in enumerate(values)]
        points = [f.result() for f in futures]

    result = SweepResult(sweep.param, sorted(points, key=lambda p: p.index))
    best = result.argmin()
    if best is not None:
        logger.info("argmin %s=%.6g with R=%.6g", sweep.param, best.value, best.r_final)

    out_dir = Path(config.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    try:
        written.append(artifacts.write_csv(out_dir / SWEEP_FILE, result.frame()))
        written.append(artifacts.write_json(out_dir / SWEEP_SUMMARY_FILE, result.summary()))
    except BaseException:
        artifacts.remove_outputs(written)
        raise
    return result, written

