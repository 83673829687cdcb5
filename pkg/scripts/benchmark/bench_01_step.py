from __future__ import annotations

import statistics
import time
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from diracgraph.boundary import BoundaryPolicy, EndMode, VertexMode
from diracgraph.graph import build_star_graph
from diracgraph.solver import SimParams, initial_field, init_histories, step

# =========================================================
# Configuration
# =========================================================

OUT_CSV = Path("bench/step_timing.csv")

MASS = 0.01
DT = 0.01
ALPHAS = (0.816496580927726, 1.0, 1.4142135623730951)
DXS = (0.05, 0.025, 0.0125)
STEPS = 200
RUNS = 5
WARMUP = 1

# =========================================================
# Helpers
# =========================================================

def _now_ns() -> int:
    return time.perf_counter_ns()


def _stats(samples_ns: List[int]) -> Dict[str, float]:
    ms = [s / 1e6 for s in samples_ns]
    return {
        "mean_ms": statistics.mean(ms),
        "median_ms": statistics.median(ms),
        "stdev_ms": statistics.pstdev(ms) if len(ms) > 1 else 0.0,
        "min_ms": min(ms),
        "max_ms": max(ms),
    }

# =========================================================
# Core benchmark primitive
# =========================================================

def benchmark_steps(dx: float, end_mode: EndMode, runs: int, warmup: int) -> Dict[str, Any]:
    graph = build_star_graph([(a, 20.0, dx) for a in ALPHAS])
    params = SimParams(MASS, DT, dx, STEPS)
    samples = []
    for i in range(warmup + runs):
        policy = BoundaryPolicy(VertexMode.WEIGHTED, (end_mode,) * graph.n_bonds, graph.alphas)
        field = initial_field(graph, params, policy, x0=-5.0, sigma=0.9)
        init_histories(field, graph, policy)
        policy.bind(MASS, DT, STEPS)

        t0 = _now_ns()
        for _ in range(STEPS):
            field = step(field, graph, params, policy)
        elapsed = _now_ns() - t0
        if i >= warmup:
            samples.append(elapsed)

    nodes = sum(b.cells + 1 for b in graph.bonds)
    print(f"  dx={dx:<8g} ends={end_mode.value:<12} nodes={nodes:>6}  "
          f"median {statistics.median(samples) / 1e6:8.2f} ms / {STEPS} steps")
    return {"dx": dx, "end_mode": end_mode.value, "nodes": nodes, "steps": STEPS, **_stats(samples)}

# =========================================================
# Runner
# =========================================================

def run_all_benchmarks(csv_path: Path = OUT_CSV, runs: int = RUNS, warmup: int = WARMUP) -> None:
    print("=== Benchmark 01: step loop ===\n")
    rows = [
        benchmark_steps(dx, end_mode, runs, warmup)
        for dx in DXS
        for end_mode in (EndMode.DIRICHLET, EndMode.TRANSPARENT)
    ]
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(csv_path, index=False)
    print(f"\nBenchmark complete. CSV written to: {csv_path.resolve()}")


if __name__ == "__main__":
    run_all_benchmarks()
