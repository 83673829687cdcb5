from __future__ import annotations

import copy
import math
from typing import Any, Callable, Dict

import pytest

from diracgraph.config import ExperimentConfig, config_from_dict

SQRT_2_3 = math.sqrt(2.0 / 3.0)
SQRT_2 = math.sqrt(2.0)
SUM_RULE_ALPHAS = (SQRT_2_3, 1.0, SQRT_2)

# m = 0.01, dx = 0.0125, dt = 0.01, packet at -5 with sigma 0.9, run to t = 10
STAR_SETUP: Dict[str, Any] = {
    "graph": {"dx": 0.0125, "bonds": [{"alpha": a} for a in SUM_RULE_ALPHAS]},
    "solver": {"mass": 0.01, "dt": 0.01, "t_final": 10.0},
    "initial": {"x0": -5.0, "sigma": 0.9},
    "boundary": {"vertex_mode": "weighted", "end_mode": "dirichlet"},
    "sampling": {"sample_every": 10},
    "output": {"dir": "out"},
}


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if value is None:
            out.pop(key, None)
        elif isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@pytest.fixture
def make_config(tmp_path) -> Callable[..., ExperimentConfig]:
    """Sum-rule star setup with per-section overrides; output goes to a temporary directory."""

    def factory(**sections: Any) -> ExperimentConfig:
        data = _merge(STAR_SETUP, {"output": {"dir": str(tmp_path / "out")}})
        data = _merge(data, sections)
        return config_from_dict(data)

    return factory


@pytest.fixture
def coarse_config(tmp_path) -> Callable[..., ExperimentConfig]:
    """Short, coarse-grid variant for tests that only exercise plumbing."""

    def factory(**sections: Any) -> ExperimentConfig:
        base = {
            "graph": {"dx": 0.05, "bonds": [{"alpha": a, "length": 10.0} for a in SUM_RULE_ALPHAS]},
            "solver": {"mass": 0.01, "dt": 0.025, "t_final": 1.0},
            "initial": {"x0": -3.0, "sigma": 0.9},
            "sampling": {"sample_every": 4},
        }
        data = _merge(STAR_SETUP, {"output": {"dir": str(tmp_path / "out")}})
        return config_from_dict(_merge(_merge(data, base), sections))

    return factory
