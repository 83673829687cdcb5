from pathlib import Path

import pytest

from diracgraph.boundary import EndMode, KernelKind, VertexMode
from diracgraph.config import REQUIRED_KEYS, load_config
from diracgraph.errors import ConfigError
from diracgraph.solver import StartMode

from conftest import SUM_RULE_ALPHAS

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


MINIMAL = """
graph:
  dx: 0.1
  bonds:
    - alpha: 1.0
      length: 5.0
    - alpha: 1.0
      length: 5.0
solver:
  mass: 0.0
  dt: 0.05
  n_steps: 20
initial:
  x0: -2.0
  sigma: 0.5
"""


def test_shipped_sum_rule_config():
    cfg = load_config(CONFIGS / "sum_rule_star.yaml")

    assert cfg.graph.dx == 0.0125
    assert tuple(b.alpha for b in cfg.graph.bonds) == pytest.approx(SUM_RULE_ALPHAS, rel=1e-15)
    assert all(b.length == 20.0 for b in cfg.graph.bonds)
    assert cfg.solver.mass == 0.01 and cfg.solver.dt == 0.01
    assert cfg.solver.n_steps == 1000
    assert cfg.initial.x0 == -5.0 and cfg.initial.sigma == 0.9
    assert cfg.boundary.vertex_mode is VertexMode.WEIGHTED
    assert cfg.end_modes == (EndMode.DIRICHLET,) * 3
    assert cfg.sampling.snapshot_times == (0.0, 3.0, 6.0, 10.0)
    assert cfg.sweep is None


@pytest.mark.parametrize(
    "name", ["sum_rule_star.yaml", "alpha1_sweep.yaml", "kirchhoff_star.yaml", "line_tbc.yaml", "bond1_vertex_tbc.yaml"]
)
def test_all_shipped_configs_load(name):
    load_config(CONFIGS / name)


def test_sweep_config():
    cfg = load_config(CONFIGS / "alpha1_sweep.yaml")
    assert cfg.sweep is not None
    assert (cfg.sweep.param, cfg.sweep.start, cfg.sweep.stop, cfg.sweep.points) == ("alpha1", 0.4, 1.4, 51)
    values = cfg.sweep.values()
    assert values[0] == 0.4 and values[-1] == 1.4
    assert values[21] == pytest.approx(0.82)


def test_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL))
    assert cfg.solver.overflow_factor == 1e6
    assert cfg.solver.start is StartMode.TAYLOR
    assert cfg.initial.bond == 1 and cfg.initial.normalize is True and cfg.initial.amplitude == 1.0
    assert cfg.boundary.vertex_mode is VertexMode.WEIGHTED
    assert cfg.boundary.kernel is KernelKind.I0
    assert cfg.sampling.sample_every == 10
    assert cfg.output.dir == Path("out") and cfg.output.checkpoint is True


def test_per_bond_end_mode_overrides_the_default(tmp_path):
    text = MINIMAL.replace("      length: 5.0\n    - alpha", "      length: 5.0\n      end_mode: transparent\n    - alpha", 1)
    cfg = load_config(_write(tmp_path, text + "boundary:\n  end_mode: dirichlet\n"))
    assert cfg.end_modes == (EndMode.TRANSPARENT, EndMode.DIRICHLET)


def test_empty_file_lists_required_keys(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, ""))
    for key in REQUIRED_KEYS:
        assert key in str(info.value)


def test_cfl_violation(tmp_path):
    with pytest.raises(ConfigError, match="CFL"):
        load_config(_write(tmp_path, MINIMAL.replace("dt: 0.05", "dt: 0.2")))


def test_yaml_syntax_error_has_line_info(tmp_path):
    path = _write(tmp_path, "graph:\n  dx: [0.1\nsolver: {}\n")
    with pytest.raises(ConfigError, match=r"cfg\.yaml:\d+:\d+"):
        load_config(path)


@pytest.mark.parametrize(
    "old, new, field",
    [
        ("  dt: 0.05", "  dt: 0.05\n  speed: 2", "solver: unknown key"),
        ("initial:", "extra: 1\ninitial:", "unknown section"),
        ("  sigma: 0.5", "  sigma: -0.5", "initial.sigma"),
        ("  n_steps: 20", "  n_steps: 20\n  t_final: 1.0", "exactly one of"),
        ("  n_steps: 20", "  t_final: 1.01", "solver.t_final"),
        ("  x0: -2.0", "  x0: 2.0", "initial.x0"),
        ("  mass: 0.0", "  mass: fast", "solver.mass"),
        ("    - alpha: 1.0\n      length: 5.0\n    - alpha: 1.0\n      length: 5.0",
         "    - alpha: 1.0\n      length: 5.0", "graph.bonds"),
        ("  sigma: 0.5", "  sigma: 0.5\n  bond: 3", "initial.bond"),
    ],
)
def test_validation_names_the_field(tmp_path, old, new, field):
    assert old in MINIMAL
    with pytest.raises(ConfigError, match=field):
        load_config(_write(tmp_path, MINIMAL.replace(old, new, 1)))


def test_snapshot_times_must_lie_in_the_run(tmp_path):
    with pytest.raises(ConfigError, match="snapshot_times"):
        load_config(_write(tmp_path, MINIMAL + "sampling:\n  snapshot_times: [0.5, 2.0]\n"))


def test_t_final_converts_to_steps(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL.replace("n_steps: 20", "t_final: 1.0")))
    assert cfg.solver.n_steps == 20
    assert cfg.t_final == pytest.approx(1.0)


def test_sweep_range_must_be_positive(tmp_path):
    text = MINIMAL + "sweep:\n  start: -0.4\n  stop: 1.4\n  points: 5\n"
    with pytest.raises(ConfigError, match="sweep.start"):
        load_config(_write(tmp_path, text))


def test_sweep_param_must_name_a_bond(tmp_path):
    text = MINIMAL + "sweep:\n  param: alpha7\n  start: 0.4\n  stop: 1.4\n  points: 5\n"
    with pytest.raises(ConfigError, match="sweep.param"):
        load_config(_write(tmp_path, text))


def test_transparent_vertex_needs_the_packet_on_bond_one(tmp_path):
    text = MINIMAL.replace("  x0: -2.0", "  x0: 2.0\n  bond: 2") + "boundary:\n  vertex_mode: transparent\n"
    with pytest.raises(ConfigError, match="bond 1"):
        load_config(_write(tmp_path, text))
