import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from diracgraph.checkpoint import load_checkpoint
from diracgraph.config import SweepConfig, load_config
from diracgraph.diagnostics import make_record
from diracgraph.errors import CheckpointError, ConfigError, DiracGraphError, InstabilityError
from diracgraph.experiment import run_experiment, sweep_alpha1
from diracgraph.solver import SimParams

logger = logging.getLogger("diracgraph.cli")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INSTABILITY = 3
EXIT_IO = 4

LOG_FORMAT = "[diracgraph] %(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.out:
        config = config.with_output_dir(args.out)

    state = None
    if args.resume:
        restored = load_checkpoint(args.resume)
        restored.check_compatible(config)
        state = restored.state

    run_experiment(config, state=state)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.out:
        config = config.with_output_dir(args.out)

    base = config.sweep
    if base is None and (args.start is None or args.stop is None or args.points is None):
        raise ConfigError("sweep: the config has no sweep section; pass --from, --to and --points")
    if base is None:
        sweep = SweepConfig(args.start, args.stop, args.points, args.param or "alpha1")
    else:
        sweep = replace(
            base,
            start=base.start if args.start is None else args.start,
            stop=base.stop if args.stop is None else args.stop,
            points=base.points if args.points is None else args.points,
            param=base.param if args.param is None else args.param,
        )

    result, _ = sweep_alpha1(config, sweep)
    if result.failures:
        logger.warning("%d of %d sweep points failed", len(result.failures), len(result.points))
        return EXIT_INSTABILITY
    return EXIT_OK


def cmd_check_sumrule(args) -> int:
    config = load_config(args.config)
    graph = config.build_graph()
    policy = config.build_policy(graph)
    print(f"alphas: {', '.join(f'{a:.17g}' for a in graph.alphas)}")
    print(f"vertex: {policy.vertex_mode.value}")
    print(f"weights: {', '.join(f'{a:.17g}' for a in policy.effective_alphas)}")
    print(f"residual: {policy.sum_rule_residual:.17g}")
    print(f"A: {policy.vertex_factor:.17g}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    restored = load_checkpoint(args.checkpoint)
    f = restored.state.field
    params = SimParams(restored.mass, restored.dt, restored.graph.dx, 0, enforce_cfl=False)
    record = make_record(f, params, restored.state.record_reference())
    print(f"bonds: {restored.graph.n_bonds}  domain: {list(f.bond_ids)}  "
          f"vertex: {restored.state.policy.vertex_mode.value}")
    print(f"time level: {f.time_level}  t: {record.t:.17g}")
    for b, n in zip(record.bond_ids, record.partial_norms):
        print(f"N_{b}: {n:.17g}")
    print(f"total: {record.total_norm:.17g}")
    print(f"R: {record.reflection:.17g}")
    print(f"E: {record.energy:.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracgraph")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only.")
    subparsers = parser.add_subparsers(required=True)

    # run
    run = subparsers.add_parser("run", help="Run one simulation and write its artifacts")
    run.add_argument("--config", type=Path, required=True)
    run.add_argument("--out", type=Path, help="Override output.dir.")
    run.add_argument("--resume", type=Path, help="Continue from a final_state.pb checkpoint.")
    run.set_defaults(func=cmd_run)

    # sweep
    sweep = subparsers.add_parser("sweep", help="Sweep one bond weight and record R at t_final")
    sweep.add_argument("--config", type=Path, required=True)
    sweep.add_argument("--param", help="Swept weight, alpha<j> (default alpha1).")
    sweep.add_argument("--from", dest="start", type=float)
    sweep.add_argument("--to", dest="stop", type=float)
    sweep.add_argument("--points", type=int)
    sweep.add_argument("--out", type=Path, help="Override output.dir.")
    sweep.set_defaults(func=cmd_sweep)

    # check-sumrule
    check = subparsers.add_parser("check-sumrule", help="Print the sum-rule residual and vertex factor A")
    check.add_argument("--config", type=Path, required=True)
    check.set_defaults(func=cmd_check_sumrule)

    # inspect
    inspect = subparsers.add_parser("inspect", help="Print diagnostics of a checkpoint")
    inspect.add_argument("checkpoint", type=Path)
    inspect.set_defaults(func=cmd_inspect)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        return args.func(args)
    except InstabilityError as e:
        logger.error("%s", e)
        return EXIT_INSTABILITY
    except (ConfigError, CheckpointError, DiracGraphError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_VALIDATION
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
