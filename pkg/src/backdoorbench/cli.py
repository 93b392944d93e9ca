# commandline usage
# one subcommand per task: simulate, discover, estimate, benchmark, export-plots
# configuration errors exit with code 2, everything else is a normal traceback

"""backdoorbench.cli

Command-line entry point (`backdoorbench`).

Verbs:

- `simulate`: sample a dataset from a preset or SEM JSON and write CSV + roles.
- `discover`: run the discovery optimizer on a dataset CSV.
- `estimate`: backdoor ATE on a dataset CSV for an explicit adjustment set.
- `benchmark`: run a scenario grid and write report / summary / timings.
- `export-plots`: histogram and scatter tables from a report CSV.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from backdoorforge.constants import RIDGE_EPS
from backdoorforge.discovery import DiscoveryConfig, discover, make_grid, tune
from backdoorforge.errors import ConfigError
from backdoorforge.estimation import ate_error, backdoor_ate
from backdoorforge.export import (
    load_config,
    load_dataset_csv,
    load_sem,
    read_json,
    save_dataset_csv,
    save_json,
)
from backdoorforge.generation import sample_data
from backdoorforge.presets import (
    BlockDims,
    make_nhs_sem,
    make_simulation_sem,
    make_two_equation_sem,
)
from backdoorforge.sem import LinearSem

from .config import ScenarioConfig, full_grid
from .plots import export_plot_data
from .runner import read_report, run_benchmark, write_report

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _names(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _init_spec(text: str) -> Any:
    return text if text == "ols" else int(text)


def _init_specs(text: str) -> List[Any]:
    return [_init_spec(t) for t in _names(text)]


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


# --- simulate -----------------------------------------------------------------


def _cmd_simulate(args: argparse.Namespace) -> int:
    sem: LinearSem
    if args.sem:
        sem = load_sem(args.sem)
    elif args.preset == "nhs":
        sem = make_nhs_sem(omega=args.omega, sigma_x2=args.sigma_x2)
    elif args.preset == "two-equation":
        sem = make_two_equation_sem(beta_yx=args.omega, sigma_x2=args.sigma_x2)
    else:
        sem = make_simulation_sem(
            BlockDims.uniform(args.block_dim),
            args.seed,
            sigma_x2=args.sigma_x2,
            omega=args.omega,
        )
    data = sample_data(sem, args.n, args.seed, standardize=args.standardize)
    sidecar = save_dataset_csv(data, args.out)
    if args.sem_out:
        save_json(sem, args.sem_out)
    print(f"wrote {data.n} rows x {data.p} columns to {args.out} (roles: {sidecar})")
    return 0


# --- discover / estimate ------------------------------------------------------


def _discovery_config(args: argparse.Namespace) -> DiscoveryConfig:
    values: Dict[str, Any] = {
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "eta": args.eta,
        "max_iters": args.max_iters,
        "lambda2_rule": args.lambda2_rule,
        "init_gamma": _init_spec(args.init),
        "support_threshold": args.threshold,
        "seed": args.seed,
    }
    if args.config:
        values.update(load_config(args.config).to_dict())
    return DiscoveryConfig.from_dict(values)


def _cmd_discover(args: argparse.Namespace) -> int:
    data = load_dataset_csv(args.data, roles_path=args.roles)
    cfg = _discovery_config(args)
    if args.tune:
        grid = make_grid(
            cfg,
            _floats(args.lambda1_grid),
            _floats(args.eta_grid),
            _init_specs(args.init_grid),
        )
        cfg = tune(data, grid, seed=args.seed)
    result = discover(data, cfg)
    ate = backdoor_ate(data, result.selected_ids)
    if args.out:
        save_json(result, args.out)
    print(f"selected: {','.join(result.selected_ids) or '(none)'}")
    print(f"ate: {ate:.6g}")
    print(f"converged: {result.converged} (lambda2={result.lambda2:.3g})")
    return 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    data = load_dataset_csv(args.data, roles_path=args.roles)
    ate = backdoor_ate(data, _names(args.zstar))
    print(f"ate: {ate:.6g}")
    if args.truth is not None:
        print(f"ate_error: {ate_error(ate, args.truth):.6g}")
    return 0


# --- benchmark / export-plots -------------------------------------------------

_BENCH_FLAGS = (
    "name",
    "graph_kind",
    "graph_path",
    "sigma_x2",
    "omega",
    "n_total",
    "split",
    "n_settings",
    "seed",
    "methods",
    "sign_flip_prob",
    "lambda1_grid",
    "eta_grid",
    "init_grid",
    "lambda2",
    "cv_folds",
    "lambda2_rule",
    "alpha_test",
    "max_iters",
    "ridge",
    "entner_budget",
    "entner_strategy",
    "entner_alpha",
    "workers",
)


def scenario_from_args(args: argparse.Namespace) -> ScenarioConfig:
    """Flags first, then the config file on top (file values win).

    Raises:
        ConfigError: On invalid values.
    """
    base = full_grid() if args.full_grid else ScenarioConfig()
    values = base.to_dict()
    for key in _BENCH_FLAGS:
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if args.block_dim is not None:
        values["block_dims"] = BlockDims.uniform(args.block_dim).to_dict()
    if args.config:
        values.update(read_json(args.config))
    return ScenarioConfig.from_dict(values)


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4g}"


def _cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = scenario_from_args(args)
    logger.info("benchmark %s (config %s)", cfg.name, cfg.config_hash())
    report = run_benchmark(cfg)
    paths = write_report(report, Path(args.out))
    summary = report.summary()
    for scenario, methods in summary["scenarios"].items():
        cells = ", ".join(
            f"{m}={_fmt(v['median_ate_error'])}" for m, v in methods.items()
        )
        print(f"{scenario}: {cells}")
    print(f"report: {paths['report']}")
    return 0


def _cmd_export_plots(args: argparse.Namespace) -> int:
    frame = read_report(Path(args.report))
    paths = export_plot_data(frame, Path(args.out), bin_width=args.bin_width)
    print(f"wrote {paths['histogram']} and {paths['scatter']}")
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per verb."""
    parser = argparse.ArgumentParser(
        prog="backdoorbench",
        description="Differentiable backdoor adjustment-set discovery and benchmark.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Sample a dataset and write CSV + roles.")
    p.add_argument(
        "--preset", choices=["sim4block", "nhs", "two-equation"], default="sim4block"
    )
    p.add_argument(
        "--sem", type=str, default=None, help="LinearSem JSON (overrides preset)."
    )
    p.add_argument("--block-dim", type=int, default=1)
    p.add_argument("--sigma-x2", type=float, default=0.6)
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--sem-out", type=str, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("discover", help="Run discovery on a dataset CSV.")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--roles", type=str, default=None)
    p.add_argument("--config", type=str, default=None, help="DiscoveryConfig JSON.")
    p.add_argument("--lambda1", type=float, default=0.1)
    p.add_argument("--lambda2", type=float, default=1e-4)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument(
        "--lambda2-rule", choices=["constraint", "quoted"], default="constraint"
    )
    p.add_argument("--init", type=str, default="ols", help="'ols' or an integer seed.")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--tune", action="store_true", help="Cross-validate the grids below."
    )
    p.add_argument("--lambda1-grid", type=str, default="0.05,0.2")
    p.add_argument("--eta-grid", type=str, default="0.5")
    p.add_argument("--init-grid", type=str, default="ols,0")
    p.add_argument("--out", type=str, default=None, help="Write the result as JSON.")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("estimate", help="Backdoor ATE for an explicit adjustment set.")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--roles", type=str, default=None)
    p.add_argument("--zstar", type=str, default="", help="Comma-separated column ids.")
    p.add_argument("--truth", type=float, default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("benchmark", help="Run a scenario grid.")
    p.add_argument("--config", type=str, default=None, help="ScenarioConfig JSON.")
    p.add_argument("--out", type=str, default="bench_out")
    p.add_argument("--full-grid", action="store_true")
    p.add_argument("--name", type=str, default=None)
    p.add_argument(
        "--graph-kind", choices=["sim4block", "nhs", "custom-file"], default=None
    )
    p.add_argument("--graph-path", type=str, default=None)
    p.add_argument("--block-dim", type=int, default=None)
    p.add_argument("--sigma-x2", type=_floats, default=None)
    p.add_argument("--omega", type=_floats, default=None)
    p.add_argument("--n-total", type=int, default=None)
    p.add_argument("--split", type=_floats, default=None)
    p.add_argument("--n-settings", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--methods", type=_names, default=None)
    p.add_argument("--sign-flip-prob", type=float, default=None)
    p.add_argument("--lambda1-grid", type=_floats, default=None)
    p.add_argument("--eta-grid", type=_floats, default=None)
    p.add_argument("--init-grid", type=_init_specs, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--cv-folds", type=int, default=None)
    p.add_argument("--lambda2-rule", choices=["constraint", "quoted"], default=None)
    p.add_argument("--alpha-test", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument(
        "--ridge",
        type=float,
        nargs="?",
        const=RIDGE_EPS,
        default=None,
        help="Ridge on the effect regressions; the bare flag uses 1e-8.",
    )
    p.add_argument("--entner-strategy", choices=["greedy", "random"], default=None)
    p.add_argument("--entner-budget", type=int, default=None)
    p.add_argument("--entner-alpha", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("export-plots", help="Histogram / scatter CSVs from a report.")
    p.add_argument("--report", type=str, required=True)
    p.add_argument("--out", type=str, default="plots")
    p.add_argument("--bin-width", type=float, default=None)
    p.set_defaults(func=_cmd_export_plots)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse CLI arguments and run the selected verb.

    Returns:
        Process exit code: 0 on success, 2 on configuration errors.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return int(args.func(args))
    except ConfigError as exc:
        print(f"backdoorbench: error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"backdoorbench: error: invalid JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
