# the benchmark loop
# seeds are derived per (setting) for parameters and per (cell, setting) for
# data, so changing the method list never changes the generated data

"""backdoorbench.runner

Run a `ScenarioConfig` grid and write its report.

For each grid cell (sigma_x2, omega) and each parameter setting:

1. build the SEM (parameters shared by every cell of the same setting),
2. sample `n_total` rows, standardise the full pool, split it,
3. select covariates on the training rows (and the validation rows, if any),
4. estimate the effect on the test rows and score it against the true omega.

Method failures become rows with an `error:` status and NaN numbers.
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from backdoorforge.baselines import EntnerConfig, allz_ate, entner_search, marginal_ate
from backdoorforge.discovery import DiscoveryConfig, discover, make_grid, tune
from backdoorforge.errors import BackdoorForgeError
from backdoorforge.estimation import ate_error, backdoor_ate
from backdoorforge.export import load_sem
from backdoorforge.generation import derive_seed, sample_data, split_dataset
from backdoorforge.models import Dataset
from backdoorforge.presets import make_nhs_sem, make_simulation_sem
from backdoorforge.sem import LinearSem

from .config import METHODS, ScenarioConfig

logger = logging.getLogger(__name__)

METHOD_ORDER: Tuple[str, ...] = METHODS
REPORT_COLUMNS = (
    "scenario",
    "setting",
    "method",
    "ate_estimate",
    "ate_error",
    "selected",
    "seed",
    "config_hash",
    "status",
)
TIMING_COLUMNS = ("scenario", "setting", "method", "runtime_ms")


@dataclass(frozen=True, slots=True)
class ReportRow:
    """One (scenario, setting, method) outcome."""

    scenario: str
    setting: int
    method: str
    ate_estimate: float
    ate_error: float
    selected: Tuple[str, ...]
    seed: int
    config_hash: str
    status: str
    runtime_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status.startswith("ok")

    def sort_key(self) -> Tuple[str, int, str]:
        return (self.scenario, self.setting, self.method)

    def to_record(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "setting": self.setting,
            "method": self.method,
            "ate_estimate": self.ate_estimate,
            "ate_error": self.ate_error,
            "selected": ";".join(self.selected),
            "seed": self.seed,
            "config_hash": self.config_hash,
            "status": self.status,
        }


@dataclass
class BenchmarkReport:
    """Rows of one benchmark run plus the config that produced them."""

    config: ScenarioConfig
    rows: List[ReportRow] = field(default_factory=list)

    def frame(self) -> pd.DataFrame:
        """Report rows as a DataFrame in `REPORT_COLUMNS` order."""
        return pd.DataFrame(
            [r.to_record() for r in self.rows], columns=list(REPORT_COLUMNS)
        )

    def summary(self) -> Dict[str, Any]:
        """Per-scenario, per-method medians of the ATE error."""
        table: Dict[str, Dict[str, Dict[str, Any]]] = {}
        for scenario in sorted({r.scenario for r in self.rows}):
            table[scenario] = {}
            for method in METHOD_ORDER:
                rows = [
                    r
                    for r in self.rows
                    if r.scenario == scenario and r.method == method
                ]
                if not rows:
                    continue
                errs = [
                    r.ate_error for r in rows if r.ok and math.isfinite(r.ate_error)
                ]
                table[scenario][method] = {
                    "median_ate_error": float(np.median(errs)) if errs else None,
                    "n_ok": len(errs),
                    "n_error": len(rows) - len(errs),
                }
        return {
            "config_hash": self.config.config_hash(),
            "lambda2_rule": self.config.lambda2_rule,
            "methods": [m for m in METHOD_ORDER if m in self.config.methods],
            "scenarios": table,
        }


# --- one setting --------------------------------------------------------------


def build_sem(
    cfg: ScenarioConfig, sigma_x2: float, omega: float, setting: int
) -> LinearSem:
    """SEM of one (cell, setting); parameters depend on the setting only."""
    if cfg.graph_kind == "sim4block":
        return make_simulation_sem(
            cfg.block_dims,
            derive_seed(cfg.seed, "params", setting),
            sigma_x2=sigma_x2,
            omega=omega,
            sign_flip_prob=cfg.sign_flip_prob,
        )
    if cfg.graph_kind == "nhs":
        return make_nhs_sem(omega=omega, sigma_x2=sigma_x2)
    assert cfg.graph_path is not None
    sem = load_sem(cfg.graph_path)
    g = sem.graph
    sem = sem.with_noise({g.treatment: sigma_x2})
    return sem.with_coeffs({(g.treatment, g.outcome): omega})


def _discovery_grid(cfg: ScenarioConfig, seed: int) -> List[DiscoveryConfig]:
    base = DiscoveryConfig(
        lambda2=cfg.lambda2,
        lambda2_rule=cfg.lambda2_rule,  # type: ignore[arg-type]
        alpha_test=cfg.alpha_test,
        max_iters=cfg.max_iters,
        cv_folds=cfg.cv_folds,
        seed=seed % (2**31),
    )
    return make_grid(base, cfg.lambda1_grid, cfg.eta_grid, cfg.init_grid)


def _run_method(
    method: str,
    cfg: ScenarioConfig,
    train: Dataset,
    valid: Optional[Dataset],
    test: Dataset,
    seed: int,
) -> Tuple[float, Tuple[str, ...], str]:
    """(estimate on test, selected set, status) for one method."""
    z = test.roles().z
    if method == "marginal":
        return marginal_ate(test), (), "ok"
    if method == "allz":
        return allz_ate(test, ridge=cfg.ridge), z, "ok"
    if method == "entner":
        found = entner_search(
            train,
            EntnerConfig(
                alpha=cfg.entner_alpha,
                budget=cfg.entner_budget,
                strategy=cfg.entner_strategy,  # type: ignore[arg-type]
                seed=seed % (2**31),
            ),
        )
        if found.certified:
            est = backdoor_ate(test, found.zstar, ridge=cfg.ridge)
            return est, found.zstar, "ok"
        return allz_ate(test, ridge=cfg.ridge), z, "ok:uncertified"
    if method == "ours":
        best = tune(train, _discovery_grid(cfg, seed), valid=valid, seed=seed)
        res = discover(train, best)
        status = "ok" if res.converged else "ok:not_converged"
        est = backdoor_ate(test, res.selected_ids, ridge=cfg.ridge)
        return est, res.selected_ids, status
    raise ValueError(f"unknown method {method!r}")


def run_setting(
    cfg: ScenarioConfig, cell: int, sigma_x2: float, omega: float, setting: int
) -> List[ReportRow]:
    """Run every configured method on one (cell, setting)."""
    scenario = cfg.scenario_id(sigma_x2, omega)
    data_seed = derive_seed(cfg.seed, "data", cell, setting)
    sem = build_sem(cfg, sigma_x2, omega, setting)
    pool = sample_data(sem, cfg.n_total, data_seed, standardize=True)
    parts = split_dataset(pool, cfg.split, derive_seed(data_seed, "split"))
    if len(parts) == 3:
        train, valid, test = parts
    else:
        (train, test), valid = parts, None

    chash = cfg.config_hash()
    rows = []
    for method in METHOD_ORDER:
        if method not in cfg.methods:
            continue
        seed = derive_seed(data_seed, METHOD_ORDER.index(method))
        t0 = time.perf_counter()
        try:
            est, selected, status = _run_method(method, cfg, train, valid, test, seed)
            err = ate_error(est, sem.omega)
        except (BackdoorForgeError, np.linalg.LinAlgError) as exc:
            logger.warning(
                "%s setting %d %s failed: %s", scenario, setting, method, exc
            )
            est, err, selected = math.nan, math.nan, ()
            status = f"error:{type(exc).__name__}: {exc}"
        rows.append(
            ReportRow(
                scenario=scenario,
                setting=setting,
                method=method,
                ate_estimate=est,
                ate_error=err,
                selected=tuple(selected),
                seed=seed,
                config_hash=chash,
                status=status,
                runtime_ms=1000.0 * (time.perf_counter() - t0),
            )
        )
    logger.info("%s setting %d done", scenario, setting)
    return rows


def _run_task(task: Tuple[ScenarioConfig, int, float, float, int]) -> List[ReportRow]:
    return run_setting(*task)


def run_benchmark(cfg: ScenarioConfig) -> BenchmarkReport:
    """Run the whole grid.

    Settings run in a process pool when `cfg.workers > 1`; rows are sorted by
    (scenario, setting, method) either way.

    Returns:
        A `BenchmarkReport` with `len(methods) * n_settings * len(cells)` rows.
    """
    tasks = [
        (cfg, cell, sx2, om, setting)
        for cell, (sx2, om) in enumerate(cfg.cells)
        for setting in range(cfg.n_settings)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    rows = sorted((r for chunk in chunks for r in chunk), key=ReportRow.sort_key)
    return BenchmarkReport(config=cfg, rows=rows)


# --- output -------------------------------------------------------------------


def write_report(report: BenchmarkReport, out_dir: Path) -> Dict[str, Path]:
    """Write `report.csv`, `summary.json`, `timings.csv` and `config.json`.

    `report.csv` holds no wall-clock data, so reruns are byte-identical.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.csv",
        "summary": out / "summary.json",
        "timings": out / "timings.csv",
        "config": out / "config.json",
    }
    report.frame().to_csv(paths["report"], index=False, float_format="%.17g")
    timings = pd.DataFrame(
        [(r.scenario, r.setting, r.method, r.runtime_ms) for r in report.rows],
        columns=list(TIMING_COLUMNS),
    )
    timings.to_csv(paths["timings"], index=False, float_format="%.3f")
    with open(paths["summary"], "w", encoding="utf-8") as f:
        json.dump(report.summary(), f, indent=2, sort_keys=True)
        f.write("\n")
    with open(paths["config"], "w", encoding="utf-8") as f:
        json.dump(report.config.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    return paths


def read_report(path: Path) -> pd.DataFrame:
    """Read a `report.csv` back (the `selected` column stays a string)."""
    frame = pd.read_csv(path, dtype={"selected": str}, float_precision="round_trip")
    return frame.fillna({"selected": ""})


def replay(cfg: ScenarioConfig, settings: Sequence[int]) -> List[ReportRow]:
    """Recompute selected settings of every cell (single process)."""
    one = replace(cfg, workers=1)
    rows: List[ReportRow] = []
    for cell, (sx2, om) in enumerate(one.cells):
        for s in settings:
            rows.extend(run_setting(one, cell, sx2, om, s))
    return sorted(rows, key=ReportRow.sort_key)
