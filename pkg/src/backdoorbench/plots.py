# plot-ready tables from a benchmark report, no rendering here
# histogram bins default to Freedman-Diaconis

"""backdoorbench.plots

Turn a benchmark report into two CSV tables:

- `histogram.csv`: per (scenario, method) histogram of the absolute ATE error,
  columns `scenario, method, bin_left, bin_right, count`.
- `scatter.csv`: one point per (scenario, setting, baseline) pairing the
  baseline's error with ours, columns
  `scenario, setting, baseline, baseline_error, ours_error`.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .runner import METHOD_ORDER, BenchmarkReport

HISTOGRAM_COLUMNS = ("scenario", "method", "bin_left", "bin_right", "count")
SCATTER_COLUMNS = ("scenario", "setting", "baseline", "baseline_error", "ours_error")


def _frame(report: Union[BenchmarkReport, pd.DataFrame]) -> pd.DataFrame:
    frame = report.frame() if isinstance(report, BenchmarkReport) else report
    if frame.empty:
        return frame
    ok = frame["status"].astype(str).str.startswith("ok")
    return frame[ok & np.isfinite(frame["ate_error"].astype(float))]


def bin_edges(errors: np.ndarray, bin_width: Optional[float] = None) -> np.ndarray:
    """Histogram edges: Freedman-Diaconis, or fixed-width bins from the minimum.

    Raises:
        ValueError: If `bin_width` is not positive.
    """
    if bin_width is None:
        return np.histogram_bin_edges(errors, bins="fd")
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    lo, hi = float(np.min(errors)), float(np.max(errors))
    n = max(1, int(np.ceil((hi - lo) / bin_width)))
    edges = lo + bin_width * np.arange(n + 1)
    if edges[-1] < hi:
        edges = np.append(edges, edges[-1] + bin_width)
    return edges


def histogram_table(
    report: Union[BenchmarkReport, pd.DataFrame], bin_width: Optional[float] = None
) -> pd.DataFrame:
    """Per (scenario, method) error histograms as a long table."""
    frame = _frame(report)
    records: List[Tuple[str, str, float, float, int]] = []
    if not frame.empty:
        for scenario in sorted(frame["scenario"].unique()):
            sub = frame[frame["scenario"] == scenario]
            for method in METHOD_ORDER:
                errs = sub.loc[sub["method"] == method, "ate_error"].to_numpy(float)
                if errs.size == 0:
                    continue
                edges = bin_edges(errs, bin_width)
                counts, _ = np.histogram(errs, bins=edges)
                for k, c in enumerate(counts):
                    records.append(
                        (scenario, method, float(edges[k]), float(edges[k + 1]), int(c))
                    )
    return pd.DataFrame(records, columns=list(HISTOGRAM_COLUMNS))


def scatter_table(report: Union[BenchmarkReport, pd.DataFrame]) -> pd.DataFrame:
    """One row per (scenario, setting, baseline) where both errors exist."""
    frame = _frame(report)
    records: List[Tuple[str, int, str, float, float]] = []
    if not frame.empty:
        ours: Dict[Tuple[str, int], float] = {
            (r.scenario, int(r.setting)): float(r.ate_error)
            for r in frame[frame["method"] == "ours"].itertuples()
        }
        for baseline in METHOD_ORDER[1:]:
            rows = frame[frame["method"] == baseline].itertuples()
            for r in rows:
                key = (r.scenario, int(r.setting))
                if key in ours:
                    records.append(
                        (key[0], key[1], baseline, float(r.ate_error), ours[key])
                    )
        records.sort(key=lambda t: (t[0], t[1], METHOD_ORDER.index(t[2])))
    return pd.DataFrame(records, columns=list(SCATTER_COLUMNS))


def export_plot_data(
    report: Union[BenchmarkReport, pd.DataFrame],
    out_dir: Path,
    *,
    bin_width: Optional[float] = None,
) -> Dict[str, Path]:
    """Write `histogram.csv` and `scatter.csv` (header-only for empty reports).

    Args:
        report: A report, or a frame read back with `runner.read_report`.
        out_dir: Output directory (created when missing).
        bin_width: Fixed histogram bin width; None uses Freedman-Diaconis.

    Returns:
        Paths of the written files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"histogram": out / "histogram.csv", "scatter": out / "scatter.csv"}
    histogram_table(report, bin_width).to_csv(
        paths["histogram"], index=False, float_format="%.17g"
    )
    scatter_table(report).to_csv(paths["scatter"], index=False, float_format="%.17g")
    return paths
