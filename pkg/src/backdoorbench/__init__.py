# benchmark harness and command line on top of backdoorforge

from .config import ScenarioConfig, full_grid
from .plots import export_plot_data
from .runner import BenchmarkReport, ReportRow, run_benchmark, write_report

__all__ = [
    "BenchmarkReport",
    "ReportRow",
    "ScenarioConfig",
    "export_plot_data",
    "full_grid",
    "run_benchmark",
    "write_report",
]
