"""Tests for the `backdoorbench` command line."""
from __future__ import annotations

import json

import pytest

from backdoorbench.cli import build_parser, main, scenario_from_args
from backdoorforge.constants import RIDGE_EPS
from backdoorforge.export import load_dataset_csv, load_result, load_sem


def _simulate(tmp_path, *extra):
    csv = tmp_path / "data.csv"
    code = main(
        ["simulate", "--preset", "two-equation", "--n", "800", "--out", str(csv)]
        + list(extra)
    )
    assert code == 0
    return csv


def test_simulate_writes_data_roles_and_sem(tmp_path):
    """`simulate` writes the CSV, its roles sidecar and optionally the SEM."""
    sem_path = tmp_path / "sem.json"
    csv = _simulate(tmp_path, "--sem-out", str(sem_path), "--standardize")
    assert (tmp_path / "data.roles.json").exists()
    data = load_dataset_csv(csv)
    assert data.n == 800
    assert data.roles().w == "W"
    assert load_sem(sem_path).omega == 0.5


def test_estimate_and_discover(tmp_path, capsys):
    """`estimate` and `discover` print their results."""
    csv = _simulate(tmp_path)
    assert main(["estimate", "--data", str(csv), "--zstar", "Z_0,Z_1,Z_2",
                 "--truth", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "ate:" in out and "ate_error:" in out

    result = tmp_path / "result.json"
    assert main(["discover", "--data", str(csv), "--max-iters", "100",
                 "--out", str(result)]) == 0
    out = capsys.readouterr().out
    assert "selected:" in out and "converged:" in out
    assert load_result(result).config.max_iters == 100


def test_discover_with_tuning(tmp_path, capsys):
    """`--tune` cross-validates the grids before the final fit."""
    csv = _simulate(tmp_path)
    code = main(
        ["discover", "--data", str(csv), "--tune", "--lambda1-grid", "0.05,0.2",
         "--init-grid", "ols,1", "--max-iters", "50"]
    )
    assert code == 0
    assert "selected:" in capsys.readouterr().out


def test_benchmark_config_file_wins_over_flags(tmp_path, capsys):
    """Values from `--config` override command-line flags."""
    cfg = tmp_path / "scenario.json"
    cfg.write_text(
        json.dumps(
            {
                "name": "cli",
                "n_settings": 1,
                "n_total": 300,
                "methods": ["marginal", "allz"],
                "block_dims": {"z1": 1, "z2": 1, "z3": 1, "z4": 1, "u": 1, "u2": 1},
            }
        )
    )
    out_dir = tmp_path / "bench"
    code = main(
        ["benchmark", "--config", str(cfg), "--n-settings", "5", "--out", str(out_dir)]
    )
    assert code == 0
    report = (out_dir / "report.csv").read_text().splitlines()
    assert len(report) == 1 + 2
    assert "cli/sx2=0.6/omega=0.5" in capsys.readouterr().out

    plots = tmp_path / "plots"
    code = main(
        ["export-plots", "--report", str(out_dir / "report.csv"), "--out", str(plots)]
    )
    assert code == 0
    assert (plots / "histogram.csv").exists() and (plots / "scatter.csv").exists()


def test_configuration_errors_exit_with_code_2(tmp_path, capsys):
    """Unknown keys and malformed JSON are reported, not raised."""
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert main(["benchmark", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "colour" in capsys.readouterr().err

    bad.write_text("{not json")
    assert main(["benchmark", "--config", str(bad), "--out", str(tmp_path)]) == 2

    roles = tmp_path / "d.roles.json"
    (tmp_path / "d.csv").write_text("X,Y\n1,2\n2,1\n")
    roles.write_text(json.dumps({"X": "X", "Y": "Q"}))
    assert main(["estimate", "--data", str(tmp_path / "d.csv")]) == 2


def test_parser_requires_a_verb():
    """Running without a subcommand is a usage error."""
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_benchmark_flags_reach_the_scenario():
    """Every tuning and baseline flag ends up in the ScenarioConfig."""
    args = build_parser().parse_args(
        ["benchmark", "--sign-flip-prob", "0.3", "--lambda1-grid", "0.01,0.1",
         "--eta-grid", "0.25,1", "--init-grid", "ols,3", "--lambda2", "0.001",
         "--cv-folds", "4", "--alpha-test", "0.01", "--ridge", "0.5",
         "--entner-alpha", "0.2", "--graph-kind", "nhs"]
    )
    cfg = scenario_from_args(args)
    assert cfg.sign_flip_prob == 0.3
    assert cfg.lambda1_grid == (0.01, 0.1)
    assert cfg.eta_grid == (0.25, 1.0)
    assert cfg.init_grid == ("ols", 3)
    assert cfg.lambda2 == 0.001 and cfg.cv_folds == 4
    assert cfg.alpha_test == 0.01 and cfg.entner_alpha == 0.2
    assert cfg.ridge == 0.5
    assert cfg.graph_kind == "nhs"


def test_bare_ridge_flag_uses_the_small_default():
    """`--ridge` alone applies the tiny ridge; without it there is none."""
    parser = build_parser()
    bare = scenario_from_args(parser.parse_args(["benchmark", "--ridge"]))
    assert bare.ridge == RIDGE_EPS
    assert scenario_from_args(parser.parse_args(["benchmark"])).ridge == 0.0
