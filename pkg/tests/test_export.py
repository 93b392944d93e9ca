"""Tests for JSON and CSV import/export."""
from __future__ import annotations

import json

import numpy as np
import pytest

from backdoorforge.discovery import DiscoveryConfig, optimize, population_view
from backdoorforge.errors import ConfigError
from backdoorforge.export import (
    load_config,
    load_dataset_csv,
    load_graph,
    load_result,
    load_sem,
    read_json,
    roles_path_for,
    save_dataset_csv,
    save_json,
    to_json,
)
from backdoorforge.generation import sample_data
from backdoorforge.presets import BlockDims, make_simulation_sem


def test_sem_and_graph_json_round_trip(tmp_path):
    """A saved SEM loads back with the same graph and parameters."""
    sem = make_simulation_sem(BlockDims(z2=2), 1, sigma_x2=0.6, omega=0.5)
    path = tmp_path / "sem.json"
    save_json(sem, path)
    again = load_sem(path)
    assert again.graph == sem.graph
    assert again.coeffs == sem.coeffs
    assert again.noise_vars == sem.noise_vars
    assert load_graph(path) == sem.graph
    assert json.loads(to_json(sem))["coefficients"][0][:2] == list(sem.graph.edges[0])


def test_config_and_result_json_round_trip(tmp_path, two_equation_sem):
    """Discovery configs and results survive a JSON round trip."""
    cfg = DiscoveryConfig(lambda1=0.2, init_gamma=3, max_iters=50)
    save_json(cfg, tmp_path / "cfg.json")
    assert load_config(tmp_path / "cfg.json") == cfg

    res = optimize(population_view(two_equation_sem), cfg)
    save_json(res, tmp_path / "res.json")
    back = load_result(tmp_path / "res.json")
    np.testing.assert_allclose(back.beta, res.beta)
    assert back.selected_ids == res.selected_ids
    assert back.objective_terms == res.objective_terms
    assert back.config == cfg


def test_dataset_csv_round_trip(tmp_path, two_equation_sem):
    """Values, roles and blocks come back unchanged."""
    data = sample_data(two_equation_sem, 40, seed=0)
    csv = tmp_path / "data.csv"
    sidecar = save_dataset_csv(data, csv)
    assert sidecar == roles_path_for(csv) == tmp_path / "data.roles.json"
    back = load_dataset_csv(csv)
    assert back.ids == data.ids
    assert back.columns == data.columns
    np.testing.assert_array_equal(back.matrix, data.matrix)


def test_dataset_roles_accept_plain_strings_and_drop_unlisted(tmp_path):
    """A flat roles map works and unlisted columns are ignored."""
    csv = tmp_path / "d.csv"
    csv.write_text("W,X,Y,Z_a,note\n1,2,3,4,5\n2,3,5,7,1\n3,1,2,2,0\n")
    roles = tmp_path / "roles.json"
    roles.write_text(json.dumps({"W": "W", "X": "X", "Y": "Y", "Z_a": "Z"}))
    data = load_dataset_csv(csv, roles_path=roles)
    assert data.ids == ("W", "X", "Y", "Z_a")
    assert data.roles().z == ("Z_a",)


def test_dataset_roles_validation(tmp_path):
    """Unknown or latent roles and missing columns are configuration errors."""
    csv = tmp_path / "d.csv"
    csv.write_text("X,Y\n1,2\n2,1\n")
    bad = tmp_path / "bad.json"
    for payload in ({"X": "X", "Y": "Q"}, {"X": "X", "Y": "U"}, {"X": "X", "V": "Y"}):
        bad.write_text(json.dumps(payload))
        with pytest.raises(ConfigError):
            load_dataset_csv(csv, roles_path=bad)


def test_read_json_requires_an_object(tmp_path):
    """Top-level arrays are rejected."""
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        read_json(path)
