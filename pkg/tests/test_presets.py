"""Tests for the preset graphs and SEMs."""
from __future__ import annotations

import pytest

from backdoorforge.errors import ConfigError
from backdoorforge.presets import (
    TWO_EQUATION_BETA_YZ,
    NHS_DESCRIPTIONS,
    BlockDims,
    build_nhs_graph,
    build_simulation_graph,
    make_nhs_sem,
    make_simulation_sem,
    make_two_equation_sem,
)


def test_simulation_graph_size():
    """Unit blocks give nine nodes and eleven edges."""
    g = build_simulation_graph(BlockDims())
    assert len(g.nodes) == 9
    assert len(g.edges) == 11
    assert g.ids_with_role("U") == ("U_0", "U2_0")


def test_simulation_graph_scales_with_block_dims():
    """Blocks are fully connected to their parents and children."""
    dims = BlockDims(z1=2, z2=3, z3=1, z4=4, u=2, u2=1)
    g = build_simulation_graph(dims)
    assert len(g.ids_with_role("Z")) == 10
    assert len(g.parents("Z1_1")) == 1 + 2 + 1
    assert len(g.parents("X")) == 2 + 3 + 1
    assert len(g.parents("Y")) == 1 + 3 + 4 + 1


def test_block_dims_validation_and_round_trip():
    """Dimensions must be positive and survive a dict round trip."""
    with pytest.raises(ConfigError):
        BlockDims(z1=0)
    dims = BlockDims.uniform(3)
    assert BlockDims.from_dict(dims.to_dict()) == dims


def test_simulation_sem_fixes_treatment_parameters():
    """omega and sigma_x^2 are set exactly; the rest is seeded."""
    a = make_simulation_sem(BlockDims(), 4, sigma_x2=0.01, omega=0.1)
    b = make_simulation_sem(BlockDims(), 4, sigma_x2=0.6, omega=0.5)
    assert a.omega == 0.1 and b.omega == 0.5
    assert a.noise_vars["X"] == 0.01
    shared = [e for e in a.graph.edges if e != ("X", "Y")]
    assert all(a.coeffs[e] == b.coeffs[e] for e in shared)


def test_nhs_sem_defaults_and_overrides():
    """The fixture SEM is complete and accepts overrides."""
    g = build_nhs_graph()
    sem = make_nhs_sem(omega=0.7, coeffs={("W", "X"): 2.0}, noise_vars={"Y": 3.0})
    assert set(sem.coeffs) == set(g.edges)
    assert sem.omega == 0.7
    assert sem.coeffs[("W", "X")] == 2.0
    assert sem.noise_vars["Y"] == 3.0
    assert sem.noise_vars["X"] == 0.6
    assert {"W", "X", "Y", "Z1", "Z2"} <= set(NHS_DESCRIPTIONS)


def test_two_equation_sem_structure():
    """Only non-zero coefficients become edges."""
    sem = make_two_equation_sem()
    d = len(TWO_EQUATION_BETA_YZ)
    assert len(sem.graph.ids_with_role("Z")) == d
    assert sem.graph.parents("Z_3") == ()
    assert sem.graph.children("Z_3") == ()
    assert sem.coeffs[("Z_0", "X")] == pytest.approx(0.8 * 1.2)
    assert sem.omega == 0.5
    with pytest.raises(ConfigError):
        make_two_equation_sem((1.0, 2.0), (1.0,))
