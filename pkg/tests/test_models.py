"""Tests for core data models.

These tests focus on:
- `GraphSpec` validation and lookups,
- `Dataset` role maps and row/column selection,
- dict round trips of both.
"""
from __future__ import annotations

import numpy as np
import pytest

from backdoorforge.errors import GraphInputError
from backdoorforge.models import Column, Dataset, GraphSpec, Node
from backdoorforge.presets import BlockDims, build_simulation_graph


def _nodes(*pairs):
    return tuple(Node(i, r) for i, r in pairs)


def test_graph_rejects_cycles():
    """A cyclic edge set is an input error."""
    with pytest.raises(GraphInputError):
        GraphSpec(
            nodes=_nodes(("X", "X"), ("Y", "Y"), ("Z", "Z")),
            edges=(("X", "Y"), ("Y", "Z"), ("Z", "X")),
        )


def test_graph_requires_one_treatment_and_outcome():
    """Exactly one X and one Y node must exist."""
    with pytest.raises(GraphInputError):
        GraphSpec(nodes=_nodes(("X", "X"), ("Z", "Z")), edges=())
    with pytest.raises(GraphInputError):
        GraphSpec(
            nodes=_nodes(("X", "X"), ("X2", "X"), ("Y", "Y")),
            edges=(("X", "Y"),),
        )


def test_graph_requires_treatment_edge_when_active():
    """A treatment-active graph must contain X -> Y."""
    nodes = _nodes(("X", "X"), ("Y", "Y"))
    with pytest.raises(GraphInputError):
        GraphSpec(nodes=nodes, edges=())
    g = GraphSpec(nodes=nodes, edges=(), treatment_active=False)
    assert g.treatment == "X" and g.outcome == "Y"


def test_latent_nodes_must_be_exogenous():
    """U nodes cannot have parents."""
    with pytest.raises(GraphInputError):
        GraphSpec(
            nodes=_nodes(("X", "X"), ("Y", "Y"), ("U", "U")),
            edges=(("X", "U"), ("X", "Y")),
        )


def test_graph_lookups_follow_declaration_order():
    """Roles, parents and the topological order are deterministic."""
    g = build_simulation_graph(BlockDims())
    roles = g.roles()
    assert (roles.x, roles.y, roles.w) == ("X", "Y", "W")
    assert roles.z == ("Z1_0", "Z2_0", "Z3_0", "Z4_0")
    assert roles.blocks["Z3_0"] == "Z3"
    assert g.parents("X") == ("Z2_0", "Z3_0", "U_0")
    order = g.topological_order()
    assert order.index("X") < order.index("Y")
    assert g.topological_order() == order
    assert "Y" in g.descendants("X")
    assert "U_0" in g.ancestors(["X"])


def test_graph_dict_round_trip():
    """`from_dict(to_dict())` reproduces the same graph."""
    g = build_simulation_graph(BlockDims(z1=2, z4=3))
    again = GraphSpec.from_dict(g.to_dict())
    assert again == g
    assert again.node("Z4_2").block == "Z4"


def test_without_edge_drops_treatment_flag():
    """Removing X -> Y yields a graph that no longer requires it."""
    g = build_simulation_graph(BlockDims())
    cut = g.without_edge("X", "Y")
    assert not cut.treatment_active
    assert ("X", "Y") not in cut.edges


def _dataset(n: int = 6) -> Dataset:
    cols = (
        Column("W", "W"),
        Column("X", "X"),
        Column("Y", "Y"),
        Column("Z_a", "Z", "A"),
        Column("Z_b", "Z"),
    )
    return Dataset(matrix=np.arange(n * 5, dtype=float).reshape(n, 5), columns=cols)


def test_dataset_role_map():
    """The role map lists Z columns in column order with their blocks."""
    roles = _dataset().roles()
    assert (roles.x, roles.y, roles.w) == ("X", "Y", "W")
    assert roles.z == ("Z_a", "Z_b")
    assert roles.blocks == {"Z_a": "A"}


def test_dataset_select_rows_keeps_provenance():
    """Row selection composes and keeps the original row ids."""
    data = _dataset(10)
    part = data.select_rows(np.array([7, 2, 5]))
    assert list(part.row_index) == [7, 2, 5]
    again = part.select_rows(np.array([1]))
    assert list(again.row_index) == [2]
    assert np.array_equal(again.matrix[0], data.matrix[2])


def test_dataset_validation():
    """Shape mismatches and non-positive scale factors are rejected."""
    with pytest.raises(ValueError):
        Dataset(matrix=np.zeros((3, 2)), columns=(Column("X", "X"),))
    with pytest.raises(ValueError):
        Dataset(
            matrix=np.zeros((3, 2)),
            columns=(Column("X", "X"), Column("Y", "Y")),
            scale_factors=np.array([1.0, 0.0]),
        )
    with pytest.raises(GraphInputError):
        Dataset(matrix=np.zeros((3, 1)), columns=(Column("X", "X"),)).roles()
