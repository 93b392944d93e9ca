# data models for graphs and datasets
# roles are explicit on every node, the W -> X -> Y ordering is assumed known
# Z blocks are kept as a label so the benchmark can report per block

"""backdoorforge.models

Core data models: role-tagged DAGs and role-tagged datasets.

A `GraphSpec` stores the causal graph the simulations are generated from and the
d-separation oracles run on. A `Dataset` is a numeric matrix whose columns carry
the same node ids and roles, so that discovery and baselines can find W, X, Y
and the candidate covariates without extra bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple

import networkx as nx
import numpy as np

from .errors import GraphInputError

Role = Literal["W", "X", "Y", "Z", "U"]
ROLES: Tuple[str, ...] = ("W", "X", "Y", "Z", "U")

Edge = Tuple[str, str]


@dataclass(frozen=True, slots=True)
class Node:
    """A graph node.

    Attributes:
        id: Opaque node identifier (also the dataset column name).
        role: One of "W", "X", "Y", "Z", "U".
        block: Optional block label (e.g. "Z2") grouping scalar nodes.
    """

    id: str
    role: Role
    block: Optional[str] = None


@dataclass(frozen=True, slots=True)
class RoleMap:
    """Which node ids play which role.

    Attributes:
        x: Treatment id.
        y: Outcome id.
        w: Auxiliary id, or None when the graph/dataset has none.
        z: Candidate covariate ids, in column order.
        blocks: Block label per covariate id (missing when unlabelled).
    """

    x: str
    y: str
    w: Optional[str]
    z: Tuple[str, ...]
    blocks: Dict[str, str] = field(default_factory=dict)

    def require_w(self) -> str:
        """Return the auxiliary id or raise if there is none."""
        if self.w is None:
            raise GraphInputError("an auxiliary variable W is required")
        return self.w


@dataclass(frozen=True, slots=True)
class GraphSpec:
    """A labelled DAG with node roles.

    Invariants checked on construction: acyclic edges, exactly one X and one Y,
    at most one W, no incoming edges into U nodes, and X -> Y present when
    `treatment_active` is set.

    Attributes:
        nodes: Nodes in a fixed order (this order is used for matrices).
        edges: Ordered (parent, child) pairs.
        treatment_active: Whether X must be a parent of Y.
    """

    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...]
    treatment_active: bool = True
    _dag: nx.DiGraph = field(init=False, repr=False, compare=False)
    _by_id: Dict[str, Node] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        nodes = tuple(self.nodes)
        edges = tuple((str(p), str(c)) for p, c in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

        ids = [n.id for n in nodes]
        if len(set(ids)) != len(ids):
            raise GraphInputError("node ids must be unique")
        for n in nodes:
            if n.role not in ROLES:
                raise GraphInputError(f"unknown role {n.role!r} for node {n.id!r}")

        dag = nx.DiGraph()
        dag.add_nodes_from(ids)
        for p, c in edges:
            if p not in dag or c not in dag:
                raise GraphInputError(f"edge ({p!r}, {c!r}) references an unknown node")
            if p == c:
                raise GraphInputError(f"self-loop on {p!r}")
            dag.add_edge(p, c)
        if len(set(edges)) != len(edges):
            raise GraphInputError("duplicate edges")
        if not nx.is_directed_acyclic_graph(dag):
            raise GraphInputError("edges contain a cycle")

        counts = {r: sum(1 for n in nodes if n.role == r) for r in ROLES}
        if counts["X"] != 1 or counts["Y"] != 1:
            raise GraphInputError("exactly one X and one Y node are required")
        if counts["W"] > 1:
            raise GraphInputError("at most one W node is allowed")
        for n in nodes:
            if n.role == "U" and dag.in_degree(n.id) > 0:
                raise GraphInputError(f"latent node {n.id!r} must be exogenous")

        object.__setattr__(self, "_dag", dag)
        object.__setattr__(self, "_by_id", {n.id: n for n in nodes})
        if self.treatment_active and not dag.has_edge(self.treatment, self.outcome):
            raise GraphInputError("treatment-active graph needs the edge X -> Y")

    # --- lookups -----------------------------------------------------------

    @property
    def dag(self) -> nx.DiGraph:
        """Read-only networkx view of the edge relation."""
        return self._dag

    @property
    def ids(self) -> Tuple[str, ...]:
        """Node ids in declaration order."""
        return tuple(n.id for n in self.nodes)

    def node(self, node_id: str) -> Node:
        """Look up a node by id.

        Raises:
            GraphInputError: If the id does not exist.
        """
        try:
            return self._by_id[node_id]
        except KeyError:
            raise GraphInputError(f"unknown node id {node_id!r}") from None

    def ids_with_role(self, role: str) -> Tuple[str, ...]:
        """All node ids with a given role, in declaration order."""
        return tuple(n.id for n in self.nodes if n.role == role)

    @property
    def treatment(self) -> str:
        return self.ids_with_role("X")[0]

    @property
    def outcome(self) -> str:
        return self.ids_with_role("Y")[0]

    @property
    def auxiliary(self) -> Optional[str]:
        w = self.ids_with_role("W")
        return w[0] if w else None

    def roles(self) -> RoleMap:
        """Role map over the observed nodes (U nodes excluded)."""
        z = self.ids_with_role("Z")
        blocks = {n.id: n.block for n in self.nodes if n.role == "Z" and n.block}
        return RoleMap(
            x=self.treatment, y=self.outcome, w=self.auxiliary, z=z, blocks=blocks
        )

    def parents(self, node_id: str) -> Tuple[str, ...]:
        """Parents of a node, in declaration order."""
        self.node(node_id)
        preds = set(self._dag.predecessors(node_id))
        return tuple(i for i in self.ids if i in preds)

    def children(self, node_id: str) -> Tuple[str, ...]:
        """Children of a node, in declaration order."""
        self.node(node_id)
        succ = set(self._dag.successors(node_id))
        return tuple(i for i in self.ids if i in succ)

    def ancestors(self, node_ids: Iterable[str]) -> FrozenSet[str]:
        """Ancestors of a set of nodes (the nodes themselves included)."""
        out = set()
        for i in node_ids:
            self.node(i)
            out.add(i)
            out |= nx.ancestors(self._dag, i)
        return frozenset(out)

    def descendants(self, node_id: str) -> FrozenSet[str]:
        """Strict descendants of a node."""
        self.node(node_id)
        return frozenset(nx.descendants(self._dag, node_id))

    def topological_order(self) -> Tuple[str, ...]:
        """Node ids in a deterministic topological order."""
        rank = {i: k for k, i in enumerate(self.ids)}
        return tuple(nx.lexicographical_topological_sort(self._dag, key=rank.get))

    def with_edge(self, parent: str, child: str) -> "GraphSpec":
        """Return a copy with one extra edge (validation re-runs)."""
        return GraphSpec(
            nodes=self.nodes,
            edges=self.edges + ((parent, child),),
            treatment_active=self.treatment_active,
        )

    def without_edge(self, parent: str, child: str) -> "GraphSpec":
        """Return a copy with one edge removed (treatment flag dropped)."""
        return GraphSpec(
            nodes=self.nodes,
            edges=tuple(e for e in self.edges if e != (parent, child)),
            treatment_active=False,
        )

    # --- serialization -----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the JSON shape `{"nodes": [...], "edges": [[p, c], ...]}`."""
        nodes: List[Dict[str, Any]] = []
        for n in self.nodes:
            entry: Dict[str, Any] = {"id": n.id, "role": n.role}
            if n.block is not None:
                entry["block"] = n.block
            nodes.append(entry)
        return {
            "nodes": nodes,
            "edges": [[p, c] for p, c in self.edges],
            "treatment_active": self.treatment_active,
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "GraphSpec":
        """Construct a GraphSpec from the dict produced by `to_dict()`.

        Raises:
            KeyError: If expected keys are missing.
            GraphInputError: If the graph violates an invariant.
        """
        nodes = tuple(
            Node(id=str(n["id"]), role=n["role"], block=n.get("block"))
            for n in data["nodes"]
        )
        edges = tuple((str(p), str(c)) for p, c in data["edges"])
        return GraphSpec(
            nodes=nodes,
            edges=edges,
            treatment_active=bool(data.get("treatment_active", True)),
        )


@dataclass(frozen=True, slots=True)
class Column:
    """Metadata for one dataset column."""

    id: str
    role: Role
    block: Optional[str] = None


@dataclass(frozen=True, slots=True, eq=False)
class Dataset:
    """A role-tagged numeric sample.

    Attributes:
        matrix: Array of shape (n, p).
        columns: One `Column` per matrix column.
        standardized: Whether columns were rescaled to unit sample variance.
        scale_factors: Pre-standardization standard deviations (ones otherwise).
        row_index: Row ids in the original generated pool, carried through splits.
    """

    matrix: np.ndarray
    columns: Tuple[Column, ...]
    standardized: bool = False
    scale_factors: Optional[np.ndarray] = None
    row_index: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("Dataset.matrix must be 2-D")
        cols = tuple(self.columns)
        if m.shape[1] != len(cols):
            raise ValueError("one Column per matrix column is required")
        ids = [c.id for c in cols]
        if len(set(ids)) != len(ids):
            raise ValueError("column ids must be unique")
        scales = (
            np.ones(m.shape[1])
            if self.scale_factors is None
            else np.asarray(self.scale_factors, dtype=float)
        )
        if scales.shape != (m.shape[1],) or np.any(scales <= 0):
            raise ValueError("scale_factors must be positive, one per column")
        rows = (
            np.arange(m.shape[0])
            if self.row_index is None
            else np.asarray(self.row_index, dtype=int)
        )
        if rows.shape != (m.shape[0],):
            raise ValueError("row_index must have one entry per row")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "scale_factors", scales)
        object.__setattr__(self, "row_index", rows)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def p(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(c.id for c in self.columns)

    def index_of(self, column_id: str) -> int:
        """Position of a column id.

        Raises:
            GraphInputError: If the id is not a column.
        """
        for k, c in enumerate(self.columns):
            if c.id == column_id:
                return k
        raise GraphInputError(f"unknown column id {column_id!r}")

    def column(self, column_id: str) -> np.ndarray:
        """One column as a 1-D array."""
        return self.matrix[:, self.index_of(column_id)]

    def ids_with_role(self, role: str) -> Tuple[str, ...]:
        return tuple(c.id for c in self.columns if c.role == role)

    def roles(self) -> RoleMap:
        """Role map of the observed columns.

        Raises:
            GraphInputError: If X or Y is missing or duplicated.
        """
        xs, ys, ws = (self.ids_with_role(r) for r in ("X", "Y", "W"))
        if len(xs) != 1 or len(ys) != 1 or len(ws) > 1:
            raise GraphInputError("dataset needs exactly one X, one Y, at most one W")
        blocks = {c.id: c.block for c in self.columns if c.role == "Z" and c.block}
        return RoleMap(
            x=xs[0],
            y=ys[0],
            w=ws[0] if ws else None,
            z=self.ids_with_role("Z"),
            blocks=blocks,
        )

    def select_rows(self, rows: np.ndarray) -> "Dataset":
        """Subset rows (positions into this dataset), keeping provenance."""
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            matrix=self.matrix[rows],
            columns=self.columns,
            standardized=self.standardized,
            scale_factors=self.scale_factors,
            row_index=self.row_index[rows],
        )

    def select_columns(self, column_ids: Iterable[str]) -> "Dataset":
        """Subset and reorder columns."""
        idx = [self.index_of(i) for i in column_ids]
        return Dataset(
            matrix=self.matrix[:, idx],
            columns=tuple(self.columns[k] for k in idx),
            standardized=self.standardized,
            scale_factors=self.scale_factors[idx],
            row_index=self.row_index,
        )

    def drop_latent(self) -> "Dataset":
        """Remove U-role columns."""
        return self.select_columns([c.id for c in self.columns if c.role != "U"])
