"""Brute-force reference implementations used by the tests.

d-separation by enumerating every simple path of the skeleton, and small random
graphs / SEMs to run the oracles on.
"""
from __future__ import annotations

from typing import FrozenSet, Iterable, List, Tuple

import networkx as nx
import numpy as np

from backdoorforge.models import GraphSpec, Node
from backdoorforge.sem import LinearSem


def all_paths(g: GraphSpec, a: str, b: str) -> List[List[str]]:
    """Every simple path between `a` and `b`, ignoring edge directions."""
    skeleton = g.dag.to_undirected()
    return [list(p) for p in nx.all_simple_paths(skeleton, a, b)]


def path_active(g: GraphSpec, path: List[str], s: FrozenSet[str]) -> bool:
    """Whether one path is open given `s` (collider / descendant rule)."""
    dag = g.dag
    for k in range(1, len(path) - 1):
        prev, node, nxt = path[k - 1], path[k], path[k + 1]
        collider = dag.has_edge(prev, node) and dag.has_edge(nxt, node)
        if collider:
            if node not in s and not (g.descendants(node) & s):
                return False
        elif node in s:
            return False
    return True


def d_separated_bruteforce(g: GraphSpec, a: str, b: str, s: Iterable[str]) -> bool:
    cond = frozenset(s)
    return not any(path_active(g, p, cond) for p in all_paths(g, a, b))


def random_dag(
    rng: np.random.Generator,
    n_nodes: int,
    p_edge: float = 0.35,
    *,
    force_treatment: bool = False,
) -> GraphSpec:
    """Random DAG over X, Y and Z0..Z{n-3}.

    With `force_treatment`, X precedes Y in the causal order and X -> Y is
    always present.
    """
    ids = ["X", "Y"] + [f"Z{k}" for k in range(n_nodes - 2)]
    roles = {"X": "X", "Y": "Y"}
    order = list(rng.permutation(n_nodes))
    if force_treatment and order.index(0) > order.index(1):
        i, j = order.index(0), order.index(1)
        order[i], order[j] = order[j], order[i]
    edges: List[Tuple[str, str]] = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            p, c = ids[order[i]], ids[order[j]]
            if (p, c) == ("X", "Y") and force_treatment:
                continue
            if rng.random() < p_edge:
                edges.append((p, c))
    if force_treatment:
        edges.append(("X", "Y"))
    nodes = tuple(Node(i, roles.get(i, "Z")) for i in ids)  # type: ignore[arg-type]
    return GraphSpec(nodes=nodes, edges=tuple(edges), treatment_active=force_treatment)


def random_sem(rng: np.random.Generator, g: GraphSpec) -> LinearSem:
    """Coefficients of magnitude in [0.3, 1.0] with random signs, unit noise."""
    mags = rng.uniform(0.3, 1.0, len(g.edges))
    signs = rng.choice([-1.0, 1.0], len(g.edges))
    coeffs = {e: float(m * s) for e, m, s in zip(g.edges, mags, signs)}
    return LinearSem(graph=g, coeffs=coeffs, noise_vars={i: 1.0 for i in g.ids})


def random_spd(rng: np.random.Generator, p: int) -> np.ndarray:
    """A well-conditioned random covariance matrix."""
    a = rng.standard_normal((p, 2 * p))
    return a @ a.T / (2 * p) + 0.5 * np.eye(p)
