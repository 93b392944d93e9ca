# graphical oracles used to define ground truth
# d-separation is a reachability sweep (Bayes-ball), linear in the edges
# the backdoor and Entner checks are thin wrappers around it

"""backdoorforge.graph

d-separation, the single-edge backdoor criterion and the graphical form of the
auxiliary-variable (Entner) criterion on a `GraphSpec`.
"""
from __future__ import annotations

from collections import deque
from typing import AbstractSet, Iterable, Set, Tuple

from .errors import GraphInputError
from .models import GraphSpec


def _check_query(g: GraphSpec, a: str, b: str, s: AbstractSet[str]) -> None:
    for node_id in (a, b, *s):
        g.node(node_id)
    if a == b:
        raise GraphInputError("d-separation needs two distinct nodes")
    if a in s or b in s:
        raise GraphInputError("query endpoints must not be in the conditioning set")


def d_separated(g: GraphSpec, a: str, b: str, s: Iterable[str] = ()) -> bool:
    """Check whether `a` and `b` are d-separated given `s`.

    Traverses active trails from `a`: chains and forks pass through nodes not in
    `s`; a collider passes only when it (or one of its descendants) is in `s`.

    Args:
        g: The graph.
        a: First endpoint.
        b: Second endpoint.
        s: Conditioning set.

    Returns:
        True if every path between `a` and `b` is blocked given `s`.

    Raises:
        GraphInputError: On unknown ids, `a == b`, or an endpoint inside `s`.
    """
    cond = frozenset(s)
    _check_query(g, a, b, cond)
    dag = g.dag
    # nodes whose descendants intersect `cond` (colliders that pass)
    opened = g.ancestors(cond)

    # "up": arrived from a child; "down": arrived from a parent
    queue: deque[Tuple[str, str]] = deque([(a, "up")])
    seen: Set[Tuple[str, str]] = set()
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in seen:
            continue
        seen.add((node, direction))
        if node == b:
            return False

        if direction == "up":
            if node in cond:
                continue
            for p in dag.predecessors(node):
                queue.append((p, "up"))
            for c in dag.successors(node):
                queue.append((c, "down"))
        else:
            if node not in cond:
                for c in dag.successors(node):
                    queue.append((c, "down"))
            if node in opened:
                for p in dag.predecessors(node):
                    queue.append((p, "up"))
    return True


def _check_adjustment(g: GraphSpec, zstar: Iterable[str]) -> frozenset:
    zs = frozenset(zstar)
    for z in zs:
        if g.node(z).role != "Z":
            raise GraphInputError(f"adjustment set may only hold Z nodes, got {z!r}")
    return zs


def is_valid_backdoor_set(g: GraphSpec, zstar: Iterable[str]) -> bool:
    """Backdoor criterion for the single edge X -> Y.

    Args:
        g: The graph.
        zstar: Candidate adjustment set (role-Z nodes only).

    Returns:
        True iff no member of `zstar` descends from X and `zstar` d-separates X
        from Y once the edge X -> Y is removed. Only that edge is cut, so a
        mediator X -> M -> Y leaves no valid set.

    Raises:
        GraphInputError: If `zstar` holds a non-Z node.
    """
    zs = _check_adjustment(g, zstar)
    x, y = g.treatment, g.outcome
    if zs & g.descendants(x):
        return False
    cut = g.without_edge(x, y) if g.dag.has_edge(x, y) else g
    return d_separated(cut, x, y, zs)


def entner_pair_holds(g: GraphSpec, w: str, zstar: Iterable[str]) -> bool:
    """Graphical version of the auxiliary-variable criterion.

    Args:
        g: The graph.
        w: The auxiliary node (role W).
        zstar: Candidate adjustment set (role-Z nodes only).

    Returns:
        True iff W is d-separated from Y given Z* plus X, and d-connected to Y
        given Z* alone.

    Raises:
        GraphInputError: If `w` is not the W node or `zstar` holds a non-Z node.
    """
    if g.node(w).role != "W":
        raise GraphInputError(f"{w!r} is not the auxiliary node")
    zs = _check_adjustment(g, zstar)
    y, x = g.outcome, g.treatment
    return d_separated(g, w, y, zs | {x}) and not d_separated(g, w, y, zs)
