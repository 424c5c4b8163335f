"""Edge contraction steps that reduce any loaded simplex to a generic one.

An edge of the minimal subtree can be pruned when it joins two same-team
vertices or has an endpoint carrying no team at all.  Contracting it (the
deeper endpoint melts into the shallower one, which keeps its label) lowers
the gap by exactly that edge's contribution and leaves every other edge's
partition sums untouched.  Iterating always terminates in a generically
labeled simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import EdgeNotInMinimalSubtree, NotPrunable
from .simplex import (
    LoadVector,
    NormalizedLoadVector,
    Simplex,
    edge_contribution,
    gap_by_edges,
    make_simplex,
)
from .tree import MetricTree, OrientedEdge, VertexId, build_tree, label_key

__all__ = ["PruneStep", "prunable_edges", "prune", "prune_to_generic"]


@dataclass(frozen=True)
class PruneStep:
    contracted_edge: OrientedEdge
    gap_decrease: float
    merged_vertex: VertexId


def prunable_edges(
    simplex: Simplex, load: Optional[LoadVector] = None
) -> Tuple[OrientedEdge, ...]:
    """Minimal-subtree edges satisfying either pruning condition.

    The load does not influence prunability; it is accepted so call sites
    can pass a loaded configuration through unchanged.
    """
    simplex.require_tree_host()
    sub = simplex.subtree
    out = []
    for e in sub.edges:
        px = simplex.parity(e.left)
        py = simplex.parity(e.right)
        if px is None or py is None or px == py:
            out.append(e)
    return tuple(out)


def prune(
    simplex: Simplex, load: NormalizedLoadVector, edge: OrientedEdge
) -> Tuple[Simplex, NormalizedLoadVector, PruneStep]:
    """Contract one prunable edge of the minimal subtree.

    The left endpoint x disappears; the right endpoint y survives, absorbing
    x's team membership and weight when x carried one.  The new gap equals
    the old gap minus the contracted edge's contribution, which is verified
    here to 1e-10 relative.
    """
    simplex.require_tree_host()
    sub = simplex.subtree
    simplex.edge_position(edge)
    x, y = edge.left, edge.right
    px, py = simplex.parity(x), simplex.parity(y)
    if not (px is None or py is None or px == py):
        raise NotPrunable(
            f"({x!r}, {y!r}) joins opposite teams; it cannot be contracted"
        )

    old_gap = gap_by_edges(simplex, load)
    decrease = edge_contribution(simplex, load, edge)

    new_vertices = [v for v in sub.vertices if v != x]
    new_edges = []
    for e in sub.edges:
        if e == edge:
            continue
        left = y if e.left == x else e.left
        right = y if e.right == x else e.right
        new_edges.append((left, right, e.weight))
    root = sub.root if sub.root != x else None
    if root is not None and len(new_vertices) > 1:
        degree = sum(1 for l, r, _w in new_edges if root in (l, r))
        if degree != 1:
            root = None
    new_tree = build_tree(new_vertices, new_edges, root=root)

    a_team = list(simplex.a_team)
    b_team = list(simplex.b_team)
    m = list(load.m)
    n = list(load.n)
    if px == "a":
        i = a_team.index(x)
        if py == "a":
            m[a_team.index(y)] += m[i]
            del a_team[i], m[i]
        else:  # y carries no team; it inherits x's slot
            a_team[i] = y
    elif px == "b":
        i = b_team.index(x)
        if py == "b":
            n[b_team.index(y)] += n[i]
            del b_team[i], n[i]
        else:
            b_team[i] = y
    # px is None: x simply vanishes and y keeps whatever it had.

    new_simplex = make_simplex(new_tree, a_team, b_team)
    new_load = NormalizedLoadVector(m, n)
    new_gap = gap_by_edges(new_simplex, new_load)
    if abs(new_gap - (old_gap - decrease)) > 1e-10 * old_gap:
        raise AssertionError(
            f"contraction changed the gap by {old_gap - new_gap!r}, "
            f"expected {decrease!r}"
        )
    step = PruneStep(contracted_edge=edge, gap_decrease=decrease, merged_vertex=y)
    return new_simplex, new_load, step


def prune_to_generic(
    simplex: Simplex, load: NormalizedLoadVector
) -> Tuple[Simplex, NormalizedLoadVector, Tuple[PruneStep, ...]]:
    """Contract prunable edges, deepest first, until none remain.

    The result is generically labeled; its gap is the starting gap minus
    the recorded decreases.
    """
    steps: List[PruneStep] = []
    current, weights = simplex, load
    while True:
        candidates = prunable_edges(current, weights)
        if not candidates:
            break
        sub = current.subtree
        chosen = sorted(
            candidates,
            key=lambda e: (-sub.hop_depth(e.left), label_key(e.left), label_key(e.right)),
        )[0]
        current, weights, step = prune(current, weights, chosen)
        steps.append(step)
    return current, weights, tuple(steps)
