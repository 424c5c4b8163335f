"""Generic labelings and the closed-form gap of a metric tree.

Labeling a tree's vertices by level parity (deepest level 0, root at the
top) makes adjacent vertices take opposite teams.  A bottom-up weighting
built from a parameter delta then balances every edge: at
``delta = 1 / sum(1/weight)`` over all edges the weighting is normalized,
and the resulting loaded simplex attains the tree's minimal gap

    gamma = (sum over edges of 1/weight)^(-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

from .errors import NoEdges, NonPositiveLoad, TooFewVertices
from .simplex import NormalizedLoadVector, Simplex, gap_by_edges, make_simplex
from .tree import MetricTree, VertexId, label_key, level_assignment

__all__ = [
    "GapReport",
    "generic_labeling",
    "is_generically_labeled",
    "generic_algorithm",
    "generic_delta",
    "positivity_threshold",
    "gamma_T",
    "equality_witness",
]

WITNESS_RTOL = 1e-10


@dataclass(frozen=True)
class GapReport:
    """Closed-form gap together with the weighting that attains it."""

    gamma: float
    delta_star: float
    simplex: Simplex
    weights: NormalizedLoadVector
    witness_gap: float


def _team_order(tree: MetricTree) -> Tuple[Tuple[VertexId, ...], Tuple[VertexId, ...]]:
    levels = level_assignment(tree)
    by_pos = sorted(tree.vertices, key=lambda v: (levels.level[v], label_key(v)))
    a_team = tuple(v for v in by_pos if levels.level[v] % 2 == 0)
    b_team = tuple(v for v in by_pos if levels.level[v] % 2 == 1)
    return a_team, b_team


def generic_labeling(tree: MetricTree) -> Simplex:
    """Split all vertices into teams by level parity (even levels team a)."""
    if len(tree.vertices) < 2:
        raise TooFewVertices("a generic labeling needs at least two vertices")
    a_team, b_team = _team_order(tree)
    return make_simplex(tree, a_team, b_team)


def is_generically_labeled(simplex: Simplex) -> bool:
    """True when the teams cover the whole minimal subtree and alternate.

    Equivalently: every minimal-subtree vertex carries a team, and the two
    endpoints of every minimal-subtree edge are on opposite teams.
    """
    simplex.require_tree_host()
    sub = simplex.subtree
    if set(simplex.points) != set(sub.vertices):
        return False
    for e in sub.edges:
        if simplex.parity(e.left) == simplex.parity(e.right):
            return False
    return True


def generic_algorithm(tree: MetricTree, delta: float) -> Dict[VertexId, float]:
    """Bottom-up weighting of the generic labeling, driven by ``delta > 0``.

    Below the top level each vertex v receives
    ``delta / weight(edge above v)`` plus the imbalance of the two team
    sums inside v's subtree; the root's weight then tops its own team up to
    total one.  All weights below the top level are positive for every
    delta; the root weight may be non-positive, which is reported in the
    returned mapping rather than raised.
    """
    if not delta > 0.0:
        raise NonPositiveLoad(f"delta = {delta!r} must be positive")
    if len(tree.vertices) < 2:
        raise TooFewVertices("the weighting needs at least one edge")
    levels = level_assignment(tree)
    parity = {v: levels.level[v] % 2 for v in tree.vertices}

    weights: Dict[VertexId, float] = {}
    sub_a: Dict[VertexId, float] = {}
    sub_b: Dict[VertexId, float] = {}
    order = sorted(tree.vertices, key=lambda v: (levels.level[v], label_key(v)))
    for v in order:
        below_a = 0.0
        below_b = 0.0
        for c in tree.children(v):
            below_a += sub_a[c] + (weights[c] if parity[c] == 0 else 0.0)
            below_b += sub_b[c] + (weights[c] if parity[c] == 1 else 0.0)
        sub_a[v] = below_a
        sub_b[v] = below_b
        if v == tree.root:
            same = below_a if parity[v] == 0 else below_b
            weights[v] = 1.0 - same
        else:
            e = tree.edge_above(v)
            if parity[v] == 0:
                weights[v] = below_b - below_a + delta / e.weight
            else:
                weights[v] = below_a - below_b + delta / e.weight
    return weights


def generic_delta(tree: MetricTree) -> float:
    """The delta at which the generic weighting is normalized."""
    if not tree.edges:
        raise NoEdges("the tree has no edges")
    return 1.0 / sum(1.0 / e.weight for e in tree.edges)


def positivity_threshold(tree: MetricTree) -> float:
    """Largest delta (exclusive) keeping every generic weight positive.

    Only the root weight can go non-positive; it stays positive exactly for
    delta below the reciprocal sum over all edges except the root's own.
    For a single-edge tree the threshold is infinite.
    """
    if not tree.edges:
        raise NoEdges("the tree has no edges")
    root_edge = tree.edge_above(tree.children(tree.root)[0])
    rest = [e for e in tree.edges if e != root_edge]
    if not rest:
        return math.inf
    return 1.0 / sum(1.0 / e.weight for e in rest)


def gamma_T(tree: MetricTree) -> GapReport:
    """Closed-form minimal gap of a tree, with its attaining witness."""
    if len(tree.vertices) < 2:
        raise TooFewVertices("gap quantities need at least two vertices")
    delta_star = generic_delta(tree)
    weights = generic_algorithm(tree, delta_star)
    simplex = generic_labeling(tree)
    m = [weights[v] for v in simplex.a_team]
    n = [weights[v] for v in simplex.b_team]
    load = NormalizedLoadVector(m, n)
    witness = gap_by_edges(simplex, load)
    if abs(witness - delta_star) > WITNESS_RTOL * delta_star:
        raise AssertionError(
            f"witness gap {witness!r} disagrees with closed form {delta_star!r}"
        )
    return GapReport(
        gamma=delta_star,
        delta_star=delta_star,
        simplex=simplex,
        weights=load,
        witness_gap=witness,
    )


def equality_witness(tree: MetricTree) -> Tuple[Simplex, NormalizedLoadVector]:
    """The loaded simplex attaining the tree's gap."""
    report = gamma_T(tree)
    return report.simplex, report.weights
