"""Finite metric trees with positive edge weights, oriented toward a root leaf.

A tree is stored with every edge pointing at the root: the *left* endpoint of
an oriented edge is the one farther from the root, the *right* endpoint is its
parent.  Distances are geodesic sums of edge weights.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    CycleDetected,
    Disconnected,
    EmptyVertexSet,
    NonPositiveWeight,
    RootNotLeaf,
    UnknownEdge,
    UnknownVertex,
)

__all__ = [
    "VertexId",
    "OrientedEdge",
    "MetricTree",
    "LevelAssignment",
    "build_tree",
    "path_distance",
    "minimal_subtree",
    "level_assignment",
    "left_right_sets",
]

VertexId = Hashable


def label_key(v: VertexId) -> str:
    """Deterministic ordering key: labels compare by their string form."""
    return str(v)


class OrientedEdge(NamedTuple):
    """Edge (left, right, weight) with ``left`` strictly farther from the root."""

    left: VertexId
    right: VertexId
    weight: float


@dataclass(frozen=True)
class LevelAssignment:
    """Hop levels counted downward from the deepest vertex.

    ``k0`` is the largest hop distance from the root; a vertex at hop
    distance h sits at level ``k0 - h``, so the root is the unique vertex
    at level ``k0`` and the deepest vertices are at level 0.
    """

    k0: int
    level: Dict[VertexId, int]


class MetricTree:
    """Immutable rooted metric tree.  Build through :func:`build_tree`."""

    def __init__(
        self,
        vertices: Tuple[VertexId, ...],
        root: VertexId,
        parent_edge: Dict[VertexId, OrientedEdge],
        hop_depth: Dict[VertexId, int],
    ):
        self.vertices = vertices
        self.root = root
        self._parent_edge = parent_edge
        self._hop = hop_depth
        children: Dict[VertexId, list] = {v: [] for v in vertices}
        for v, e in parent_edge.items():
            children[e.right].append(v)
        self._children = {
            v: tuple(sorted(kids, key=label_key)) for v, kids in children.items()
        }
        self.edges: Tuple[OrientedEdge, ...] = tuple(
            parent_edge[v] for v in sorted(parent_edge, key=label_key)
        )
        wdepth: Dict[VertexId, float] = {root: 0.0}
        for v in sorted(vertices, key=lambda u: hop_depth[u]):
            if v != root:
                e = parent_edge[v]
                wdepth[v] = wdepth[e.right] + e.weight
        self._wdepth = wdepth

    # -- basic queries ----------------------------------------------------

    def __contains__(self, v: VertexId) -> bool:
        return v in self._hop

    def __len__(self) -> int:
        return len(self.vertices)

    def check_vertex(self, v: VertexId) -> None:
        if v not in self._hop:
            raise UnknownVertex(f"vertex {v!r} is not in the tree")

    def degree(self, v: VertexId) -> int:
        self.check_vertex(v)
        return len(self._children[v]) + (0 if v == self.root else 1)

    def is_leaf(self, v: VertexId) -> bool:
        return self.degree(v) == 1 or len(self.vertices) == 1

    def leaves(self) -> Tuple[VertexId, ...]:
        if len(self.vertices) == 1:
            return (self.root,)
        return tuple(v for v in self.vertices if self.degree(v) == 1)

    def neighbors(self, v: VertexId) -> Tuple[VertexId, ...]:
        self.check_vertex(v)
        out = list(self._children[v])
        if v != self.root:
            out.append(self._parent_edge[v].right)
        return tuple(sorted(out, key=label_key))

    def children(self, v: VertexId) -> Tuple[VertexId, ...]:
        self.check_vertex(v)
        return self._children[v]

    def edge_above(self, v: VertexId) -> OrientedEdge:
        """The unique oriented edge whose left endpoint is ``v``."""
        self.check_vertex(v)
        if v == self.root:
            raise UnknownEdge("the root has no edge above it")
        return self._parent_edge[v]

    def hop_depth(self, v: VertexId) -> int:
        self.check_vertex(v)
        return self._hop[v]

    def total_weight(self) -> float:
        return sum(e.weight for e in self.edges)

    # -- geometry ---------------------------------------------------------

    def distance(self, u: VertexId, v: VertexId) -> float:
        """Geodesic distance: sum of edge weights on the unique u-v path."""
        self.check_vertex(u)
        self.check_vertex(v)
        a, b = u, v
        dist = 0.0
        while a != b:
            if self._hop[a] >= self._hop[b]:
                e = self._parent_edge[a]
                dist += e.weight
                a = e.right
            else:
                e = self._parent_edge[b]
                dist += e.weight
                b = e.right
        return dist

    def path_vertices(self, u: VertexId, v: VertexId) -> Tuple[VertexId, ...]:
        """Vertices on the u-v geodesic, endpoints included."""
        self.check_vertex(u)
        self.check_vertex(v)
        up, down = [u], [v]
        a, b = u, v
        while a != b:
            if self._hop[a] >= self._hop[b]:
                a = self._parent_edge[a].right
                up.append(a)
            else:
                b = self._parent_edge[b].right
                down.append(b)
        return tuple(up[:-1] + down[::-1])

    def subtree_vertices(self, v: VertexId) -> FrozenSet[VertexId]:
        """``v`` together with everything below it (away from the root)."""
        self.check_vertex(v)
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for c in self._children[x]:
                seen.add(c)
                queue.append(c)
        return frozenset(seen)

    def __repr__(self) -> str:
        return (
            f"MetricTree({len(self.vertices)} vertices, "
            f"{len(self.edges)} edges, root={self.root!r})"
        )


def build_tree(
    vertex_ids: Iterable[VertexId],
    edges: Iterable[Tuple[VertexId, VertexId, float]],
    root: Optional[VertexId] = None,
) -> MetricTree:
    """Validate an undirected weighted edge list and orient it toward a root.

    The root defaults to the lexicographically smallest leaf.  An explicit
    root must be a leaf (single-vertex trees are the only exception, where
    the lone vertex is its own root).
    """
    vertices = tuple(sorted(set(vertex_ids), key=label_key))
    if not vertices:
        raise EmptyVertexSet("a tree needs at least one vertex")
    vertex_set = set(vertices)

    adjacency: Dict[VertexId, Dict[VertexId, float]] = {v: {} for v in vertices}
    n_edges = 0
    for u, v, w in edges:
        if u not in vertex_set:
            raise UnknownVertex(f"edge endpoint {u!r} is not a declared vertex")
        if v not in vertex_set:
            raise UnknownVertex(f"edge endpoint {v!r} is not a declared vertex")
        if not (w > 0.0):
            raise NonPositiveWeight(f"edge ({u!r}, {v!r}) has weight {w!r}")
        if u == v:
            raise CycleDetected(f"self-loop at {u!r}")
        if v in adjacency[u]:
            raise CycleDetected(f"edge ({u!r}, {v!r}) appears more than once")
        adjacency[u][v] = float(w)
        adjacency[v][u] = float(w)
        n_edges += 1

    if n_edges >= len(vertices) and len(vertices) > 1:
        raise CycleDetected(
            f"{n_edges} edges on {len(vertices)} vertices cannot be acyclic"
        )

    # Pick the root before traversal so orientation happens once.
    if root is None:
        if len(vertices) == 1:
            root = vertices[0]
        else:
            leaf_candidates = [v for v in vertices if len(adjacency[v]) == 1]
            if not leaf_candidates:
                raise CycleDetected("no leaf exists; the graph contains a cycle")
            root = min(leaf_candidates, key=label_key)
    else:
        if root not in vertex_set:
            raise UnknownVertex(f"root {root!r} is not a declared vertex")
        if len(vertices) > 1 and len(adjacency[root]) != 1:
            raise RootNotLeaf(
                f"root {root!r} has degree {len(adjacency[root])}, expected 1"
            )

    parent_edge: Dict[VertexId, OrientedEdge] = {}
    hop: Dict[VertexId, int] = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y, w in adjacency[x].items():
            if y in hop:
                if x != root and y != parent_edge[x].right:
                    raise CycleDetected(f"cycle through ({x!r}, {y!r})")
                continue
            hop[y] = hop[x] + 1
            parent_edge[y] = OrientedEdge(y, x, w)
            queue.append(y)

    if len(hop) != len(vertices):
        missing = sorted(vertex_set - set(hop), key=label_key)
        raise Disconnected(f"vertices {missing!r} are not reachable from {root!r}")

    return MetricTree(vertices, root, parent_edge, hop)


def path_distance(tree: MetricTree, u: VertexId, v: VertexId) -> float:
    """Geodesic distance between two vertices."""
    return tree.distance(u, v)


def minimal_subtree(tree: MetricTree, subset: Iterable[VertexId]) -> MetricTree:
    """Smallest subtree containing every vertex of ``subset``.

    When the host root lies in the subtree it stays the root, so edge
    orientations carry over unchanged (the host root is a leaf, and a
    geodesic only reaches a leaf as an endpoint, so it is a valid choice).
    Otherwise the result is re-rooted at its lexicographically smallest
    leaf, which is always a member of the subset.
    """
    members = tuple(sorted(set(subset), key=label_key))
    if not members:
        raise EmptyVertexSet("the vertex subset is empty")
    for v in members:
        tree.check_vertex(v)

    # The union of geodesics from each member to a fixed anchor is exactly
    # the minimal subtree: every such vertex is forced, and the union is
    # connected and contains the subset.
    anchor = members[0]
    keep = set()
    for v in members:
        keep.update(tree.path_vertices(v, anchor))

    sub_edges = [
        (e.left, e.right, e.weight)
        for e in tree.edges
        if e.left in keep and e.right in keep
    ]
    return build_tree(keep, sub_edges, root=tree.root if tree.root in keep else None)


def level_assignment(tree: MetricTree) -> LevelAssignment:
    """Levels counted from the deepest vertex: level(v) = k0 - hops-to-root."""
    k0 = max(tree.hop_depth(v) for v in tree.vertices)
    level = {v: k0 - tree.hop_depth(v) for v in tree.vertices}
    return LevelAssignment(k0=k0, level=level)


def left_right_sets(
    tree: MetricTree, edge: OrientedEdge
) -> Tuple[FrozenSet[VertexId], FrozenSet[VertexId], FrozenSet[VertexId], FrozenSet[VertexId]]:
    """Partition of the vertex set induced by deleting ``edge``.

    Returns ``(L, R, L_strict, R_strict)``: the left side contains the left
    endpoint and everything below it, the right side the rest; the strict
    variants drop the respective endpoint.
    """
    if edge.left not in tree or tree._parent_edge.get(edge.left) != edge:
        raise UnknownEdge(f"{edge!r} is not an oriented edge of the tree")
    left = tree.subtree_vertices(edge.left)
    right = frozenset(tree.vertices) - left
    return left, right, left - {edge.left}, right - {edge.right}
