"""Finite metric spaces as validated distance matrices."""

from __future__ import annotations

from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidExponent, InvalidMetric, UnknownVertex
from .tree import MetricTree, VertexId, label_key

__all__ = ["FiniteMetric", "metric_from_tree", "power_matrix"]

_SLACK = 1e-12


class FiniteMetric:
    """A finite metric space: labels plus a symmetric distance matrix.

    Construction checks symmetry, a zero diagonal, positive off-diagonal
    entries, and the triangle inequality, each with relative slack 1e-12.
    """

    def __init__(self, labels: Sequence[VertexId], matrix):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise InvalidMetric("labels are not pairwise distinct")
        if len(labels) == 0:
            raise InvalidMetric("a metric space needs at least one point")
        d = np.array(matrix, dtype=float)
        n = len(labels)
        if d.shape != (n, n):
            raise InvalidMetric(f"matrix shape {d.shape} does not match {n} labels")
        if not np.all(np.isfinite(d)):
            raise InvalidMetric("distances must be finite")
        scale = float(np.max(np.abs(d))) if n > 1 else 1.0
        slack = _SLACK * max(scale, 1.0)
        if np.max(np.abs(d - d.T)) > slack:
            raise InvalidMetric("matrix is not symmetric")
        d = (d + d.T) / 2.0
        if np.max(np.abs(np.diag(d))) > slack:
            raise InvalidMetric("diagonal is not zero")
        np.fill_diagonal(d, 0.0)
        off = d[~np.eye(n, dtype=bool)]
        if off.size and np.min(off) <= 0.0:
            raise InvalidMetric("off-diagonal distances must be positive")
        # d(i,k) <= d(i,j) + d(j,k) for every j, with slack.
        for j in range(n):
            via = d[:, j][:, None] + d[j, :][None, :]
            if np.min(via - d) < -slack:
                raise InvalidMetric(f"triangle inequality fails through point {labels[j]!r}")
        d.setflags(write=False)
        self.labels = labels
        self._d = d
        self._index: Dict[VertexId, int] = {v: i for i, v in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, v: VertexId) -> bool:
        return v in self._index

    def check_vertex(self, v: VertexId) -> None:
        if v not in self._index:
            raise UnknownVertex(f"point {v!r} is not in the metric space")

    def index(self, v: VertexId) -> int:
        self.check_vertex(v)
        return self._index[v]

    @property
    def matrix(self) -> np.ndarray:
        return self._d

    def distance(self, u: VertexId, v: VertexId) -> float:
        return float(self._d[self.index(u), self.index(v)])

    def __repr__(self) -> str:
        return f"FiniteMetric({len(self.labels)} points)"


def metric_from_tree(
    tree: MetricTree, subset: Optional[Iterable[VertexId]] = None
) -> FiniteMetric:
    """Restrict a tree's geodesic metric to a vertex subset (default: all)."""
    if subset is None:
        labels = tree.vertices
    else:
        labels = tuple(sorted(set(subset), key=label_key))
        for v in labels:
            tree.check_vertex(v)
    n = len(labels)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = tree.distance(labels[i], labels[j])
    return FiniteMetric(labels, d)


def power_matrix(d: np.ndarray, p: float) -> np.ndarray:
    """Entrywise d**p with the convention 0**p = 0, including p = 0."""
    if p < 0:
        raise InvalidExponent(f"exponent p = {p} is negative")
    out = np.zeros_like(np.asarray(d, dtype=float))
    mask = np.asarray(d) > 0.0
    out[mask] = np.asarray(d, dtype=float)[mask] ** p
    return out
