"""Negative-type verdicts, maximal exponents, and interval bounds.

A finite metric space has p-negative type when the matrix of distances
raised to the p-th power is negative semidefinite on the hyperplane of
mean-zero vectors; strictness means negative definite there.  The verdict
comes from the largest restricted eigenvalue.  The supremum of admissible
exponents is located by bisection; for metric trees explicit strictness
intervals around p = 1 and closed-form star values are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    CapReached,
    DegenerateMetric,
    DuplicateVertex,
    InvalidExponent,
    NonZeroSum,
    TooFewLeaves,
    TooFewPoints,
    TooSmall,
    ZeroVector,
)
from .generic import gamma_T
from .metric import FiniteMetric, power_matrix
from .simplex import eta_to_simplex
from .tree import MetricTree, VertexId, build_tree

__all__ = [
    "NegTypeVerdict",
    "MaxPEstimate",
    "has_p_negative_type",
    "has_strict_p_negative_type",
    "generalized_roundness_check",
    "max_negative_type",
    "zeta_lower_bound",
    "tree_maxp_lower_bound",
    "star_max_p",
    "build_star",
    "build_necklace",
    "verify_enhanced_inequality",
    "is_equality_witness",
]

DEFAULT_EIG_TOL = 1e-9
BISECTION_CAP = 64.0


@dataclass(frozen=True)
class NegTypeVerdict:
    """Outcome of the restricted-eigenvalue test at one exponent.

    ``status`` is one of ``strict`` (largest eigenvalue clearly negative),
    ``fails`` (clearly positive), ``non_strict`` (zero up to rounding noise,
    so the form holds without being strict), or ``marginal`` (inside the
    tolerance band but positive beyond rounding noise: too close to zero to
    call).  ``certificate`` is a mean-zero unit vector achieving
    ``lambda_max``, aligned with the metric's labels; None when strict.
    """

    status: str
    lambda_max: float
    certificate: Optional[np.ndarray]


@dataclass(frozen=True)
class MaxPEstimate:
    p_star: float
    bracket_width: float
    verdict_at_p_star: NegTypeVerdict


def _mean_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the sum-zero hyperplane (Helmert construction)."""
    basis = np.zeros((n, n - 1))
    for k in range(1, n):
        norm = math.sqrt(k * (k + 1))
        basis[:k, k - 1] = 1.0 / norm
        basis[k, k - 1] = -k / norm
    return basis


def has_p_negative_type(
    metric: FiniteMetric, p: float, tol: float = DEFAULT_EIG_TOL
) -> NegTypeVerdict:
    """Classify the p-th power distance form on mean-zero vectors.

    The band ``[-tol*s, tol*s]`` around zero, with s the largest matrix
    entry, is treated as numerically indistinguishable from zero.
    """
    if p < 0:
        raise InvalidExponent(f"exponent p = {p} is negative")
    n = len(metric)
    if n < 2:
        raise TooFewPoints("the verdict needs at least two points")
    mp = power_matrix(metric.matrix, p)
    scale = float(mp.max())
    basis = _mean_zero_basis(n)
    restricted = basis.T @ mp @ basis
    restricted = (restricted + restricted.T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(restricted)
    lam = float(eigenvalues[-1])
    band = tol * scale
    if lam < -band:
        return NegTypeVerdict(status="strict", lambda_max=lam, certificate=None)
    eta = basis @ eigenvectors[:, -1]
    eta = eta - eta.mean()
    eta = eta / np.linalg.norm(eta)
    eta.setflags(write=False)
    # Exact zero eigenvalues land within a few ulps of 0 after eigh, far
    # below any sensible band, so they can be named without guessing.
    noise = min(band, 1e-12 * scale)
    if lam > band:
        status = "fails"
    elif lam <= noise:
        status = "non_strict"
    else:
        status = "marginal"
    return NegTypeVerdict(status=status, lambda_max=lam, certificate=eta)


def has_strict_p_negative_type(
    metric: FiniteMetric, p: float, tol: float = DEFAULT_EIG_TOL
) -> bool:
    return has_p_negative_type(metric, p, tol).status == "strict"


def generalized_roundness_check(
    metric: FiniteMetric,
    p: float,
    trials: int = 200,
    seed: int = 0,
    max_team: int = 6,
) -> Tuple[bool, float]:
    """Randomized two-team inequality check with repetitions allowed.

    Samples random equal-size multisets (a_1..a_k), (b_1..b_k) of points
    and compares within-team against cross-team p-th power distance sums.
    Returns (all margins nonnegative up to 1e-9 of the largest entry,
    worst margin).  A negative worst margin certifies failure of
    p-negative type: the signed weighting +1 on the a's and -1 on the b's
    is mean-zero precisely because the teams have equal size, and its
    quadratic form is twice the negated margin.  Unequal unweighted teams
    admit negative margins even on spaces of strict p-negative type, so
    they are never sampled.  The converse direction is only evidence,
    not proof.
    """
    if p < 0:
        raise InvalidExponent(f"exponent p = {p} is negative")
    n = len(metric)
    if n < 2:
        raise TooFewPoints("sampling needs at least two points")
    dp = power_matrix(metric.matrix, p)
    rng = np.random.default_rng(seed)
    cap = min(n + 2, max_team)
    worst = math.inf
    for _ in range(trials):
        k = int(rng.integers(1, cap + 1))
        a = rng.integers(0, n, size=k)
        b = rng.integers(0, n, size=k)
        within = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                within += dp[a[i], a[j]] + dp[b[i], b[j]]
        cross = float(dp[np.ix_(a, b)].sum())
        worst = min(worst, cross - within)
    tolerance = 1e-9 * float(dp.max())
    return bool(worst >= -tolerance), float(worst)


def max_negative_type(metric: FiniteMetric, tol: float = 1e-6) -> MaxPEstimate:
    """Bisection estimate of the supremum of exponents with negative type.

    The predicate "p-negative type holds" is monotone in p; the upper end
    starts at 2 and doubles until the predicate fails.  If it still holds
    at 64 the search aborts with :class:`CapReached`.
    """
    if not tol > 0:
        raise InvalidExponent(f"tolerance {tol!r} must be positive")

    def holds(p: float) -> bool:
        return has_p_negative_type(metric, p).status != "fails"

    lo = 0.0
    hi = 2.0
    while holds(hi):
        lo = hi
        hi *= 2.0
        if hi > BISECTION_CAP:
            raise CapReached(BISECTION_CAP)
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if holds(mid):
            lo = mid
        else:
            hi = mid
    p_star = (lo + hi) / 2.0
    return MaxPEstimate(
        p_star=p_star,
        bracket_width=hi - lo,
        verdict_at_p_star=has_p_negative_type(metric, p_star),
    )


def zeta_lower_bound(metric: FiniteMetric, gamma: float) -> float:
    """Half-width of a strictness interval around p = 1.

    Given the 1-negative-type gap of the space, strict p-negative type
    holds for every p in (1 - zeta, 1 + zeta).  The space is first rescaled
    so its smallest nonzero distance is 1 (the gap scales along); the bound
    needs the largest distance to exceed the smallest.
    """
    n = len(metric)
    if n < 3:
        raise TooFewPoints("the interval bound needs at least three points")
    if not gamma > 0:
        raise InvalidExponent(f"gamma = {gamma!r} must be positive")
    d = metric.matrix
    off = d[~np.eye(n, dtype=bool)]
    smallest = float(off.min())
    largest = float(off.max())
    if largest <= smallest * (1.0 + 1e-12):
        raise DegenerateMetric("all nonzero distances coincide")
    w = largest / smallest
    g = gamma / smallest
    return math.log(1.0 + g / (2.0 * w * (n - 1) * (n - 2))) / math.log(w)


def tree_maxp_lower_bound(n: int) -> float:
    """Lower bound on the maximal exponent of any unweighted n-vertex tree."""
    if n < 3:
        raise TooFewPoints("the bound needs at least three vertices")
    return 1.0 + math.log(1.0 + 1.0 / ((n - 1) ** 3 * (n - 2))) / math.log(n - 1.0)


def star_max_p(n: int) -> float:
    """Exact maximal exponent of the unit star with n leaves."""
    if n < 2:
        raise TooFewLeaves("the star formula needs at least two leaves")
    return 1.0 + math.log(1.0 + 1.0 / (n - 1.0)) / math.log(2.0)


def build_star(n: int, center: str = "r", leaf_prefix: str = "l") -> MetricTree:
    """Unit star: one internal vertex joined to n leaves."""
    if n < 2:
        raise TooFewLeaves("a star needs at least two leaves")
    vertices = [center] + [f"{leaf_prefix}{k}" for k in range(1, n + 1)]
    edges = [(f"{leaf_prefix}{k}", center, 1.0) for k in range(1, n + 1)]
    return build_tree(vertices, edges)


def build_necklace(n: int) -> MetricTree:
    """Chain of unit stars with 2..n leaves, joined center to center.

    Star k contributes internal vertex ``r{k}`` and leaves ``r{k}_l{j}``;
    consecutive internal vertices are joined by unit edges.
    """
    if n < 2:
        raise TooSmall("a necklace needs at least the 2-leaf star")
    vertices: List[str] = []
    edges: List[Tuple[str, str, float]] = []
    for k in range(2, n + 1):
        hub = f"r{k}"
        vertices.append(hub)
        for j in range(1, k + 1):
            leaf = f"r{k}_l{j}"
            vertices.append(leaf)
            edges.append((leaf, hub, 1.0))
        if k > 2:
            edges.append((f"r{k - 1}", hub, 1.0))
    return build_tree(vertices, edges)


def verify_enhanced_inequality(
    tree: MetricTree, points: Sequence[VertexId], eta: Sequence[float]
) -> float:
    """Margin of the gap-strengthened inequality for one signed weighting.

    For mean-zero eta on distinct vertices the quantity

        -( gamma/2 * (sum |eta|)^2  +  sum_{i,j} d(x_i, x_j) eta_i eta_j )

    is nonnegative, with equality exactly for the generic witness.  The
    returned margin is that quantity.
    """
    points = tuple(points)
    if len(set(points)) != len(points):
        raise DuplicateVertex("points are not pairwise distinct")
    for v in points:
        tree.check_vertex(v)
    eta_arr = np.array(eta, dtype=float).reshape(-1)
    if eta_arr.size != len(points):
        raise ZeroVector(f"{len(points)} points but {eta_arr.size} weights")
    total_abs = float(np.abs(eta_arr).sum())
    if total_abs == 0.0:
        raise ZeroVector("the signed weighting is identically zero")
    if abs(float(eta_arr.sum())) > 1e-12 * total_abs:
        raise NonZeroSum(
            f"signed weights sum to {float(eta_arr.sum())!r}, expected 0"
        )
    gamma = gamma_T(tree).gamma
    quad = 0.0
    k = len(points)
    for i in range(k):
        for j in range(k):
            if i != j:
                quad += tree.distance(points[i], points[j]) * eta_arr[i] * eta_arr[j]
    return float(-(0.5 * gamma * total_abs * total_abs + quad))


def is_equality_witness(
    tree: MetricTree,
    points: Sequence[VertexId],
    eta: Sequence[float],
    rtol: float = 1e-9,
) -> bool:
    """Whether a signed weighting is the generic witness (up to sign flip)."""
    try:
        simplex, load, _alpha = eta_to_simplex(tree, points, eta)
    except (ZeroVector, NonZeroSum, DuplicateVertex):
        return False
    report = gamma_T(tree)
    target = report.simplex
    target_weight = {}
    for v, w in zip(target.a_team, report.weights.m):
        target_weight[v] = float(w)
    for v, w in zip(target.b_team, report.weights.n):
        target_weight[v] = float(w)

    arrangements = [
        (simplex.a_team, load.m, simplex.b_team, load.n),
        (simplex.b_team, load.n, simplex.a_team, load.m),
    ]
    for a_team, m, b_team, n in arrangements:
        if set(a_team) != set(target.a_team) or set(b_team) != set(target.b_team):
            continue
        ok = True
        for v, w in list(zip(a_team, m)) + list(zip(b_team, n)):
            expect = target_weight[v]
            if abs(float(w) - expect) > rtol * max(expect, 1.0):
                ok = False
                break
        if ok:
            return True
    return False
