import math

import numpy as np
import pytest

from treegap import (
    CapReached,
    DegenerateMetric,
    FiniteMetric,
    InvalidExponent,
    InvalidMetric,
    TooFewLeaves,
    TooFewPoints,
    TooSmall,
    build_necklace,
    build_star,
    build_tree,
    gamma_T,
    generalized_roundness_check,
    has_p_negative_type,
    has_strict_p_negative_type,
    is_equality_witness,
    max_negative_type,
    metric_from_tree,
    power_matrix,
    star_max_p,
    tree_maxp_lower_bound,
    verify_enhanced_inequality,
    zeta_lower_bound,
)

from conftest import random_tree


def unit_path3():
    return build_tree(["a", "m", "b"], [("a", "m", 1.0), ("m", "b", 1.0)], root="b")


def path3_metric():
    return metric_from_tree(unit_path3())


class TestFiniteMetric:
    def test_single_unit_edge(self):
        metric = metric_from_tree(build_tree(["a", "b"], [("a", "b", 1.0)]))
        assert metric.matrix.tolist() == [[0.0, 1.0], [1.0, 0.0]]

    def test_weighted_path_distance(self):
        t = build_tree(["a", "m", "b"], [("a", "m", 1.0), ("m", "b", 2.0)])
        metric = metric_from_tree(t)
        assert metric.distance("a", "b") == 3.0

    def test_star_entries(self):
        t = build_tree(
            ["r", "l1", "l2", "l3"],
            [("r", "l1", 1.0), ("r", "l2", 1.0), ("r", "l3", 1.0)],
        )
        metric = metric_from_tree(t)
        assert set(np.unique(metric.matrix).tolist()) == {0.0, 1.0, 2.0}

    def test_subset_restriction(self):
        t = unit_path3()
        metric = metric_from_tree(t, subset=["b", "a"])
        assert metric.labels == ("a", "b")
        assert metric.distance("a", "b") == 2.0

    def test_rejects_asymmetry(self):
        with pytest.raises(InvalidMetric):
            FiniteMetric(["x", "y"], [[0.0, 1.0], [2.0, 0.0]])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(InvalidMetric):
            FiniteMetric(["x", "y"], [[0.5, 1.0], [1.0, 0.0]])

    def test_rejects_triangle_violation(self):
        with pytest.raises(InvalidMetric):
            FiniteMetric(
                ["x", "y", "z"],
                [[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]],
            )

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(InvalidMetric):
            FiniteMetric(["x", "y"], [[0.0, -1.0], [-1.0, 0.0]])

    def test_power_matrix_p0_convention(self):
        d = path3_metric().matrix
        m0 = power_matrix(d, 0.0)
        assert np.diag(m0).tolist() == [0.0, 0.0, 0.0]
        off = m0[~np.eye(3, dtype=bool)]
        assert np.all(off == 1.0)


class TestVerdicts:
    def test_tree_at_p1_is_strict(self):
        v = has_p_negative_type(path3_metric(), 1.0)
        assert v.status == "strict"
        assert v.certificate is None
        assert v.lambda_max < 0

    def test_path_at_p2_is_non_strict(self):
        v = has_p_negative_type(path3_metric(), 2.0)
        assert v.status == "non_strict"
        assert abs(v.lambda_max) <= 1e-12 * 4.0
        flat = np.sort(np.abs(v.certificate))
        expect = np.array([1.0, 1.0, 2.0]) / math.sqrt(6.0)
        assert np.allclose(flat, np.sort(expect), atol=1e-9)

    def test_path_at_p25_fails_with_violating_eta(self):
        metric = path3_metric()
        v = has_p_negative_type(metric, 2.5)
        assert v.status == "fails"
        assert v.lambda_max > 0
        eta = v.certificate
        assert abs(eta.sum()) <= 1e-9
        dp = power_matrix(metric.matrix, 2.5)
        assert float(eta @ dp @ eta) > 0

    def test_discrete_metric_is_strict_at_p1(self):
        ones = np.ones((4, 4)) - np.eye(4)
        v = has_p_negative_type(FiniteMetric(list("wxyz"), ones), 1.0)
        assert v.status == "strict"

    def test_strict_wrapper(self):
        assert has_strict_p_negative_type(path3_metric(), 1.0)
        assert not has_strict_p_negative_type(path3_metric(), 2.0)

    def test_rejects_bad_inputs(self):
        with pytest.raises(InvalidExponent):
            has_p_negative_type(path3_metric(), -0.5)
        with pytest.raises(TooFewPoints):
            has_p_negative_type(FiniteMetric(["x"], [[0.0]]), 1.0)


class TestRoundnessSampling:
    def test_tree_at_p1_never_violates(self):
        ok, worst = generalized_roundness_check(path3_metric(), 1.0, trials=1000)
        assert ok
        assert worst >= 0.0

    def test_adversarial_p3_violation_found(self):
        # teams (leaf, leaf) vs (mid, mid) break the inequality at p=3
        ok, worst = generalized_roundness_check(path3_metric(), 3.0, trials=200)
        assert not ok
        assert worst < 0.0

    def test_agrees_with_eigenvalue_verdict(self):
        rng = np.random.default_rng(61)
        for _ in range(12):
            tree = random_tree(rng, int(rng.integers(3, 8)))
            metric = metric_from_tree(tree)
            p = float(rng.uniform(0.2, 3.0))
            verdict = has_p_negative_type(metric, p)
            scale = float(power_matrix(metric.matrix, p).max())
            if abs(verdict.lambda_max) <= 1e-9 * scale:
                continue  # marginal band: sampling says nothing sharp
            ok, _ = generalized_roundness_check(metric, p, trials=1000, seed=5)
            if verdict.status == "strict":
                assert ok
            # a found violation must mean the eigenvalue test failed too
            if not ok:
                assert verdict.status == "fails"

    def test_seed_gives_reproducible_margins(self):
        first = generalized_roundness_check(path3_metric(), 2.5, trials=300, seed=9)
        second = generalized_roundness_check(path3_metric(), 2.5, trials=300, seed=9)
        assert first == second


class TestMaxNegativeType:
    def test_unit_path_boundary_exponent(self):
        est = max_negative_type(path3_metric())
        assert abs(est.p_star - 2.0) <= 1e-5
        assert est.bracket_width <= 1e-6

    def test_star4(self):
        est = max_negative_type(metric_from_tree(build_star(4)))
        assert abs(est.p_star - 1.4150374992788437) <= 1e-4

    def test_two_point_space_has_no_ceiling(self):
        with pytest.raises(CapReached):
            max_negative_type(FiniteMetric(["a", "b"], [[0.0, 1.0], [1.0, 0.0]]))

    def test_tolerance_must_be_positive(self):
        with pytest.raises(InvalidExponent):
            max_negative_type(path3_metric(), tol=0.0)

    def test_predicate_is_monotone_along_the_grid(self):
        rng = np.random.default_rng(62)
        for _ in range(6):
            tree = random_tree(rng, int(rng.integers(3, 8)))
            metric = metric_from_tree(tree)
            p_star = max_negative_type(metric).p_star
            seen_failure = False
            for p in np.linspace(0.0, 2.0 * p_star, 50):
                holds = has_p_negative_type(metric, float(p)).status != "fails"
                if not holds:
                    seen_failure = True
                else:
                    assert not seen_failure, f"held again at p={p} after failing"


class TestZetaInterval:
    def test_unit_path_value(self):
        zeta = zeta_lower_bound(path3_metric(), 0.5)
        assert zeta == pytest.approx(math.log(1.0625) / math.log(2.0), rel=1e-12)

    def test_scale_invariance(self):
        t = build_tree(["a", "m", "b"], [("a", "m", 10.0), ("m", "b", 10.0)])
        scaled = metric_from_tree(t)
        zeta = zeta_lower_bound(scaled, 5.0)  # gamma scales along
        assert zeta == pytest.approx(math.log(1.0625) / math.log(2.0), rel=1e-12)

    def test_strictness_holds_inside_the_interval(self):
        rng = np.random.default_rng(63)
        for _ in range(5):
            tree = random_tree(rng, int(rng.integers(3, 8)))
            metric = metric_from_tree(tree)
            zeta = zeta_lower_bound(metric, gamma_T(tree).gamma)
            assert zeta > 0
            for p in (1.0 - 0.99 * zeta, 1.0 + 0.99 * zeta):
                assert has_strict_p_negative_type(metric, p)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(TooFewPoints):
            zeta_lower_bound(FiniteMetric(["a", "b"], [[0.0, 1.0], [1.0, 0.0]]), 1.0)
        with pytest.raises(InvalidExponent):
            zeta_lower_bound(path3_metric(), 0.0)
        ones = np.ones((3, 3)) - np.eye(3)
        with pytest.raises(DegenerateMetric):
            zeta_lower_bound(FiniteMetric(list("xyz"), ones), 0.5)


class TestClosedFormExponents:
    def test_star_max_p_values(self):
        assert star_max_p(2) == 2.0
        assert star_max_p(3) == pytest.approx(1.584962500721156, rel=1e-12)
        assert star_max_p(4) == pytest.approx(1.4150374992788437, rel=1e-12)

    def test_star_max_p_decreases_toward_one(self):
        values = [star_max_p(n) for n in range(2, 65)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] > 1.0
        assert values[-1] < 1.025

    def test_star_max_p_needs_two_leaves(self):
        with pytest.raises(TooFewLeaves):
            star_max_p(1)

    def test_tree_bound_values(self):
        assert tree_maxp_lower_bound(3) == pytest.approx(1.1699250014423124, rel=1e-12)
        assert abs(tree_maxp_lower_bound(4) - 1.0167) <= 1e-4

    def test_tree_bound_needs_three_vertices(self):
        with pytest.raises(TooFewPoints):
            tree_maxp_lower_bound(2)

    def test_tree_bound_below_measured_exponent(self):
        rng = np.random.default_rng(64)
        for n in (3, 4, 5):
            bound = tree_maxp_lower_bound(n)
            for _ in range(3):
                tree = random_tree(rng, n, unit=True)
                measured = max_negative_type(metric_from_tree(tree)).p_star
                assert bound <= measured + 1e-4


class TestGenerators:
    def test_star2_is_a_path(self):
        t = build_star(2)
        assert len(t.vertices) == 3
        assert set(t.leaves()) == {"l1", "l2"}
        assert t.distance("l1", "l2") == 2.0

    def test_star_gamma_is_reciprocal_n(self):
        for n in range(2, 9):
            assert gamma_T(build_star(n)).gamma == pytest.approx(1.0 / n, rel=1e-15)

    def test_star3_distance_set(self):
        metric = metric_from_tree(build_star(3))
        off = metric.matrix[~np.eye(4, dtype=bool)]
        assert set(off.tolist()) == {1.0, 2.0}

    def test_star_needs_two_leaves(self):
        with pytest.raises(TooFewLeaves):
            build_star(1)

    def test_necklace_shapes(self):
        two = build_necklace(2)
        assert (len(two.vertices), len(two.edges)) == (3, 2)
        three = build_necklace(3)
        assert (len(three.vertices), len(three.edges)) == (7, 6)

    def test_necklace_gamma_is_reciprocal_edge_count(self):
        for n in range(2, 7):
            nk = build_necklace(n)
            assert gamma_T(nk).gamma == 1.0 / len(nk.edges)

    def test_necklace_needs_two_stars(self):
        with pytest.raises(TooSmall):
            build_necklace(1)


class TestEnhancedInequality:
    def test_generic_witness_margin_is_zero(self):
        margin = verify_enhanced_inequality(
            unit_path3(), ("a", "m", "b"), (0.5, -1.0, 0.5)
        )
        assert abs(margin) <= 1e-12

    def test_pair_margins(self):
        # for a +1/-1 pair the margin works out to 2 d(x,y) - 1
        margin = verify_enhanced_inequality(unit_path3(), ("a", "m"), (1.0, -1.0))
        assert margin == pytest.approx(1.0, rel=1e-12)
        margin = verify_enhanced_inequality(unit_path3(), ("a", "b"), (1.0, -1.0))
        assert margin == pytest.approx(3.0, rel=1e-12)

    def test_unbalanced_eta_margin_six(self):
        margin = verify_enhanced_inequality(
            unit_path3(), ("a", "m", "b"), (1.0, 1.0, -2.0)
        )
        assert margin == pytest.approx(6.0, rel=1e-12)

    def test_margins_nonnegative_at_random(self):
        rng = np.random.default_rng(65)
        for _ in range(60):
            tree = random_tree(rng, int(rng.integers(2, 9)))
            vs = list(tree.vertices)
            k = int(rng.integers(2, len(vs) + 1))
            points = [vs[i] for i in rng.choice(len(vs), size=k, replace=False)]
            raw = rng.uniform(0.2, 2.0, size=k)
            cut = int(rng.integers(1, k))
            eta = np.where(np.arange(k) < cut, raw, -raw)
            eta[:cut] *= -eta[cut:].sum() / eta[:cut].sum()
            margin = verify_enhanced_inequality(tree, points, eta)
            scale = tree.total_weight()
            assert margin >= -1e-10 * max(scale, 1.0)

    def test_witness_detection(self):
        t = unit_path3()
        assert is_equality_witness(t, ("a", "m", "b"), (0.5, -1.0, 0.5))
        # global sign flip is the same witness
        assert is_equality_witness(t, ("a", "m", "b"), (-0.5, 1.0, -0.5))
        # rescaling changes alpha, not the witness
        assert is_equality_witness(t, ("a", "m", "b"), (2.0, -4.0, 2.0))
        assert not is_equality_witness(t, ("a", "b"), (1.0, -1.0))
        assert not is_equality_witness(t, ("a", "m", "b"), (0.4, -1.0, 0.6))
