import numpy as np
import pytest

from sdec import refine as rf
from sdec.metrics import accuracy
from sdec.numeric import Rng
from sdec.refine import RefineConfig
from sdec.synth import corrupt_labels, make_blobs


class TestCentroidsFromLabels:
    def test_one_point_per_cluster(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = rf.centroids_from_labels(x, [0, 1], 2)
        assert np.array_equal(out, x)

    def test_arithmetic_mean(self):
        x = np.array([[0.0, 0.0], [2.0, 2.0]])
        out = rf.centroids_from_labels(x, [0, 0], 1)
        assert np.array_equal(out, [[1.0, 1.0]])

    def test_permutation_invariance(self):
        rng = Rng(1)
        x = rng.gaussian_matrix(20, 3)
        labels = np.array([i % 4 for i in range(20)])
        perm = rng.permutation(20)
        a = rf.centroids_from_labels(x, labels, 4)
        b = rf.centroids_from_labels(x[perm], labels[perm], 4)
        assert np.allclose(a, b, rtol=0, atol=1e-12)

    def test_empty_cluster_keeps_zero_row(self):
        x = np.ones((3, 2))
        out = rf.centroids_from_labels(x, [0, 0, 2], 3)
        assert np.array_equal(out[1], [0.0, 0.0])


class TestRefinePass:
    def test_fixed_point_no_reassignments(self):
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        centroids = x.copy()
        labels, moved = rf.refine_pass(x, [0, 1], centroids, 0.0)
        assert moved == 0
        assert np.array_equal(labels, [0, 1])

    def test_margin_bound_blocks_everything(self):
        rng = Rng(2)
        x = rng.gaussian_matrix(30, 4)
        labels = np.array([i % 3 for i in range(30)])
        centroids = rf.centroids_from_labels(x, labels, 3)
        _, moved = rf.refine_pass(x, labels, centroids, 2.0)
        assert moved == 0

    def test_hand_computed_margin_case(self):
        x = np.array([[1.0, 0.05]])
        centroids = np.array([[0.0, 1.0], [1.0, 0.0]])  # current label 0
        log = []
        labels, moved = rf.refine_pass(x, [0], centroids, 0.2, log)
        assert moved == 1 and labels[0] == 1
        point, old, new, margin = log[0]
        expected = (1.0 / np.sqrt(1.0 + 0.05**2)) - (0.05 / np.sqrt(1.0 + 0.05**2))
        assert margin == pytest.approx(expected, abs=1e-12)
        assert margin == pytest.approx(0.9488, abs=1e-3)

    def test_logged_margins_exceed_threshold(self):
        rng = Rng(3)
        x = rng.gaussian_matrix(200, 6)
        labels = np.array([rng.index(4) for _ in range(200)])
        centroids = rf.centroids_from_labels(x, labels, 4)
        for threshold in (0.0, 0.1, 0.3):
            log = []
            rf.refine_pass(x, labels, centroids, threshold, log)
            assert all(margin > threshold for _, _, _, margin in log)

    def test_lambda_monotonicity(self):
        rng = Rng(4)
        x = rng.gaussian_matrix(150, 5)
        labels = np.array([rng.index(3) for _ in range(150)])
        centroids = rf.centroids_from_labels(x, labels, 3)
        moved_sets = []
        for threshold in (0.05, 0.2, 0.5, 0.9):
            log = []
            rf.refine_pass(x, labels, centroids, threshold, log)
            moved_sets.append({entry[0] for entry in log})
        for small, large in zip(moved_sets, moved_sets[1:]):
            assert large <= small

    def test_zero_norm_point_warns_and_stays(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        centroids = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.warns(RuntimeWarning):
            labels, _ = rf.refine_pass(x, [0, 0], centroids, 0.1)
        assert labels[0] == 0  # all similarities -1: margin 0 never beats threshold

    def test_empty_cluster_never_gains_points(self):
        rng = Rng(5)
        x = rng.gaussian_matrix(30, 3) + 5.0
        labels = np.array([i % 2 for i in range(30)])  # cluster 2 empty
        centroids = rf.centroids_from_labels(x, labels, 3)
        with pytest.warns(RuntimeWarning):
            new_labels, _ = rf.refine_pass(x, labels, centroids, 0.0)
        assert not np.any(new_labels == 2)


class TestRefine:
    def test_already_refined_returns_input(self):
        x, gold = make_blobs(120, 8, 3, 12.0, seed=6)
        out = rf.refine(x, gold, RefineConfig(threshold=0.1))
        assert np.array_equal(out, gold)

    def test_max_passes_one_is_single_pass(self):
        rng = Rng(7)
        x = rng.gaussian_matrix(80, 4)
        labels = np.array([rng.index(3) for _ in range(80)])
        centroids = rf.centroids_from_labels(x, labels, 3)
        single, _ = rf.refine_pass(x, labels, centroids, 0.05)
        out = rf.refine(x, labels, RefineConfig(threshold=0.05, max_passes=1))
        assert np.array_equal(out, single)

    def test_corruption_repair_improves_accuracy(self):
        x, gold = make_blobs(400, 16, 4, 10.0, seed=8)
        corrupted = corrupt_labels(gold, 0.05, 4, seed=8)
        base_acc, _ = accuracy(gold, corrupted)
        refined = rf.refine(x, corrupted, RefineConfig(threshold=0.1))
        refined_acc, _ = accuracy(gold, refined)
        assert base_acc < 1.0
        assert refined_acc > base_acc

    def test_scale_invariance(self):
        x, gold = make_blobs(200, 8, 3, 10.0, seed=9)
        noisy = corrupt_labels(gold, 0.1, 3, seed=9)
        cfg = RefineConfig(threshold=0.15)
        out1 = rf.refine(x, noisy, cfg)
        out2 = rf.refine(3.7 * x, noisy, cfg)
        assert np.array_equal(out1, out2)

    def test_termination_within_max_passes(self):
        rng = Rng(10)
        for trial in range(5):
            x = rng.gaussian_matrix(60, 4)
            labels = np.array([rng.index(3) for _ in range(60)])
            cfg = RefineConfig(threshold=0.01, max_passes=4)
            out = rf.refine(x, labels, cfg)  # must return, never loop
            assert out.shape == labels.shape

    def test_high_threshold_returns_input(self):
        x, gold = make_blobs(100, 6, 3, 8.0, seed=11)
        noisy = corrupt_labels(gold, 0.2, 3, seed=11)
        out = rf.refine(x, noisy, RefineConfig(threshold=2.0))
        assert np.array_equal(out, noisy)
