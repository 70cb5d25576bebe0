import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s2gn.classify import (
    EvalConfig,
    ForestConfig,
    RandomForest,
    Tree,
    evaluate,
    f1_score,
    grow_tree,
    holdout_split,
    predict,
    rimp,
    train_random_forest,
)


def blobs(n=20, seed=0, gap=6.0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(size=(n // 2, 3)), rng.normal(size=(n - n // 2, 3)) + gap])
    y = np.array([0] * (n // 2) + [1] * (n - n // 2))
    return x, y


class TestForest:
    def test_separable_training_accuracy(self):
        x, y = blobs()
        model = train_random_forest(x, y, ForestConfig(n_trees=25))
        assert np.all(model.predict(x) == y)

    def test_constant_features_give_majority(self):
        x = np.ones((9, 4))
        y = np.array([2, 2, 2, 2, 2, 7, 7, 7, 7])
        model = train_random_forest(x, y, ForestConfig(n_trees=15, bootstrap=False))
        assert np.all(model.predict(np.ones((3, 4))) == 2)

    def test_deterministic(self):
        x, y = blobs(40, seed=1, gap=1.0)
        held = np.random.default_rng(5).normal(size=(30, 3))
        a = train_random_forest(x, y, ForestConfig(n_trees=10, seed=3)).predict(held)
        b = train_random_forest(x, y, ForestConfig(n_trees=10, seed=3)).predict(held)
        assert np.array_equal(a, b)

    def test_empty_and_shape_errors(self):
        x, y = blobs()
        model = train_random_forest(x, y, ForestConfig(n_trees=3))
        assert len(predict(model, np.zeros((0, 3)))) == 0
        with pytest.raises(ValueError):
            model.predict(np.zeros((2, 4)))

    def test_single_tree_reproduces_training(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(30, 4))
        y = rng.integers(0, 3, size=30)
        model = train_random_forest(x, y, ForestConfig(n_trees=1, bootstrap=False))
        assert np.array_equal(model.predict(x), y)

    def test_tie_goes_to_smaller_label(self):
        def leaf(code):
            counts = np.zeros((1, 2))
            counts[0, code] = 1
            return Tree(np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), counts)

        model = RandomForest(np.array([3, 8]), [leaf(1), leaf(0)], 1)
        assert model.predict([[0.0]]).tolist() == [3]

    def test_training_errors(self):
        with pytest.raises(ValueError):
            train_random_forest(np.zeros((4, 2)), [1, 1, 1, 1])
        with pytest.raises(ValueError):
            train_random_forest([[0.0], [np.inf]], [0, 1])
        with pytest.raises(ValueError):
            ForestConfig(n_trees=0)
        with pytest.raises(ValueError):
            ForestConfig(min_samples_split=1)

    def test_midpoint_threshold(self):
        x = np.array([[1.0], [2.0], [4.0], [5.0]])
        tree = grow_tree(x, np.array([0, 0, 1, 1]), 2, np.random.default_rng())
        assert tree.feature[0] == 0 and tree.threshold[0] == 3.0

    def test_monotone_transform_invariance(self):
        x, y = blobs(40, seed=2, gap=1.5)
        held = np.random.default_rng(7).normal(size=(25, 3)) + 0.75
        cfg = ForestConfig(n_trees=15, seed=4)
        base = train_random_forest(x, y, cfg).predict(held)
        xt, ht = x.copy(), held.copy()
        xt[:, 1] = np.exp(xt[:, 1])
        ht[:, 1] = np.exp(ht[:, 1])
        assert np.array_equal(train_random_forest(xt, y, cfg).predict(ht), base)

    def test_duplicate_column_with_all_features(self):
        x, y = blobs(30, seed=3, gap=1.0)
        rng = np.random.default_rng(0)
        t1 = grow_tree(x, y, 2, rng)
        t2 = grow_tree(np.column_stack([x, x[:, 0]]), y, 2, rng)
        held = np.random.default_rng(1).normal(size=(50, 3))
        assert np.array_equal(
            t1.predict_codes(held), t2.predict_codes(np.column_stack([held, held[:, 0]]))
        )


class TestF1:
    def test_examples(self):
        assert f1_score([0, 1, 1], [0, 1, 1]) == 1.0
        # P = 0.5, R = 1
        assert f1_score([1, 0, 0, 1], [1, 1, 1, 1]) == pytest.approx(2 / 3)
        assert f1_score([0, 1, 0, 1], [1, 0, 1, 0]) == 0.0

    def test_macro(self):
        truth = [0, 0, 1, 1, 2, 2]
        pred = [0, 1, 1, 1, 2, 0]
        per = [2 * 1 / (2 + 1 + 1), 2 * 2 / (4 + 1), 2 * 1 / (2 + 1)]
        assert f1_score(truth, pred, "macro") == pytest.approx(np.mean(per))

    def test_errors(self):
        with pytest.raises(ValueError):
            f1_score([0, 1], [0])
        with pytest.raises(ValueError):
            f1_score([0], [0], "weighted")

    @settings(derandomize=True, max_examples=150)
    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=30),
           st.permutations([0, 1, 2, 3]))
    def test_bounds_and_macro_symmetry(self, pairs, perm):
        truth, pred = map(np.array, zip(*pairs))
        f = f1_score(truth, pred, "macro")
        assert 0.0 <= f <= 1.0
        mapping = np.array(perm)
        assert f1_score(mapping[truth], mapping[pred], "macro") == pytest.approx(f)


class TestRimp:
    def test_published_values(self):
        assert rimp(72.88, 69.43) == pytest.approx(0.0497, abs=5e-4)
        assert rimp(75.76, 69.43) == pytest.approx(0.0912, abs=5e-4)
        assert rimp(5.0, 5.0) == 0.0

    def test_zero_baseline(self):
        with pytest.raises(ValueError):
            rimp(0.5, 0.0)


class TestEvaluate:
    def test_single_repetition(self):
        x, y = blobs(30, gap=1.0)
        rep = evaluate(x, y, EvalConfig(repetitions=1), ForestConfig(n_trees=10))
        assert rep.per_repetition == [rep.mean_f1] and rep.std_f1 == 0.0

    def test_separable(self):
        x, y = blobs(40)
        rep = evaluate(x, y, EvalConfig(repetitions=5), ForestConfig(n_trees=20))
        assert rep.mean_f1 == 1.0

    def test_stats_consistent_and_reproducible(self):
        x, y = blobs(40, seed=4, gap=1.0)
        cfg, fcfg = EvalConfig(repetitions=6, seed=2), ForestConfig(n_trees=8)
        a, b = evaluate(x, y, cfg, fcfg), evaluate(x, y, cfg, fcfg)
        assert a.per_repetition == b.per_repetition
        assert abs(a.mean_f1 - np.mean(a.per_repetition)) <= 1e-12
        assert abs(a.std_f1 - np.std(a.per_repetition)) <= 1e-12

    def test_row_shuffle_invariance(self):
        x, y = blobs(40, seed=5, gap=1.0)
        cfg, fcfg = EvalConfig(repetitions=4), ForestConfig(n_trees=8)
        perm = np.random.default_rng(0).permutation(len(y))
        assert evaluate(x, y, cfg, fcfg).mean_f1 == evaluate(x[perm], y[perm], cfg, fcfg).mean_f1

    def test_stratified_fallback(self):
        x = np.arange(12, dtype=float)[:, None]
        y = np.array([0] * 11 + [1])
        with pytest.warns(UserWarning):
            rep = evaluate(x, y, EvalConfig(repetitions=2), ForestConfig(n_trees=3))
        assert rep.stratified_fallback

    def test_stratified_split_proportions(self):
        y = np.array([0] * 125 + [1] * 63)
        tr, te, fb = holdout_split(y, 0.2, np.random.default_rng(0))
        assert not fb and len(np.intersect1d(tr, te)) == 0
        assert np.bincount(y[te]).tolist() == [25, 13]

    def test_per_fold_pca(self):
        x, y = blobs(40)
        x = np.hstack([x, x * 2 + 1])
        rep = evaluate(x, y, EvalConfig(repetitions=2), ForestConfig(n_trees=5), pca_dim=3)
        assert rep.mean_f1 == 1.0

    def test_report_json(self):
        x, y = blobs(20)
        rep = evaluate(x, y, EvalConfig(repetitions=3), ForestConfig(n_trees=3))
        doc = rep.to_json("toy", "original", None)
        assert set(doc) == {"dataset", "pipeline", "mean_f1", "std_f1", "per_repetition",
                            "rimp_vs_original", "wall_time_seconds", "seed", "config"}
        assert len(doc["per_repetition"]) == 3

    def test_config_errors(self):
        with pytest.raises(ValueError):
            EvalConfig(test_fraction=1.0)
        with pytest.raises(ValueError):
            EvalConfig(repetitions=0)
