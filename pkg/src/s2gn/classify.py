"""Random Forest (CART, Gini) classification with repeated holdout evaluation,
F1 scoring and relative-improvement reporting."""

from __future__ import annotations

import hashlib
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .features import pca_fit, pca_transform
from .seeding import derive_rng


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: int | None = None  # None -> ceil(sqrt(d))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")


@dataclass(frozen=True)
class EvalConfig:
    test_fraction: float = 0.2
    repetitions: int = 100
    stratified: bool = True
    f1_averaging: str = "auto"  # "binary", "macro", or "auto" (binary iff 2 classes)
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.f1_averaging not in ("auto", "binary", "macro"):
            raise ValueError(f"unknown F1 averaging {self.f1_averaging!r}")


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (nodes, classes)

    def apply(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(len(x), dtype=np.intp)
        rows = np.arange(len(x))
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return node
            r, nd, ff = rows[inner], node[inner], f[inner]
            go_left = x[r, ff] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])

    def predict_codes(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.counts[self.apply(x)], axis=1)


def _best_split(xn: np.ndarray, yn: np.ndarray, n_classes: int, feats):
    """Gini-minimising (feature, threshold) over ``feats`` or None."""
    n = len(yn)
    cols = xn[:, feats]
    order = np.argsort(cols, axis=0, kind="stable")
    xs = np.take_along_axis(cols, order, axis=0)
    onehot = np.eye(n_classes)[yn[order]]  # (n, k, C)
    left = np.cumsum(onehot, axis=0)[:-1]
    right = left[-1] + onehot[-1] - left
    nl = np.arange(1, n)[:, None]
    nr = n - nl
    gini = (nl - (left**2).sum(axis=2) / nl) + (nr - (right**2).sum(axis=2) / nr)
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    gini = np.where(valid, gini, np.inf)
    # column-major argmin: first feature in ``feats`` order, then lowest threshold
    flat = np.argmin(gini.T)
    j, i = divmod(int(flat), n - 1)
    return feats[j], 0.5 * (xs[i, j] + xs[i + 1, j])


def grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    rng: np.random.Generator,
    max_depth: int | None = None,
    min_samples_split: int = 2,
    features_per_split: int | None = None,
) -> Tree:
    """CART tree on integer class codes ``y``; thresholds are midpoints between
    consecutive distinct values."""
    d = x.shape[1]
    k = d if features_per_split is None else min(features_per_split, d)
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[idx], minlength=n_classes))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if (
            len(idx) < min_samples_split
            or np.count_nonzero(counts[node]) < 2
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        xn, yn = x[idx], y[idx]
        if k >= d:
            split = _best_split(xn, yn, n_classes, list(range(d)))
        else:
            perm = rng.permutation(d)
            split = _best_split(xn, yn, n_classes, list(perm[:k]))
            if split is None:
                # keep drawing until a non-constant feature turns up
                split = _best_split(xn, yn, n_classes, list(perm[k:]))
        if split is None:
            continue
        f, t = split
        mask = xn[:, f] <= t
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = int(f), float(t)
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return Tree(
        np.asarray(feature, dtype=np.intp),
        np.asarray(threshold),
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(counts),
    )


@dataclass
class RandomForest:
    classes: np.ndarray
    trees: list[Tree]
    n_features: int

    def predict(self, features) -> np.ndarray:
        x = np.asarray(features, dtype=float)
        if x.size == 0:
            return self.classes[:0].copy()
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise ValueError(
                f"expected rows with {self.n_features} features, got shape {x.shape}"
            )
        votes = np.zeros((len(x), len(self.classes)), dtype=np.intp)
        rows = np.arange(len(x))
        for tree in self.trees:
            votes[rows, tree.predict_codes(x)] += 1
        # argmax returns the first maximum, i.e. the smallest label on ties
        return self.classes[np.argmax(votes, axis=1)]


def train_random_forest(features, labels, cfg: ForestConfig = ForestConfig()) -> RandomForest:
    x = np.asarray(features, dtype=float)
    y_raw = np.asarray(labels)
    if x.ndim != 2 or len(x) != len(y_raw):
        raise ValueError(f"feature matrix shape {x.shape} does not match {len(y_raw)} labels")
    if len(x) < 2:
        raise ValueError("need at least 2 training rows")
    if not np.isfinite(x).all():
        raise ValueError("feature matrix contains non-finite values")
    classes, y = np.unique(y_raw, return_inverse=True)
    if len(classes) < 2:
        raise ValueError("training labels contain a single class")
    d = x.shape[1]
    k = cfg.features_per_split or math.ceil(math.sqrt(d))
    trees = []
    for t in range(cfg.n_trees):
        rng = derive_rng(cfg.seed, "tree", t)
        if cfg.bootstrap:
            idx = rng.integers(len(x), size=len(x))
            xb, yb = x[idx], y[idx]
        else:
            xb, yb = x, y
        trees.append(
            grow_tree(xb, yb, len(classes), rng, cfg.max_depth, cfg.min_samples_split, k)
        )
    return RandomForest(classes, trees, d)


def predict(model: RandomForest, features) -> np.ndarray:
    return model.predict(features)


def f1_score(truth, pred, averaging: str = "binary", positive=None) -> float:
    """Binary F1 for ``positive`` (default: the largest label seen) or the
    unweighted macro mean of per-class F1."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if len(truth) != len(pred):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(pred)} predictions")
    if len(truth) == 0:
        raise ValueError("F1 of an empty label set is undefined")
    labels = np.union1d(truth, pred)

    def one(c):
        tp = np.sum((pred == c) & (truth == c))
        fp = np.sum((pred == c) & (truth != c))
        fn = np.sum((pred != c) & (truth == c))
        return 0.0 if tp == 0 else 2.0 * tp / (2 * tp + fp + fn)

    if averaging == "binary":
        return float(one(labels.max() if positive is None else positive))
    if averaging == "macro":
        return float(np.mean([one(c) for c in labels]))
    raise ValueError(f"unknown F1 averaging {averaging!r}")


def rimp(f1_model: float, f1_ori: float) -> float:
    """Relative improvement of ``f1_model`` over the baseline ``f1_ori``."""
    if f1_ori == 0:
        raise ValueError("baseline F1 is zero; relative improvement undefined")
    return (f1_model - f1_ori) / f1_ori


@dataclass
class EvalReport:
    mean_f1: float
    std_f1: float
    per_repetition: list[float]
    wall_time: float
    fingerprint: str
    seed: int
    config: dict = field(default_factory=dict)
    stratified_fallback: bool = False

    def to_json(self, dataset: str = "", pipeline: str = "", rimp_vs_original=None) -> dict:
        return {
            "dataset": dataset,
            "pipeline": pipeline,
            "mean_f1": self.mean_f1,
            "std_f1": self.std_f1,
            "per_repetition": list(self.per_repetition),
            "rimp_vs_original": rimp_vs_original,
            "wall_time_seconds": self.wall_time,
            "seed": self.seed,
            "config": dict(self.config, fingerprint=self.fingerprint,
                           stratified_fallback=self.stratified_fallback),
        }


def holdout_split(labels, test_fraction: float, rng: np.random.Generator, stratified=True):
    """Return (train_idx, test_idx, fell_back)."""
    y = np.asarray(labels)
    classes, counts = np.unique(y, return_counts=True)
    fell_back = False
    if stratified and counts.min() < 2:
        fell_back = True
        stratified = False
    if stratified:
        train, test = [], []
        for c in classes:
            idx = rng.permutation(np.flatnonzero(y == c))
            k = min(max(1, round(test_fraction * len(idx))), len(idx) - 1)
            test.append(idx[:k])
            train.append(idx[k:])
        return np.sort(np.concatenate(train)), np.sort(np.concatenate(test)), fell_back
    idx = rng.permutation(len(y))
    k = min(max(1, round(test_fraction * len(y))), len(y) - 1)
    return np.sort(idx[k:]), np.sort(idx[:k]), fell_back


def evaluate(
    features,
    labels,
    eval_cfg: EvalConfig = EvalConfig(),
    forest_cfg: ForestConfig = ForestConfig(),
    pca_dim: int | None = None,
) -> EvalReport:
    """Repeated random holdout: split, (optionally fit PCA on the training
    rows), train, predict, score. Every repetition draws its own sub-seeds."""
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    if len(x) != len(y) or len(y) < 2:
        raise ValueError("need matching features/labels with at least 2 rows")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("labels contain a single class")
    # canonical row order makes results independent of input row order
    canon = np.lexsort(np.column_stack([x, y]).T[::-1])
    x, y = x[canon], y[canon]
    averaging = eval_cfg.f1_averaging
    if averaging == "auto":
        averaging = "binary" if len(classes) == 2 else "macro"
    start = time.perf_counter()
    scores = []
    fell_back = False
    for rep in range(eval_cfg.repetitions):
        rng = derive_rng(eval_cfg.seed, "split", rep)
        tr, te, fb = holdout_split(y, eval_cfg.test_fraction, rng, eval_cfg.stratified)
        fell_back |= fb
        xtr, xte = x[tr], x[te]
        if pca_dim is not None:
            model = pca_fit(xtr, pca_dim)
            xtr, xte = pca_transform(model, xtr), pca_transform(model, xte)
        if len(np.unique(y[tr])) < 2:
            pred = np.full(len(te), y[tr][0])
        else:
            sub_seed = int(derive_rng(forest_cfg.seed, "forest", rep).integers(2**31))
            cfg = replace(forest_cfg, seed=sub_seed)
            pred = train_random_forest(xtr, y[tr], cfg).predict(xte)
        scores.append(f1_score(y[te], pred, averaging, positive=classes.max()))
    if fell_back:
        warnings.warn("a class has fewer than 2 members; used unstratified splits")
    config = {
        "eval": asdict(eval_cfg),
        "forest": asdict(forest_cfg),
        "f1_averaging_resolved": averaging,
        "pca_dim_per_fold": pca_dim,
    }
    fingerprint = hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]
    arr = np.asarray(scores)
    return EvalReport(
        float(arr.mean()),
        float(arr.std()),
        [float(s) for s in scores],
        time.perf_counter() - start,
        fingerprint,
        eval_cfg.seed,
        config,
        fell_back,
    )
