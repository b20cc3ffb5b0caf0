"""Bagged CART forest with Gini splits on histogram-binned features.

Continuous features are quantized to at most 64 quantile cuts before
growing; categorical and binary inputs keep their exact codes, so splits on
them are exact. Candidate features per split follow the usual mtry rule
(default: square root of the feature count). Leaf probabilities are
Laplace-smoothed as (positives + 1) / (samples + 2) and averaged over
trees. Everything is deterministic given the seed: bootstraps come from a
seeded generator and per-node feature draws from a counter-based xorshift,
so repeated fits are byte-identical.
"""

import warnings

import numpy as np

from ._kernels import grow_tree, tree_leaves
from .errors import DegenerateLabelsWarning
from .logistic import ConstantModel

MAX_BINS = 64

FOREST_DEFAULTS = {
    "n_trees": 100,
    "max_depth": None,
    "min_leaf": 1,
    "feature_subsample": None,  # None -> sqrt(n_features) per split
}


def _feature_cuts(column):
    """Cut points such that code(v) = #cuts < v (ties go to the lower bin)."""
    uniq = np.unique(column)
    if uniq.size <= 1:
        return np.empty(0, dtype=np.float64)
    if uniq.size <= MAX_BINS:
        return uniq[:-1].astype(np.float64)
    qs = np.arange(1, MAX_BINS) / MAX_BINS
    return np.unique(np.quantile(column, qs)).astype(np.float64)


def _encode(X, cuts):
    codes = np.empty(X.shape, dtype=np.uint8)
    for j, c in enumerate(cuts):
        codes[:, j] = np.searchsorted(c, X[:, j], side="left").astype(np.uint8)
    return codes


class ForestModel:
    kind = "forest"

    def __init__(self, cuts, trees, params):
        self.cuts = cuts
        self.trees = trees
        self.params = params

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        codes = _encode(X, self.cuts)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            leaves = tree_leaves(codes, *tree[:4])
            total += (tree[4][leaves] + 1.0) / (tree[5][leaves] + 2.0)
        return total / len(self.trees)

    def to_dict(self):
        return {
            "type": "forest",
            "params": {
                k: self.params[k]
                for k in ("n_trees", "max_depth", "min_leaf", "feature_subsample", "seed")
            },
            "cuts": [[float(v) for v in c] for c in self.cuts],
            "trees": [
                {
                    "child_left": t[0].tolist(),
                    "child_right": t[1].tolist(),
                    "split_feat": t[2].tolist(),
                    "split_bin": t[3].tolist(),
                    "leaf_pos": t[4].tolist(),
                    "leaf_n": t[5].tolist(),
                }
                for t in self.trees
            ],
        }

    @classmethod
    def from_dict(cls, payload):
        cuts = [np.asarray(c, dtype=np.float64) for c in payload["cuts"]]
        trees = [
            (
                np.asarray(t["child_left"], dtype=np.int32),
                np.asarray(t["child_right"], dtype=np.int32),
                np.asarray(t["split_feat"], dtype=np.int32),
                np.asarray(t["split_bin"], dtype=np.int32),
                np.asarray(t["leaf_pos"], dtype=np.int64),
                np.asarray(t["leaf_n"], dtype=np.int64),
            )
            for t in payload["trees"]
        ]
        return cls(cuts, trees, dict(payload["params"]))


def fit_forest(X, y, hyperparameters=None):
    """Grow a seeded bagged forest; single-class labels give a constant model."""
    hp = dict(FOREST_DEFAULTS)
    hp.update(hyperparameters or {})
    if "seed" not in hp or hp["seed"] is None:
        raise ValueError("forest training requires an explicit seed")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, n_feats = X.shape
    if n < 1:
        raise ValueError("need at least one training row")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == n:
        warnings.warn(
            f"labels are single-class ({n_pos}/{n} positive); "
            "fitting a constant-probability model",
            DegenerateLabelsWarning,
            stacklevel=2,
        )
        return ConstantModel((n_pos + 1) / (n + 2))

    cuts = [_feature_cuts(X[:, j]) for j in range(n_feats)]
    n_bins = max(2, max(c.size for c in cuts) + 1)
    codes = _encode(X, cuts)
    labels = (y == 1).astype(np.uint8)

    if hp["feature_subsample"] is None:
        mtry = max(1, int(round(n_feats**0.5)))
    else:
        frac = float(hp["feature_subsample"])
        if not 0.0 < frac <= 1.0:
            raise ValueError("feature_subsample must be in (0, 1]")
        mtry = max(1, int(round(frac * n_feats)))
    mtry = min(mtry, n_feats)
    max_depth = hp["max_depth"]
    if max_depth is None:
        max_depth = 10**9
    min_leaf = int(hp["min_leaf"])
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")

    rng = np.random.default_rng(int(hp["seed"]))
    trees = []
    for _ in range(int(hp["n_trees"])):
        rows = rng.integers(0, n, size=n).astype(np.int64)
        tree_seed = int(rng.integers(1, 2**32 - 1))
        trees.append(
            grow_tree(codes, labels, rows, mtry, n_bins, max_depth, min_leaf, tree_seed)
        )
    return ForestModel(cuts, trees, dict(hp))
