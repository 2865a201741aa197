import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ParameterError
from .tree import Tree


@dataclass(frozen=True)
class RandomForestParams:
    """Forest hyperparameters.

    ``max_features`` is ``"sqrt"``, ``"all"`` or an explicit integer count of
    features drawn at every split.
    """

    n_trees: int = 100
    max_features: object = "sqrt"
    max_depth: int | None = None
    min_samples_split: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ParameterError("n_trees must be positive")
        if self.min_samples_split < 2:
            raise ParameterError("min_samples_split must be at least 2")
        if self.max_depth is not None and self.max_depth < 1:
            raise ParameterError("max_depth must be positive")
        if isinstance(self.max_features, str):
            if self.max_features not in ("sqrt", "all"):
                raise ParameterError(f"unknown max_features {self.max_features!r}")
        elif int(self.max_features) < 1:
            raise ParameterError("explicit max_features must be positive")

    def features_per_split(self, d):
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(d)))
        if self.max_features == "all":
            return d
        m = int(self.max_features)
        if m > d:
            raise ParameterError(f"max_features={m} exceeds the {d} available features")
        return m

    def to_json(self):
        return asdict(self)


class RandomForest:
    """Bagged CART trees with per-split feature subsampling.

    Each tree draws its bootstrap sample and its split-feature stream from a
    child generator spawned off the fit seed, so trees are reproducible one
    by one.
    """

    kind = "rf"

    def __init__(self, n_trees=100, max_features="sqrt", max_depth=None, min_samples_split=2):
        self.config = RandomForestParams(n_trees, max_features, max_depth, min_samples_split)
        self.trees_ = []
        self.n_features_ = None

    @classmethod
    def from_params(cls, p: RandomForestParams):
        return cls(p.n_trees, p.max_features, p.max_depth, p.min_samples_split)

    def params(self):
        c = self.config
        return {"n_trees": c.n_trees, "max_features": c.max_features,
                "max_depth": c.max_depth, "min_samples_split": c.min_samples_split}

    def fit(self, X, y, n_classes, rng):
        X = np.ascontiguousarray(X, dtype=np.float64)
        n, d = X.shape
        m = self.config.features_per_split(d)
        self.n_features_ = d
        self.trees_ = []
        for child in rng.spawn(self.config.n_trees):
            weights = np.bincount(child.integers(0, n, size=n), minlength=n).astype(np.float64)
            self.trees_.append(Tree.grow(
                X, y, n_classes, weights=weights, max_features=m, shuffle_features=True,
                max_depth=self.config.max_depth,
                min_samples_split=self.config.min_samples_split,
                seed=int(child.integers(0, 2 ** 32)),
            ))
        return self

    def predict_scores(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        total = None
        for tree in self.trees_:
            p = tree.predict_proba(X)
            total = p if total is None else total + p
        return total / len(self.trees_)

    def feature_importances(self):
        per_tree = [t.feature_importances() for t in self.trees_]
        mean = np.mean(per_tree, axis=0)
        s = mean.sum()
        return mean / s if s > 0 else mean

    def get_state(self):
        return {"n_features": self.n_features_, "trees": [t.get_state() for t in self.trees_]}

    def set_state(self, state):
        self.n_features_ = state["n_features"]
        self.trees_ = [Tree.from_state(t) for t in state["trees"]]
        return self
