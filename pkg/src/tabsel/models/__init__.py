"""Classifier roster behind a single ``fit`` / ``predict`` contract.

Kinds: ``nb`` (Gaussian naive Bayes), ``knn``, ``dt`` (CART), ``rf``
(random forest), ``lr`` (multinomial logistic regression), ``mlp``
(one-hidden-layer feedforward network).

>>> model = fit("rf", train, {"n_trees": 50}, seed=0)     # doctest: +SKIP
>>> pred = predict(model, test.X)                        # doctest: +SKIP
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapabilityError, DataError, LabelError, ParameterError, ShapeError
from .forest import RandomForest, RandomForestParams
from .knn import KNearestNeighbors
from .linear import LogisticRegression
from .mlp import FeedforwardNet
from .naive_bayes import GaussianNB
from .tree import DecisionTree, Tree

FORMAT_VERSION = 1

REGISTRY = {
    "nb": GaussianNB,
    "knn": KNearestNeighbors,
    "dt": DecisionTree,
    "rf": RandomForest,
    "lr": LogisticRegression,
    "mlp": FeedforwardNet,
}
KINDS = tuple(REGISTRY)


def make_estimator(kind: str, params: dict | None = None):
    try:
        cls = REGISTRY[kind]
    except KeyError:
        raise ParameterError(f"unknown classifier kind {kind!r}; expected one of {KINDS}") from None
    try:
        return cls(**(params or {}))
    except TypeError as exc:
        raise ParameterError(f"bad parameters for {kind!r}: {exc}") from None


@dataclass(frozen=True)
class Prediction:
    labels: np.ndarray
    scores: np.ndarray


@dataclass
class TrainedModel:
    kind: str
    estimator: object
    k_classes: int
    d_features: int

    @property
    def params(self) -> dict:
        return self.estimator.params()

    def predict(self, X) -> Prediction:
        return predict(self, X)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "params": self.params,
            "k_classes": self.k_classes,
            "d_features": self.d_features,
            "state": self.estimator.get_state(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrainedModel":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ParameterError(f"unsupported model format version {doc.get('format_version')!r}")
        est = make_estimator(doc["kind"], doc["params"]).set_state(doc["state"])
        return cls(doc["kind"], est, int(doc["k_classes"]), int(doc["d_features"]))


def fit(kind: str, train, params: dict | None = None, seed: int = 0) -> TrainedModel:
    """Fit a classifier of ``kind`` on a :class:`~tabsel.ingest.Dataset`."""
    X = np.asarray(train.X, dtype=np.float64)
    y = np.asarray(train.y, dtype=np.int64)
    if not np.all(np.isfinite(X)):
        raise DataError("training features contain non-finite values")
    if np.unique(y).size < 2:
        raise LabelError("training labels contain a single class")
    est = make_estimator(kind, params)
    est.fit(X, y, train.k, np.random.default_rng(seed))
    return TrainedModel(kind, est, train.k, X.shape[1])


def predict(model: TrainedModel, X) -> Prediction:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.d_features:
        raise ShapeError(f"expected a matrix with {model.d_features} columns, got shape {X.shape}")
    scores = model.estimator.predict_scores(X)
    return Prediction(np.argmax(scores, axis=1), scores)


def feature_importances(model: TrainedModel) -> np.ndarray:
    if model.kind not in ("dt", "rf"):
        raise CapabilityError(f"{model.kind!r} models do not expose impurity importances")
    return model.estimator.feature_importances()


__all__ = [
    "DecisionTree", "FeedforwardNet", "GaussianNB", "KINDS", "KNearestNeighbors",
    "LogisticRegression", "Prediction", "RandomForest", "RandomForestParams",
    "TrainedModel", "Tree", "feature_importances", "fit", "make_estimator", "predict",
]
