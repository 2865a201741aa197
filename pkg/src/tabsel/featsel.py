"""Feature selection and random-feature transforms.

Two selectors produce a :class:`SelectionResult`:

* :func:`boruta_select` keeps features whose random-forest importance beats
  the best importance among shuffled copies ("shadow" features).
* :func:`ridge_select` keeps features whose standardized ridge slope is not
  shrunk close to zero.

:func:`rff_fit` / :func:`rff_transform` build random Fourier features whose
inner products approximate the Gaussian kernel; they replace the feature
space rather than select from it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import EmptySelectionError, LabelError, ParameterError, ShapeError, SolveError
from .ingest import Dataset
from .models.forest import RandomForest, RandomForestParams
from .seeding import derive_seed, rng_for


@dataclass(frozen=True)
class SelectionResult:
    """Scores, threshold and the kept feature indices of one selector run.

    ``selected`` is always ``{i : importances[i] > threshold}``.  Boruta runs
    additionally carry the per-feature vote counts and the round-averaged Gini
    importances and shadow maximum.
    """

    method: str
    importances: np.ndarray
    threshold: float
    selected: tuple
    feature_names: tuple = ()
    votes: tuple | None = None
    gini_importances: tuple | None = None
    shadow_max: float | None = None

    def __post_init__(self):
        imp = np.asarray(self.importances, dtype=np.float64)
        object.__setattr__(self, "importances", imp)
        object.__setattr__(self, "selected", tuple(sorted(int(i) for i in self.selected)))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @classmethod
    def from_scores(cls, method, importances, threshold, feature_names=(), **extra):
        """Build a result with ``selected = {i : importances[i] > threshold}``."""
        importances = np.asarray(importances, dtype=np.float64)
        selected = tuple(np.flatnonzero(importances > threshold).tolist())
        if not selected:
            raise EmptySelectionError(
                f"{method}: no feature exceeds the threshold {threshold:.6g}; "
                "relax the threshold (or add rounds) to keep at least one feature"
            )
        return cls(method, importances, float(threshold), selected, feature_names, **extra)

    @property
    def selected_names(self):
        return [self.feature_names[i] for i in self.selected] if self.feature_names else []

    def to_json(self) -> dict:
        doc = {
            "method": self.method,
            "threshold": self.threshold,
            "importances": self.importances.tolist(),
            "selected": list(self.selected),
            "feature_names": list(self.feature_names),
        }
        if self.votes is not None:
            doc["votes"] = list(self.votes)
        if self.gini_importances is not None:
            doc["gini_importances"] = list(self.gini_importances)
            doc["shadow_max"] = self.shadow_max
        return doc

    @classmethod
    def from_json(cls, doc) -> "SelectionResult":
        if isinstance(doc, str):
            doc = json.loads(doc)
        gini = doc.get("gini_importances")
        return cls(doc["method"], doc["importances"], doc["threshold"], doc["selected"],
                   doc.get("feature_names", ()),
                   tuple(doc["votes"]) if "votes" in doc else None,
                   tuple(gini) if gini is not None else None,
                   doc.get("shadow_max"))


def apply_selection(data: Dataset, result: SelectionResult) -> Dataset:
    idx = list(result.selected)
    bad = [i for i in idx if not 0 <= i < data.d]
    if bad:
        raise IndexError(f"selected indices {bad} out of range for {data.d} features")
    return data.with_features(data.X[:, idx], [data.feature_names[i] for i in idx])


# -- Boruta -------------------------------------------------------------------


def shadow_matrix(X, rng):
    """Copy of ``X`` with every column permuted independently."""
    return rng.permuted(X, axis=0)


def boruta_select(data: Dataset, forest_params: RandomForestParams | None = None,
                  rounds: int = 1, seed: int = 0) -> SelectionResult:
    """Shadow-feature screening with a random forest.

    Each round appends an independently shuffled copy of every column, fits
    a forest on the resulting 2d columns and marks the original features
    whose Gini importance strictly exceeds the largest shadow importance.  A
    feature is selected when marked in more than half of the rounds.

    With ``rounds == 1`` the result reports the raw importances and the
    shadow maximum as threshold.  With more rounds ``importances`` holds the
    fraction of rounds won (threshold 0.5), and the round-averaged Gini
    importances and shadow maximum are kept in ``gini_importances`` and
    ``shadow_max``.
    """
    if rounds < 1:
        raise ParameterError("rounds must be at least 1")
    if np.unique(data.y).size < 2:
        raise LabelError("Boruta needs at least two classes")
    params = forest_params or RandomForestParams()
    X = np.asarray(data.X, dtype=np.float64)
    d = X.shape[1]

    imps = np.zeros((rounds, d))
    shadow_max = np.zeros(rounds)
    for r in range(rounds):
        rng = rng_for(seed, "boruta", r)
        X2 = np.hstack([X, shadow_matrix(X, rng)])
        forest = RandomForest.from_params(params).fit(
            X2, data.y, data.k, rng_for(seed, "boruta", r, "forest", params.seed))
        imp = forest.feature_importances()
        imps[r] = imp[:d]
        shadow_max[r] = imp[d:].max()

    votes = (imps > shadow_max[:, None]).sum(axis=0)
    extra = dict(votes=tuple(int(v) for v in votes),
                 gini_importances=tuple(imps.mean(axis=0).tolist()),
                 shadow_max=float(shadow_max.mean()))
    if rounds == 1:
        return SelectionResult.from_scores("boruta", imps[0], shadow_max[0], data.feature_names, **extra)
    return SelectionResult.from_scores("boruta", votes / rounds, 0.5, data.feature_names, **extra)


# -- ridge --------------------------------------------------------------------


def zscore(X):
    X = np.asarray(X, dtype=np.float64)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - X.mean(axis=0)) / sd


def ridge_fit(X, t, alpha: float = 1.0, standardize: bool = False) -> np.ndarray:
    """Ridge regression with an unpenalized intercept.

    Minimizes ``sum (t - X w - w0)^2 + alpha * |w|^2`` by solving the
    centered normal equations ``(Xc'Xc + alpha I) w = Xc' tc``.

    Returns
    -------
    ndarray of length d + 1: the weights followed by the intercept.
    """
    X = np.asarray(X, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if X.ndim != 2 or t.shape != (X.shape[0],):
        raise ShapeError(f"X {X.shape} and t {t.shape} are incompatible")
    if X.shape[0] < 2:
        raise ShapeError("ridge regression needs at least two rows")
    if alpha < 0:
        raise ParameterError("alpha must be non-negative")
    if standardize:
        X = zscore(X)
    x_mean = X.mean(axis=0)
    t_mean = t.mean()
    Xc = X - x_mean
    gram = Xc.T @ Xc
    if alpha == 0:
        rank = np.linalg.matrix_rank(gram)
        if rank < gram.shape[0]:
            raise SolveError(f"normal equations are rank deficient (rank {rank} < {gram.shape[0]}) at alpha=0")
    gram[np.diag_indices_from(gram)] += alpha
    try:
        w = np.linalg.solve(gram, Xc.T @ (t - t_mean))
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"ridge system is singular: {exc}") from None
    return np.append(w, t_mean - x_mean @ w)


def ridge_select(data: Dataset, alpha: float = 1.0, rel_threshold: float = 0.1) -> SelectionResult:
    """Keep features with large standardized one-vs-rest ridge slopes.

    One ridge regression per class against 0/1 membership targets; a
    feature's importance is its largest absolute slope over the classes.
    """
    if alpha <= 0:
        raise ParameterError("ridge_select needs alpha > 0")
    if not 0.0 < rel_threshold < 1.0:
        raise ParameterError("rel_threshold must lie in (0, 1)")
    Xs = zscore(data.X)
    slopes = np.array([ridge_fit(Xs, (data.y == c).astype(np.float64), alpha)[:-1]
                       for c in range(data.k)])
    importances = np.abs(slopes).max(axis=0)
    return SelectionResult.from_scores("ridge", importances, rel_threshold * importances.max(),
                                       data.feature_names)


# -- random Fourier features ----------------------------------------------------


@dataclass(frozen=True)
class RffMap:
    """Frozen random projection ``z(x) = sqrt(2/D) cos(W x + b)``."""

    W: np.ndarray
    b: np.ndarray
    sigma: float

    @property
    def D(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    def transform(self, X):
        return rff_transform(self, X)

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "D": self.D, "d": self.d,
                "W": self.W.ravel().tolist(), "b": self.b.tolist()}

    @classmethod
    def from_json(cls, doc) -> "RffMap":
        W = np.asarray(doc["W"], dtype=np.float64).reshape(doc["D"], doc["d"])
        return cls(W, np.asarray(doc["b"], dtype=np.float64), float(doc["sigma"]))


def rff_fit(d: int, D: int = 256, sigma: float = 1.0, seed: int = 0) -> RffMap:
    if d < 1 or D < 1:
        raise ParameterError("input and output dimensions must be positive")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 1.0 / sigma, size=(D, d))
    b = rng.uniform(0.0, 2.0 * np.pi, size=D)
    return RffMap(W, b, float(sigma))


def rff_transform(rff: RffMap, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != rff.d:
        raise ShapeError(f"expected {rff.d} input columns, got shape {X.shape}")
    return np.sqrt(2.0 / rff.D) * np.cos(X @ rff.W.T + rff.b)


def median_bandwidth(X, max_rows: int = 1000, seed: int = 0) -> float:
    """Median pairwise Euclidean distance over a row subsample.

    Falls back to 1.0 when all sampled rows coincide.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] > max_rows:
        X = X[np.random.default_rng(seed).choice(X.shape[0], max_rows, replace=False)]
    if X.shape[0] < 2:
        return 1.0
    med = float(np.median(pdist(X)))
    return med if med > 0 else 1.0


def rff_for_data(X, D: int = 256, sigma: float | None = None, seed: int = 0) -> RffMap:
    """Fit an RFF map for ``X``, picking sigma by the median heuristic if unset."""
    if sigma is None:
        sigma = median_bandwidth(X, seed=derive_seed(seed, "bandwidth"))
    return rff_fit(np.asarray(X).shape[1], D, sigma, seed)
