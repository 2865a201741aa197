"""Classification metrics and the (selection x classifier) experiment grid."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import models
from .errors import AucUndefinedError, CellError, ParameterError, ShapeError
from .featsel import SelectionResult, apply_selection, boruta_select, ridge_select, rff_for_data
from .ingest import Dataset
from .models.forest import RandomForestParams
from .seeding import derive_seed

SCORE_FIELDS = ("accuracy", "precision_weighted", "recall_weighted", "f1_weighted", "f1_macro",
                "roc_auc_ovr_macro")
CSV_HEADER = ("selection", "classifier", "accuracy", "precision", "recall", "f1_weighted",
              "f1_macro", "roc_auc", "train_time_sec")


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[i, j]`` = instances of true class i predicted as class j."""

    counts: np.ndarray

    @property
    def k(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())


def confusion(y_true, y_pred, k: int) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ShapeError(f"label arrays differ in shape: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ShapeError("cannot build a confusion matrix from empty inputs")
    if min(y_true.min(), y_pred.min()) < 0 or max(y_true.max(), y_pred.max()) >= k:
        raise ShapeError(f"labels must lie in 0..{k - 1}")
    counts = np.bincount(y_true * k + y_pred, minlength=k * k).reshape(k, k)
    return ConfusionMatrix(counts)


def roc_auc_binary(positive, scores) -> float:
    """Area under the ROC curve by the trapezoidal rule.

    The curve has one vertex per distinct score threshold, so tied scores
    contribute a diagonal segment (i.e. half credit).
    """
    positive = np.asarray(positive, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = positive.sum()
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise AucUndefinedError("AUC needs both positive and negative instances")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    hits = positive[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tpr = np.r_[0.0, np.cumsum(hits)[last] / n_pos]
    fpr = np.r_[0.0, np.cumsum(~hits)[last] / n_neg]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_auc_ovr(y_true, scores):
    """Macro one-vs-rest AUC.

    Returns ``(auc, skipped)`` where ``skipped`` lists classes without both
    positive and negative instances.
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    aucs, skipped = [], []
    for c in range(scores.shape[1]):
        pos = y_true == c
        if pos.all() or not pos.any():
            skipped.append(c)
            continue
        aucs.append(roc_auc_binary(pos, scores[:, c]))
    if not aucs:
        raise AucUndefinedError("every class lacks positives or negatives; AUC is undefined")
    return float(np.mean(aucs)), skipped


@dataclass
class MetricsReport:
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    f1_macro: float
    roc_auc_ovr_macro: float
    train_time_seconds: float = 0.0
    per_class_f1: list = field(default_factory=list)
    auc_skipped_classes: list = field(default_factory=list)

    def scores(self) -> tuple:
        return tuple(getattr(self, f) for f in SCORE_FIELDS)

    def to_json(self) -> dict:
        return asdict(self)


def _safe_div(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.zeros_like(a)
    np.divide(a, b, out=out, where=b > 0)
    return out


def metrics(cm: ConfusionMatrix, scores, y_true) -> MetricsReport:
    """Accuracy, support-weighted precision/recall/F1, macro F1 and OvR AUC.

    Precision, recall and F1 of a class are 0 whenever their denominator is.
    """
    counts = cm.counts.astype(np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    y_true = np.asarray(y_true)
    if scores.shape != (cm.total, cm.k) or y_true.shape != (cm.total,):
        raise ShapeError(f"scores {scores.shape} / labels {y_true.shape} do not match a {cm.k}-class "
                         f"confusion matrix over {cm.total} instances")
    tp = np.diag(counts)
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    precision = _safe_div(tp, predicted)
    recall = _safe_div(tp, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    w = support / support.sum()
    auc, skipped = roc_auc_ovr(y_true, scores)
    return MetricsReport(
        accuracy=float(tp.sum() / counts.sum()),
        precision_weighted=float(w @ precision),
        recall_weighted=float(w @ recall),
        f1_weighted=float(w @ f1),
        f1_macro=float(f1.mean()),
        roc_auc_ovr_macro=auc,
        per_class_f1=f1.tolist(),
        auc_skipped_classes=skipped,
    )


def evaluate(model, test: Dataset) -> MetricsReport:
    pred = models.predict(model, test.X)
    return metrics(confusion(test.y, pred.labels, test.k), pred.scores, test.y)


# -- experiment grid ------------------------------------------------------------


class Transform:
    """A fitted feature-space change: column selection, RFF map, or identity."""

    def __init__(self, method, selection=None, rff=None):
        self.method = method
        self.selection = selection
        self.rff = rff

    def apply(self, data: Dataset) -> Dataset:
        if self.selection is not None:
            return apply_selection(data, self.selection)
        if self.rff is not None:
            Z = self.rff.transform(data.X)
            return data.with_features(Z, [f"rff_{i}" for i in range(Z.shape[1])])
        return data

    def to_json(self):
        if self.selection is not None:
            return self.selection.to_json()
        if self.rff is not None:
            return {"method": "rff", **self.rff.to_json()}
        return {"method": self.method}


SELECTION_METHODS = ("none", "boruta", "ridge", "rff")


def fit_transform(spec: dict, train: Dataset, seed: int) -> Transform:
    """Fit the selection described by ``spec`` on training data only."""
    method = spec.get("method", "none")
    if method == "none":
        return Transform("none")
    if method == "boruta":
        forest = RandomForestParams(**spec.get("forest", {}))
        result = boruta_select(train, forest, rounds=int(spec.get("rounds", 1)), seed=seed)
        return Transform(method, selection=result)
    if method == "ridge":
        result = ridge_select(train, alpha=float(spec.get("alpha", 1.0)),
                              rel_threshold=float(spec.get("rel_threshold", 0.1)))
        return Transform(method, selection=result)
    if method == "rff":
        rff = rff_for_data(train.X, D=int(spec.get("D", 256)), sigma=spec.get("sigma"), seed=seed)
        return Transform(method, rff=rff)
    raise ParameterError(f"unknown selection method {method!r}; expected one of {SELECTION_METHODS}")


def selection_label(spec: dict) -> str:
    return spec.get("name") or spec.get("method", "none")


def classifier_label(spec: dict) -> str:
    return spec.get("name") or spec["kind"]


def classifier_params(spec: dict) -> dict:
    return {k: v for k, v in spec.items() if k not in ("kind", "name")}


@dataclass
class GridRow:
    selection: str
    classifier: str
    report: MetricsReport
    model: object = None

    def csv_row(self):
        r = self.report
        return [self.selection, self.classifier, r.accuracy, r.precision_weighted, r.recall_weighted,
                r.f1_weighted, r.f1_macro, r.roc_auc_ovr_macro, r.train_time_seconds]


@dataclass
class GridResult:
    rows: list
    transforms: dict

    def row(self, selection, classifier) -> GridRow:
        return next(r for r in self.rows if r.selection == selection and r.classifier == classifier)


def run_grid(train: Dataset, test: Dataset, selections, classifiers, seed: int = 42,
             jobs: int = 1) -> GridResult:
    """Cross every selection spec with every classifier spec.

    Selections are fitted on ``train`` only.  Each cell's classifier seed is
    derived from ``seed`` and the cell's labels, so results do not depend on
    evaluation order or ``jobs``.  Rows come back in config order.
    """
    transforms = {}
    for spec in selections:
        label = selection_label(spec)
        try:
            transforms[label] = fit_transform(spec, train, derive_seed(seed, "selection", label))
        except Exception as exc:
            raise CellError(label, "*", exc) from exc

    cells = [(selection_label(s), c) for s in selections for c in classifiers]

    def run_cell(cell):
        sel, cspec = cell
        clf = classifier_label(cspec)
        try:
            tr = transforms[sel].apply(train)
            te = transforms[sel].apply(test)
            t0 = time.perf_counter()
            model = models.fit(cspec["kind"], tr, classifier_params(cspec),
                               seed=derive_seed(seed, "model", sel, clf))
            elapsed = time.perf_counter() - t0
            report = evaluate(model, te)
        except Exception as exc:
            raise CellError(sel, clf, exc) from exc
        report.train_time_seconds = elapsed
        return GridRow(sel, clf, report, model)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    return GridResult(rows, transforms)


def best_per_column(rows) -> dict:
    """Map each score column (and train time) to the labels of its best cells."""
    best = {}
    for f in SCORE_FIELDS:
        top = max(getattr(r.report, f) for r in rows)
        best[f] = [[r.selection, r.classifier] for r in rows if getattr(r.report, f) == top]
    fastest = min(r.report.train_time_seconds for r in rows)
    best["train_time_seconds"] = [[r.selection, r.classifier] for r in rows
                                  if r.report.train_time_seconds == fastest]
    return best


def summarize_repeats(results) -> list[dict]:
    """Mean and standard deviation per cell over repeated grids."""
    out = []
    for i, row in enumerate(results[0].rows):
        vals = np.array([[*r.rows[i].report.scores(), r.rows[i].report.train_time_seconds]
                         for r in results])
        entry = {"selection": row.selection, "classifier": row.classifier, "repeats": len(results)}
        for j, name in enumerate(SCORE_FIELDS + ("train_time_seconds",)):
            entry[f"{name}_mean"] = float(vals[:, j].mean())
            entry[f"{name}_sd"] = float(vals[:, j].std(ddof=1)) if len(results) > 1 else 0.0
        out.append(entry)
    return out
