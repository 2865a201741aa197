"""Information-gain ranking of attributes against the class label.

Gains are in bits.  Numeric attributes are cut into equal-frequency bins
before counting; rankings flag which attributes were binned.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .ingest import Dataset, RawTable


def _codes(values):
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = arr.astype(str)
    return np.unique(arr, return_inverse=True)[1].ravel()


def entropy(labels) -> float:
    """Shannon entropy (base 2) of the empirical label distribution."""
    codes = _codes(labels)
    if codes.size == 0:
        raise ShapeError("entropy of an empty sample is undefined")
    p = np.bincount(codes) / codes.size
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(labels, given) -> float:
    """H(labels | given) = sum_v P(given=v) H(labels | given=v)."""
    y = _codes(labels)
    g = _codes(given)
    if y.shape != g.shape:
        raise ShapeError(f"length mismatch: {y.size} labels vs {g.size} values")
    h = 0.0
    for v in np.unique(g):
        mask = g == v
        h += mask.mean() * entropy(y[mask])
    return h


def info_gain(feature, labels) -> float:
    """H(labels) - H(labels | feature), clamped to [0, H(labels)]."""
    feature = np.asarray(feature)
    labels = np.asarray(labels)
    if feature.shape[0] != labels.shape[0]:
        raise ShapeError(f"length mismatch: {feature.shape[0]} values vs {labels.shape[0]} labels")
    h = entropy(labels)
    return float(min(max(h - conditional_entropy(labels, feature), 0.0), h))


def equal_frequency_bins(values, n_bins: int = 10) -> np.ndarray:
    """Bin codes 0..b-1 from quantile cut points; tied cut points collapse."""
    x = np.asarray(values, dtype=np.float64)
    edges = np.unique(np.quantile(x, np.linspace(0.0, 1.0, n_bins + 1))[1:-1])
    return np.searchsorted(edges, x, side="right")


@dataclass
class AttributeRanking:
    entries: list  # (name, gain) pairs, highest gain first
    label_entropy: float
    discretized: list = field(default_factory=list)

    @property
    def names(self):
        return [n for n, _ in self.entries]

    def gain(self, name) -> float:
        return dict(self.entries)[name]

    def rows(self):
        return [(n, g) for n, g in self.entries]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["attribute", "information_gain_bits"])
            w.writerows(self.entries)


def _rank(columns: dict, labels, discretized) -> AttributeRanking:
    if not columns:
        raise ShapeError("ranking needs at least one attribute")
    gains = [(name, info_gain(vals, labels)) for name, vals in columns.items()]
    gains.sort(key=lambda e: (-e[1], e[0]))
    return AttributeRanking(gains, entropy(labels), sorted(discretized))


def rank_attributes(data, label_column: str | None = None, n_bins: int = 10,
                    numeric: set | None = None) -> AttributeRanking:
    """Rank every non-label attribute by information gain with the label.

    ``data`` is either a :class:`RawTable` (columns of kind ``numeric`` are
    binned) or a :class:`Dataset` whose features are treated as categorical
    codes except those named in ``numeric``.
    """
    if isinstance(data, RawTable):
        label_column = label_column or next(c.name for c in data.columns if c.kind == "label")
        labels = data.column(label_column)
        columns, binned = {}, []
        for spec in data.columns:
            if spec.name == label_column:
                continue
            vals = data.column(spec.name)
            if spec.kind == "numeric":
                vals = equal_frequency_bins([float(v) for v in vals], n_bins)
                binned.append(spec.name)
            columns[spec.name] = vals
        return _rank(columns, labels, binned)

    if isinstance(data, Dataset):
        numeric = set(numeric or ())
        columns, binned = {}, []
        for j, name in enumerate(data.feature_names):
            vals = data.X[:, j]
            if name in numeric:
                vals = equal_frequency_bins(vals, n_bins)
                binned.append(name)
            columns[name] = vals
        return _rank(columns, data.y, binned)

    raise TypeError(f"cannot rank attributes of {type(data).__name__}")
