"""CART classification trees with Gini impurity.

The builder runs under numba: a random forest of 100 trees is refit once per
Boruta round, so this loop dominates the runtime of the whole pipeline.

Trees are stored as flat arrays (``feature``, ``threshold``, ``left``,
``right``, ``value``) where leaves have ``feature == -1`` and ``value`` holds
the weighted class counts of the training rows that reached each node.
Samples go left when ``x[feature] <= threshold``.
"""

import numpy as np
from numba import njit

LEAF = -1


@njit(cache=True, nogil=True)
def _gini(counts, total):
    if total <= 0.0:
        return 0.0
    s = 0.0
    for c in range(counts.shape[0]):
        p = counts[c] / total
        s += p * p
    return 1.0 - s


@njit(cache=True, nogil=True)
def _build(X, y, rows, weights, n_classes, max_features, shuffle, max_depth, min_samples_split, seed):
    n_features = X.shape[1]
    np.random.seed(seed)

    cap = 2 * rows.shape[0] + 1
    feature = np.full(cap, LEAF, dtype=np.int64)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros((cap, n_classes), dtype=np.float64)
    importance = np.zeros(n_features, dtype=np.float64)

    idx = rows.copy()
    buf = np.empty_like(idx)
    vals = np.empty(idx.shape[0], dtype=np.float64)
    left_counts = np.empty(n_classes, dtype=np.float64)
    right_counts = np.empty(n_classes, dtype=np.float64)
    all_features = np.arange(n_features)

    # stack entries: node id, start, end, depth
    stack = np.empty((cap, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = idx.shape[0]
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]

        total = 0.0
        for i in range(start, end):
            r = idx[i]
            value[node, y[r]] += weights[r]
            total += weights[r]
        impurity = _gini(value[node], total)

        if impurity <= 0.0 or end - start < min_samples_split or (max_depth >= 0 and depth >= max_depth):
            continue

        if shuffle:
            order = np.random.permutation(n_features)
        else:
            order = all_features

        best_f = -1
        best_pos = -1
        best_proxy = np.inf
        best_thr = 0.0
        m = end - start
        n_varying = 0
        for j in range(n_features):
            # features constant within the node do not count toward max_features
            if n_varying >= max_features:
                break
            f = order[j]
            for i in range(m):
                vals[i] = X[idx[start + i], f]
            srt = np.argsort(vals[:m])
            if not vals[srt[m - 1]] > vals[srt[0]]:
                continue
            n_varying += 1
            for c in range(n_classes):
                left_counts[c] = 0.0
                right_counts[c] = value[node, c]
            wl = 0.0
            for i in range(m - 1):
                r = idx[start + srt[i]]
                wr_i = weights[r]
                left_counts[y[r]] += wr_i
                right_counts[y[r]] -= wr_i
                wl += wr_i
                a = vals[srt[i]]
                b = vals[srt[i + 1]]
                if not b > a:
                    continue
                wr = total - wl
                proxy = wl * _gini(left_counts, wl) + wr * _gini(right_counts, wr)
                # ties go to the earliest visited feature, then lowest threshold
                if proxy < best_proxy:
                    best_proxy = proxy
                    best_f = f
                    best_pos = i
                    thr = 0.5 * (a + b)
                    if thr >= b:
                        thr = a
                    best_thr = thr

        if best_f < 0:
            continue

        # partition rows of this node on the chosen split
        n_left = 0
        n_right = 0
        for i in range(start, end):
            r = idx[i]
            if X[r, best_f] <= best_thr:
                idx[start + n_left] = r
                n_left += 1
            else:
                buf[n_right] = r
                n_right += 1
        for i in range(n_right):
            idx[start + n_left + i] = buf[i]

        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lc
        right[node] = rc
        importance[best_f] += impurity * total - best_proxy

        stack[top, 0] = rc
        stack[top, 1] = start + n_left
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = lc
        stack[top, 1] = start
        stack[top, 2] = start + n_left
        stack[top, 3] = depth + 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), importance)


@njit(cache=True, nogil=True)
def _apply(X, feature, threshold, left, right):
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        node = 0
        while feature[node] != LEAF:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def _normalized(v):
    s = v.sum()
    return v / s if s > 0 else np.zeros_like(v)


class Tree:
    """Fitted tree arrays plus the raw (unnormalized) impurity decreases."""

    def __init__(self, feature, threshold, left, right, value, importance):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.importance = np.asarray(importance, dtype=np.float64)

    @classmethod
    def grow(cls, X, y, n_classes, weights=None, max_features=None, shuffle_features=False,
             max_depth=None, min_samples_split=2, seed=0):
        """Grow a tree on the rows with positive ``weights``.

        Without ``shuffle_features`` features are visited in index order, so
        equal-gain splits resolve to the lowest feature index.  With it, each
        node visits features in a fresh random order and stops once
        ``max_features`` non-constant features were examined; ties go to the
        earliest drawn feature, which keeps column position from biasing
        importances.
        """
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        n, d = X.shape
        if weights is None:
            weights = np.ones(n)
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        rows = np.flatnonzero(weights > 0).astype(np.int64)
        arrays = _build(
            X, y, rows, weights, int(n_classes),
            d if max_features is None else int(max_features), bool(shuffle_features),
            -1 if max_depth is None else int(max_depth),
            int(min_samples_split), int(seed) % (2 ** 32),
        )
        return cls(*arrays)

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    def apply(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _apply(X, self.feature, self.threshold, self.left, self.right)

    def predict_proba(self, X):
        counts = self.value[self.apply(X)]
        return counts / counts.sum(axis=1, keepdims=True)

    def feature_importances(self):
        return _normalized(self.importance)

    def get_state(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "importance": self.importance.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        return cls(state["feature"], state["threshold"], state["left"], state["right"],
                   np.asarray(state["value"], dtype=np.float64).reshape(len(state["feature"]), -1),
                   state["importance"])


class DecisionTree:
    """Single CART tree over all features, grown to purity unless capped."""

    kind = "dt"

    def __init__(self, max_depth=None, min_samples_split=2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.tree_ = None

    def params(self):
        return {"max_depth": self.max_depth, "min_samples_split": self.min_samples_split}

    def fit(self, X, y, n_classes, rng=None):
        self.tree_ = Tree.grow(X, y, n_classes, max_depth=self.max_depth,
                               min_samples_split=self.min_samples_split)
        return self

    def predict_scores(self, X):
        return self.tree_.predict_proba(X)

    def feature_importances(self):
        return self.tree_.feature_importances()

    def get_state(self):
        return {"tree": self.tree_.get_state()}

    def set_state(self, state):
        self.tree_ = Tree.from_state(state["tree"])
        return self
