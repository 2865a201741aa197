import numpy as np
from scipy.spatial.distance import cdist


class KNearestNeighbors:
    """Majority vote among the ``k`` nearest training rows (Euclidean).

    Equal distances are resolved by training-row order, so the neighbour set
    is deterministic.  Scores are vote fractions.
    """

    kind = "knn"

    def __init__(self, k=5, chunk_size=512):
        self.k = k
        self.chunk_size = chunk_size

    def params(self):
        return {"k": self.k}

    def fit(self, X, y, n_classes, rng=None):
        self.X_ = np.array(X, dtype=np.float64)
        self.y_ = np.array(y, dtype=np.int64)
        self.n_classes_ = n_classes
        return self

    def neighbors(self, X):
        X = np.asarray(X, dtype=np.float64)
        k = min(self.k, self.X_.shape[0])
        out = np.empty((X.shape[0], k), dtype=np.int64)
        for lo in range(0, X.shape[0], self.chunk_size):
            dist = cdist(X[lo:lo + self.chunk_size], self.X_, "sqeuclidean")
            kth = np.partition(dist, k - 1, axis=1)[:, k - 1]
            for i, row in enumerate(dist):
                cand = np.flatnonzero(row <= kth[i])
                # lexsort: last key is primary -> distance, then row index
                order = np.lexsort((cand, row[cand]))
                out[lo + i] = cand[order[:k]]
        return out

    def predict_scores(self, X):
        nb = self.neighbors(X)
        votes = np.zeros((nb.shape[0], self.n_classes_))
        labels = self.y_[nb]
        for c in range(self.n_classes_):
            votes[:, c] = (labels == c).sum(axis=1)
        return votes / nb.shape[1]

    def get_state(self):
        return {"X": self.X_.tolist(), "y": self.y_.tolist(), "n_classes": self.n_classes_}

    def set_state(self, state):
        self.X_ = np.asarray(state["X"], dtype=np.float64).reshape(len(state["y"]), -1)
        self.y_ = np.asarray(state["y"], dtype=np.int64)
        self.n_classes_ = state["n_classes"]
        return self
