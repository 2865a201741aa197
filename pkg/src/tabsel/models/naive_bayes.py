import numpy as np
from scipy.special import logsumexp


class GaussianNB:
    """Gaussian naive Bayes with a variance floor.

    The floor is ``var_smoothing`` times the largest feature variance of the
    training matrix, added to every per-class variance.
    """

    kind = "nb"

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing

    def params(self):
        return {"var_smoothing": self.var_smoothing}

    def fit(self, X, y, n_classes, rng=None):
        X = np.asarray(X, dtype=np.float64)
        d = X.shape[1]
        floor = self.var_smoothing * X.var(axis=0).max()
        if floor <= 0:
            floor = np.finfo(np.float64).tiny
        self.theta_ = np.zeros((n_classes, d))
        self.var_ = np.ones((n_classes, d))
        self.log_prior_ = np.full(n_classes, -np.inf)
        for c in range(n_classes):
            Xc = X[y == c]
            if Xc.shape[0] == 0:
                continue
            self.theta_[c] = Xc.mean(axis=0)
            self.var_[c] = Xc.var(axis=0) + floor
            self.log_prior_[c] = np.log(Xc.shape[0] / X.shape[0])
        return self

    def joint_log_likelihood(self, X):
        X = np.asarray(X, dtype=np.float64)
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_), axis=1)[None, :]
        ll = ll - 0.5 * np.sum((X[:, None, :] - self.theta_[None]) ** 2 / self.var_[None], axis=2)
        return ll + self.log_prior_[None, :]

    def predict_scores(self, X):
        jll = self.joint_log_likelihood(X)
        return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))

    def get_state(self):
        return {"theta": self.theta_.tolist(), "var": self.var_.tolist(),
                "log_prior": [float(v) if np.isfinite(v) else None for v in self.log_prior_]}

    def set_state(self, state):
        self.theta_ = np.asarray(state["theta"], dtype=np.float64)
        self.var_ = np.asarray(state["var"], dtype=np.float64)
        self.log_prior_ = np.array([-np.inf if v is None else v for v in state["log_prior"]])
        return self
