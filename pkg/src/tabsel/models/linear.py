import numpy as np
from scipy.special import log_softmax, softmax


def standardizer(X):
    """Column means and scales; constant columns get scale 1."""
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return mu, sd


def softmax_loss_and_grad(W, b, X, y):
    """Mean cross-entropy of ``softmax(X @ W + b)`` against integer labels.

    Returns ``(loss, dW, db)``.
    """
    n = X.shape[0]
    logits = X @ W + b
    logp = log_softmax(logits, axis=1)
    loss = -logp[np.arange(n), y].mean()
    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    return loss, X.T @ delta, delta.sum(axis=0)


class LogisticRegression:
    """Multinomial logistic regression fit by full-batch gradient descent.

    Features are standardized with training statistics; iteration stops when
    the gradient norm drops below ``tol`` or after ``max_iter`` steps.
    """

    kind = "lr"

    def __init__(self, step=0.1, max_iter=1000, tol=1e-6, standardize=True):
        self.step = step
        self.max_iter = max_iter
        self.tol = tol
        self.standardize = standardize

    def params(self):
        return {"step": self.step, "max_iter": self.max_iter, "tol": self.tol,
                "standardize": self.standardize}

    def _prep(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mu_) / self.sd_

    def fit(self, X, y, n_classes, rng=None):
        X = np.asarray(X, dtype=np.float64)
        d = X.shape[1]
        if self.standardize:
            self.mu_, self.sd_ = standardizer(X)
        else:
            self.mu_, self.sd_ = np.zeros(d), np.ones(d)
        Xs = self._prep(X)
        W = np.zeros((d, n_classes))
        b = np.zeros(n_classes)
        self.loss_history_ = []
        self.n_iter_ = 0
        for it in range(self.max_iter):
            loss, dW, db = softmax_loss_and_grad(W, b, Xs, y)
            self.loss_history_.append(loss)
            if np.sqrt(np.sum(dW ** 2) + np.sum(db ** 2)) < self.tol:
                break
            W -= self.step * dW
            b -= self.step * db
            self.n_iter_ = it + 1
        self.W_, self.b_ = W, b
        return self

    def predict_scores(self, X):
        return softmax(self._prep(X) @ self.W_ + self.b_, axis=1)

    def get_state(self):
        return {"W": self.W_.tolist(), "b": self.b_.tolist(),
                "mu": self.mu_.tolist(), "sd": self.sd_.tolist()}

    def set_state(self, state):
        self.b_ = np.asarray(state["b"], dtype=np.float64)
        self.W_ = np.asarray(state["W"], dtype=np.float64).reshape(-1, self.b_.shape[0])
        self.mu_ = np.asarray(state["mu"], dtype=np.float64)
        self.sd_ = np.asarray(state["sd"], dtype=np.float64)
        return self
