import numpy as np
from scipy.special import log_softmax, softmax


def glorot_uniform(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def forward(params, X):
    W1, b1, W2, b2 = params
    pre = X @ W1 + b1
    hidden = np.maximum(pre, 0.0)
    return pre, hidden, hidden @ W2 + b2


def loss_and_grad(params, X, y):
    """Sparse categorical cross-entropy and its gradient w.r.t. ``params``.

    ``params`` is ``[W1, b1, W2, b2]``; the gradient list has the same layout.
    """
    W1, b1, W2, b2 = params
    n = X.shape[0]
    pre, hidden, logits = forward(params, X)
    logp = log_softmax(logits, axis=1)
    loss = -logp[np.arange(n), y].mean()
    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    dW2 = hidden.T @ delta
    db2 = delta.sum(axis=0)
    dh = (delta @ W2.T) * (pre > 0)
    dW1 = X.T @ dh
    db1 = dh.sum(axis=0)
    return loss, [dW1, db1, dW2, db2]


class Adam:
    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params, grads):
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class FeedforwardNet:
    """One hidden ReLU layer (width = input width by default), softmax output.

    Trained with Adam on shuffled mini-batches.
    """

    kind = "mlp"

    def __init__(self, hidden=None, epochs=10, batch_size=100, lr=1e-3,
                 beta1=0.9, beta2=0.999, eps=1e-8):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def params(self):
        return {"hidden": self.hidden, "epochs": self.epochs, "batch_size": self.batch_size,
                "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps}

    def fit(self, X, y, n_classes, rng):
        X = np.asarray(X, dtype=np.float64)
        n, d = X.shape
        p = self.hidden or d
        self.params_ = [glorot_uniform(rng, d, p), np.zeros(p),
                        glorot_uniform(rng, p, n_classes), np.zeros(n_classes)]
        opt = Adam(self.lr, self.beta1, self.beta2, self.eps)
        self.loss_history_ = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            total = 0.0
            for lo in range(0, n, self.batch_size):
                batch = order[lo:lo + self.batch_size]
                loss, grads = loss_and_grad(self.params_, X[batch], y[batch])
                opt.step(self.params_, grads)
                total += loss * batch.size
            self.loss_history_.append(total / n)
        return self

    def predict_scores(self, X):
        _, _, logits = forward(self.params_, np.asarray(X, dtype=np.float64))
        return softmax(logits, axis=1)

    def get_state(self):
        return {"W1": self.params_[0].tolist(), "b1": self.params_[1].tolist(),
                "W2": self.params_[2].tolist(), "b2": self.params_[3].tolist()}

    def set_state(self, state):
        b1 = np.asarray(state["b1"], dtype=np.float64)
        b2 = np.asarray(state["b2"], dtype=np.float64)
        W1 = np.asarray(state["W1"], dtype=np.float64).reshape(-1, b1.shape[0])
        W2 = np.asarray(state["W2"], dtype=np.float64).reshape(b1.shape[0], b2.shape[0])
        self.params_ = [W1, b1, W2, b2]
        return self
