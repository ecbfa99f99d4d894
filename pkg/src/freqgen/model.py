"""Small patch-token classifier trained without a framework.

Pipeline: non-overlapping patches -> linear projection -> ReLU ->
optional Tail Interaction -> mean over tokens -> linear classifier ->
softmax cross-entropy. Every layer carries a hand-derived backward so the
whole stack can be checked against finite differences.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import tail
from .exceptions import InvalidInputError


def image_to_tokens(X, patch_size):
    """Cut (B, H, W, C) images into flattened non-overlapping patches.

    Each token carries its grid position as two trailing features (row and
    column in [0, 1]); without them the mean-pooled model cannot represent
    any global spatial structure.
    """
    b, h, w, c = X.shape
    if h % patch_size or w % patch_size:
        raise InvalidInputError(
            f"image size {h}x{w} not divisible by patch size {patch_size}"
        )
    gh, gw = h // patch_size, w // patch_size
    t = X.reshape(b, gh, patch_size, gw, patch_size, c)
    t = t.transpose(0, 1, 3, 2, 4, 5)
    t = t.reshape(b, gh * gw, patch_size * patch_size * c)
    rows = np.repeat(np.linspace(0.0, 1.0, gh), gw)
    cols = np.tile(np.linspace(0.0, 1.0, gw), gh)
    pos = np.broadcast_to(np.stack([rows, cols], axis=1), (b, gh * gw, 2))
    # center features at 0; mid-gray inputs and the grid midpoint map to 0
    return np.concatenate([t, pos], axis=2) - 0.5


def softmax(logits):
    e = np.exp(logits - logits.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


class PatchNetClassifier(BaseEstimator, ClassifierMixin):
    """From-scratch classifier with an optional Tail Interaction stage.

    `augmenter` is an optional callable (images, rng) -> images; when set,
    each training batch is the concatenation of originals and augmented
    copies (labels duplicated), doubling the effective batch.
    """

    def __init__(self, n_classes=3, patch_size=4, hidden=48,
                 use_tail_interaction=True, unit_size=16, ti_pairs=1,
                 epochs=10, batch_size=32, learning_rate=0.05, momentum=0.9,
                 weight_decay=5e-4, augmenter=None, random_state=0):
        self.n_classes = n_classes
        self.patch_size = patch_size
        self.hidden = hidden
        self.use_tail_interaction = use_tail_interaction
        self.unit_size = unit_size
        self.ti_pairs = ti_pairs
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.augmenter = augmenter
        self.random_state = random_state

    # -- network ----------------------------------------------------------

    def init_net(self, token_dim, rng):
        self.w1_ = rng.normal(0.0, 1.0 / np.sqrt(token_dim),
                              size=(token_dim, self.hidden))
        self.b1_ = np.zeros(self.hidden)
        self.ti_ = None
        if self.use_tail_interaction:
            self.ti_ = tail.TailInteraction(self.hidden, self.unit_size,
                                            pairs=self.ti_pairs, rng=rng)
        self.w2_ = rng.normal(0.0, 1.0 / np.sqrt(self.hidden),
                              size=(self.hidden, self.n_classes))
        self.b2_ = np.zeros(self.n_classes)

    def param_list(self):
        params = [self.w1_, self.b1_]
        if self.ti_ is not None:
            params.extend(self.ti_.param_arrays())
        params.extend([self.w2_, self.b2_])
        return params

    def _forward(self, X):
        t = image_to_tokens(X, self.patch_size)
        h = t @ self.w1_ + self.b1_
        hr = np.maximum(h, 0.0)
        ti_caches = None
        g = hr
        if self.ti_ is not None:
            g, ti_caches = self.ti_.forward(hr)
        pooled = g.mean(axis=1)
        logits = pooled @ self.w2_ + self.b2_
        return logits, (t, h, hr, ti_caches, pooled)

    def loss_and_grads(self, X, y):
        """Mean softmax cross-entropy and gradients in param_list() order."""
        logits, (t, h, hr, ti_caches, pooled) = self._forward(X)
        b, n = X.shape[0], t.shape[1]
        probs = softmax(logits)
        loss = -np.mean(np.log(probs[np.arange(b), y] + 1e-300))
        d_logits = probs.copy()
        d_logits[np.arange(b), y] -= 1.0
        d_logits /= b
        gw2 = pooled.T @ d_logits
        gb2 = d_logits.sum(axis=0)
        d_pooled = d_logits @ self.w2_.T
        d_g = np.repeat(d_pooled[:, None, :], n, axis=1) / n
        ti_grads = []
        if self.ti_ is not None:
            d_g, stage_grads = self.ti_.backward(d_g, ti_caches)
            for gq, gik, giv in stage_grads:
                ti_grads.extend([gq, gik, giv])
        d_h = d_g * (h > 0)
        gw1 = t.reshape(-1, t.shape[2]).T @ d_h.reshape(-1, d_h.shape[2])
        gb1 = d_h.sum(axis=(0, 1))
        return loss, [gw1, gb1, *ti_grads, gw2, gb2]

    # -- sklearn surface ---------------------------------------------------

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        rng = np.random.default_rng(self.random_state)
        token_dim = image_to_tokens(X[:1], self.patch_size).shape[2]
        self.init_net(token_dim, rng)
        params = self.param_list()
        velocity = [np.zeros_like(p) for p in params]
        mu, lr, wd = self.momentum, self.learning_rate, self.weight_decay
        self.loss_curve_ = []
        self.diverged_ = False
        n = X.shape[0]
        for _ in range(self.epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            n_batches = 0
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                xb, yb = X[idx], y[idx]
                if self.augmenter is not None:
                    xa = self.augmenter(xb, rng)
                    xb = np.concatenate([xb, xa])
                    yb = np.concatenate([yb, yb])
                loss, grads = self.loss_and_grads(xb, yb)
                if not np.isfinite(loss):
                    self.diverged_ = True
                    return self
                epoch_loss += loss
                n_batches += 1
                # Nesterov momentum with coupled weight decay
                for p, v, g in zip(params, velocity, grads):
                    g = g + wd * p
                    v *= mu
                    v += g
                    p -= lr * (g + mu * v)
            self.loss_curve_.append(epoch_loss / max(n_batches, 1))
        return self

    def predict_proba(self, X):
        logits, _ = self._forward(np.asarray(X, dtype=np.float64))
        return softmax(logits)

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))
