"""Finite-difference verification of the hand-derived backward passes."""

import numpy as np

from . import tail
from .model import PatchNetClassifier

EPSILON = 1e-4
TOLERANCE = 1e-5
# Relative-error floor: entries far below this scale are compared absolutely.
_DENOM_FLOOR = 1e-2


def rel_error(analytic, numeric):
    """Guarded elementwise relative error, maximized over entries."""
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), _DENOM_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


def numeric_grad(loss_fn, array, epsilon=EPSILON):
    """Central finite differences of a scalar loss w.r.t. one array, in place."""
    grad = np.zeros_like(array)
    flat = array.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + epsilon
        hi = loss_fn()
        flat[i] = orig - epsilon
        lo = loss_fn()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * epsilon)
    return grad


def check_layer(seed, batch=2, tokens=5, unit_size=4, channels=3):
    """Check the tail-interaction layer alone under the loss 0.5*||forward||^2.

    Returns {name: max guarded relative error} for the input and each
    parameter.
    """
    rng = np.random.default_rng(seed)
    params = tail.init_params(channels, unit_size, rng)
    params.q += 0.1 * rng.standard_normal(params.q.shape)
    f = rng.standard_normal((batch, tokens, channels))

    def loss_fn():
        out, _ = tail.forward(f, params)
        return 0.5 * float(np.sum(out * out))

    out, cache = tail.forward(f, params)
    grad_f, grad_q, grad_ik, grad_iv = tail.backward(out, cache)
    analytic = {"input": grad_f, "query": grad_q, "key_unit": grad_ik,
                "value_unit": grad_iv}
    arrays = {"input": f, "query": params.q, "key_unit": params.ik,
              "value_unit": params.iv}
    return {
        name: rel_error(analytic[name], numeric_grad(loss_fn, arrays[name]))
        for name in arrays
    }


def check_model(seed, batch=4):
    """Check the full classifier stack on a small random batch.

    Returns {param_name: max guarded relative error} over every learnable
    array, including the embedded tail-interaction stage.
    """
    rng = np.random.default_rng(seed)
    clf = PatchNetClassifier(use_tail_interaction=True, unit_size=4, hidden=12,
                             patch_size=4, random_state=seed)
    X = rng.uniform(0.0, 1.0, size=(batch, 8, 8, 3))
    y = rng.integers(0, clf.n_classes, size=batch)
    clf.init_net(4 * 4 * 3 + 2, rng)
    params = clf.param_list()
    _, grads = clf.loss_and_grads(X, y)

    def loss_fn():
        return clf.loss_and_grads(X, y)[0]

    names = ["patch_weight", "patch_bias", "ti_query", "ti_key_unit",
             "ti_value_unit", "head_weight", "head_bias"]
    return {
        name: rel_error(g, numeric_grad(loss_fn, p))
        for name, p, g in zip(names, params, grads)
    }
