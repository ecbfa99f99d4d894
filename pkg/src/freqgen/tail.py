"""Tail Interaction attention layer.

Tokens attend to a small learnable key unit; the attention map is
normalized twice (softmax over the token dimension, then per-row l1) and
mixes a learnable value unit back into the features through a residual and
ReLU. Cost is linear in the token count because the map is N x S with
fixed unit size S.

Forward and backward are written by hand in numpy so gradients can be
verified against finite differences without a framework.
"""

import struct
import time
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, InvalidStateError

DEFAULT_UNIT_SIZE = 64

_MAGIC = b"FGTI"
_VERSION = 1


def dual_normalize(m):
    """Two-step normalization of an (N, S) score matrix.

    Step 1: softmax over the token dimension (per column, stabilized by
    subtracting the column max). Step 2: per-row l1 normalization. Every
    output row is nonnegative and sums to 1.
    """
    m = np.asarray(m, dtype=np.float64)
    shifted = m - m.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    col = e / e.sum(axis=0, keepdims=True)
    return col / col.sum(axis=1, keepdims=True)


def _dual_normalize_batched(scores):
    # scores: (B, N, S); softmax over the token axis, then per-row l1.
    # Works in place on `scores` to keep the peak working set small.
    scores -= scores.max(axis=1, keepdims=True)
    np.exp(scores, out=scores)
    scores /= scores.sum(axis=1, keepdims=True)
    col = scores
    rowsum = col.sum(axis=2, keepdims=True)
    return col / rowsum, col, rowsum


@dataclass
class InteractionParams:
    """Learnable state: query projection and the two interaction units."""

    q: np.ndarray  # (z, z) query projection, no bias
    ik: np.ndarray  # (S, z) key unit
    iv: np.ndarray  # (S, z) value unit

    @property
    def channels(self):
        return self.q.shape[0]

    @property
    def unit_size(self):
        return self.ik.shape[0]


def init_params(channels, unit_size=DEFAULT_UNIT_SIZE, rng=None):
    """Initialize: identity query, Gaussian units with std 1/sqrt(z)."""
    rng = np.random.default_rng(rng)
    std = 1.0 / np.sqrt(channels)
    return InteractionParams(
        q=np.eye(channels),
        ik=rng.normal(0.0, std, size=(unit_size, channels)),
        iv=rng.normal(0.0, std, size=(unit_size, channels)),
    )


def forward(f, params):
    """Run the layer on a (B, N, z) feature map.

    Returns (output, cache); the cache holds every intermediate the
    backward pass needs.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 3:
        raise InvalidInputError(f"feature map must be (B, N, z), got {f.shape}")
    if f.shape[2] != params.channels:
        raise InvalidInputError(
            f"feature channels {f.shape[2]} != layer channels {params.channels}"
        )
    fq = f @ params.q.T  # (B, N, z)
    attn, col, rowsum = _dual_normalize_batched(fq @ params.ik.T)  # (B, N, S)
    pre = attn @ params.iv  # (B, N, z)
    pre += f
    out = np.maximum(pre, 0.0)
    cache = {
        "f": f, "fq": fq, "attn": attn, "col": col, "rowsum": rowsum,
        "pre": pre, "params": params,
    }
    return out, cache


def backward(grad_out, cache):
    """Exact gradients of forward(). Returns (grad_f, grad_q, grad_ik, grad_iv)."""
    for key in ("f", "fq", "attn", "col", "rowsum", "pre", "params"):
        if key not in cache:
            raise InvalidStateError("cache does not come from a matching forward()")
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != cache["pre"].shape:
        raise InvalidStateError(
            f"grad shape {grad_out.shape} does not match cached {cache['pre'].shape}"
        )
    f, fq, attn, col, rowsum, params = (
        cache["f"], cache["fq"], cache["attn"], cache["col"],
        cache["rowsum"], cache["params"],
    )
    z = f.shape[2]
    s = params.unit_size
    d_pre = grad_out * (cache["pre"] > 0)
    d_attn = d_pre @ params.iv.T
    grad_iv = attn.reshape(-1, s).T @ d_pre.reshape(-1, z)
    # row l1 backward: col -> attn with attn = col / rowsum
    d_col = (d_attn - (d_attn * attn).sum(axis=2, keepdims=True)) / rowsum
    # column softmax backward, independent per column
    d_scores = col * (d_col - (d_col * col).sum(axis=1, keepdims=True))
    d_fq = d_scores @ params.ik
    grad_ik = d_scores.reshape(-1, s).T @ fq.reshape(-1, z)
    grad_q = d_fq.reshape(-1, z).T @ f.reshape(-1, z)
    grad_f = d_fq @ params.q + d_pre
    return grad_f, grad_q, grad_ik, grad_iv


class TailInteraction:
    """Stateful wrapper around the functional layer.

    `pairs` > 1 stacks several (key, value) unit pairs applied
    sequentially, each with its own query projection.
    """

    def __init__(self, channels, unit_size=DEFAULT_UNIT_SIZE, pairs=1, rng=None):
        rng = np.random.default_rng(rng)
        self.stages = [init_params(channels, unit_size, rng) for _ in range(pairs)]

    @property
    def channels(self):
        return self.stages[0].channels

    @property
    def unit_size(self):
        return self.stages[0].unit_size

    def forward(self, f):
        caches = []
        for p in self.stages:
            f, cache = forward(f, p)
            caches.append(cache)
        return f, caches

    def backward(self, grad_out, caches):
        grads = []
        for cache in reversed(caches):
            grad_out, gq, gik, giv = backward(grad_out, cache)
            grads.append((gq, gik, giv))
        return grad_out, list(reversed(grads))

    def param_arrays(self):
        arrays = []
        for p in self.stages:
            arrays.extend([p.q, p.ik, p.iv])
        return arrays


def save_params(params, path):
    """Serialize one stage: header (magic, version, z, S) + float64 LE data."""
    header = struct.pack("<4sIII", _MAGIC, _VERSION, params.channels, params.unit_size)
    with open(path, "wb") as fh:
        fh.write(header)
        for arr in (params.q, params.ik, params.iv):
            fh.write(arr.astype("<f8").tobytes())


def load_params(path):
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIII"))
        magic, version, z, s = struct.unpack("<4sIII", header)
        if magic != _MAGIC or version != _VERSION:
            raise InvalidStateError(f"{path}: bad parameter file header")
        data = np.frombuffer(fh.read(), dtype="<f8")
    expected = z * z + 2 * s * z
    if data.size != expected:
        raise InvalidStateError(f"{path}: expected {expected} values, got {data.size}")
    q = data[: z * z].reshape(z, z).copy()
    ik = data[z * z : z * z + s * z].reshape(s, z).copy()
    iv = data[z * z + s * z :].reshape(s, z).copy()
    return InteractionParams(q=q, ik=ik, iv=iv)


def complexity_probe(n_values, unit_size=DEFAULT_UNIT_SIZE, channels=64,
                     batch=1, repeats=20, rng=None):
    """Median forward wall-clock time per token count; returns {N: seconds}."""
    rng = np.random.default_rng(rng)
    params = init_params(channels, unit_size, rng)
    table = {}
    for n in n_values:
        f = rng.standard_normal((batch, n, channels))
        forward(f, params)  # warm-up
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            forward(f, params)
            times.append(time.perf_counter() - t0)
        table[n] = float(np.median(times))
    return table
