"""Minimal differentiable kernel for the character BiLSTM.

Plain numpy float64 arrays, hand-derived gradients, no autodiff.  The
LSTM follows the standard Hochreiter formulation with gates stacked in
(input, forget, cell, output) order:

    z = W x + U h_prev + b          (z is 4h wide)
    i = sigmoid(z_i)   f = sigmoid(z_f)
    g = tanh(z_c)      o = sigmoid(z_o)
    c = f * c_prev + i * g
    h = o * tanh(c)

Weight matrices initialize uniform(-r, r) with r = sqrt(6/(fan_in +
fan_out)); biases start at zero except the forget gate bias, which
starts at 1.  The optimizer is plain SGD with global-norm gradient
clipping, applied per example.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def sigmoid(z):
    """Numerically stable logistic function."""
    e = np.exp(-np.abs(z))
    return np.where(z >= 0.0, 1.0, e) / (1.0 + e)


def softmax(y):
    """Probability vector via max-shifted exponentials."""
    y = np.asarray(y, dtype=np.float64)
    e = np.exp(y - y.max())
    return e / e.sum()


def softmax_xent(logits, target):
    """Cross-entropy loss and logit gradient for one position.

    Returns ``(loss, d_logits)`` where loss = -log softmax(logits)[target]
    computed via log-sum-exp.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= target < logits.shape[0]:
        raise ValueError(f"target {target} out of range for {logits.shape[0]} logits")
    m = logits.max()
    lse = m + math.log(np.exp(logits - m).sum())
    loss = lse - logits[target]
    d_logits = softmax(logits)
    d_logits[target] -= 1.0
    return loss, d_logits


def xavier_uniform(rng, rows, cols):
    """fan_in = cols, fan_out = rows; filled row-major from `rng`."""
    r = math.sqrt(6.0 / (rows + cols))
    data = [rng.uniform(-r, r) for _ in range(rows * cols)]
    return np.array(data, dtype=np.float64).reshape(rows, cols)


@dataclass
class LSTMParams:
    """Gate weights stacked as (4h, .) arrays in i, f, c, o row order."""

    input_dim: int
    hidden_dim: int
    w: np.ndarray  # (4h, input_dim)
    u: np.ndarray  # (4h, hidden_dim)
    b: np.ndarray  # (4h,)

    @classmethod
    def init(cls, input_dim, hidden_dim, rng):
        w = np.vstack(
            [xavier_uniform(rng, hidden_dim, input_dim) for _ in range(4)]
        )
        u = np.vstack(
            [xavier_uniform(rng, hidden_dim, hidden_dim) for _ in range(4)]
        )
        b = np.zeros(4 * hidden_dim)
        b[hidden_dim : 2 * hidden_dim] = 1.0  # forget gate bias
        return cls(input_dim, hidden_dim, w, u, b)

    @classmethod
    def zeros(cls, input_dim, hidden_dim):
        return cls(
            input_dim,
            hidden_dim,
            np.zeros((4 * hidden_dim, input_dim)),
            np.zeros((4 * hidden_dim, hidden_dim)),
            np.zeros(4 * hidden_dim),
        )

    def _gate(self, array, index):
        h = self.hidden_dim
        return array[index * h : (index + 1) * h]

    # per-gate views, mostly for tests and serialization docs
    @property
    def w_i(self):
        return self._gate(self.w, 0)

    @property
    def w_f(self):
        return self._gate(self.w, 1)

    @property
    def w_c(self):
        return self._gate(self.w, 2)

    @property
    def w_o(self):
        return self._gate(self.w, 3)

    @property
    def u_i(self):
        return self._gate(self.u, 0)

    @property
    def u_f(self):
        return self._gate(self.u, 1)

    @property
    def u_c(self):
        return self._gate(self.u, 2)

    @property
    def u_o(self):
        return self._gate(self.u, 3)

    @property
    def b_i(self):
        return self._gate(self.b, 0)

    @property
    def b_f(self):
        return self._gate(self.b, 1)

    @property
    def b_c(self):
        return self._gate(self.b, 2)

    @property
    def b_o(self):
        return self._gate(self.b, 3)

    def copy(self):
        return LSTMParams(
            self.input_dim, self.hidden_dim, self.w.copy(), self.u.copy(), self.b.copy()
        )


@dataclass
class LSTMGrads:
    dw: np.ndarray
    du: np.ndarray
    db: np.ndarray


@dataclass
class StepCache:
    params: LSTMParams
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray


def _check_vector(name, vec, dim):
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (dim,):
        raise ValueError(f"{name} has shape {vec.shape}, expected ({dim},)")
    return vec


def lstm_step(params, x, h_prev, c_prev):
    """One LSTM step; returns (h, c, cache) with cache for the backward pass."""
    x = _check_vector("x", x, params.input_dim)
    h_prev = _check_vector("h_prev", h_prev, params.hidden_dim)
    c_prev = _check_vector("c_prev", c_prev, params.hidden_dim)
    hd = params.hidden_dim
    z = params.w @ x + params.u @ h_prev + params.b
    i = sigmoid(z[:hd])
    f = sigmoid(z[hd : 2 * hd])
    g = np.tanh(z[2 * hd : 3 * hd])
    o = sigmoid(z[3 * hd :])
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    return h, c, StepCache(params, x, h_prev, c_prev, i, f, g, o, c, tanh_c)


def lstm_backward(cache, d_h, d_c):
    """Backward through one step.

    Returns ``(grads, d_x, d_h_prev, d_c_prev)`` for upstream gradients
    `d_h`, `d_c` on the step's outputs.
    """
    p = cache.params
    d_h = _check_vector("d_h", d_h, p.hidden_dim)
    d_c = _check_vector("d_c", d_c, p.hidden_dim)
    d_o = d_h * cache.tanh_c
    d_c_total = d_c + d_h * cache.o * (1.0 - cache.tanh_c**2)
    d_i = d_c_total * cache.g
    d_f = d_c_total * cache.c_prev
    d_g = d_c_total * cache.i
    dz = np.concatenate(
        [
            d_i * cache.i * (1.0 - cache.i),
            d_f * cache.f * (1.0 - cache.f),
            d_g * (1.0 - cache.g**2),
            d_o * cache.o * (1.0 - cache.o),
        ]
    )
    grads = LSTMGrads(
        dw=np.outer(dz, cache.x),
        du=np.outer(dz, cache.h_prev),
        db=dz,
    )
    d_x = p.w.T @ dz
    d_h_prev = p.u.T @ dz
    d_c_prev = d_c_total * cache.f
    return grads, d_x, d_h_prev, d_c_prev


@dataclass
class SeqCache:
    xs: np.ndarray  # (T, input_dim)
    h_prevs: np.ndarray  # (T, h)
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c_prevs: np.ndarray
    tanh_c: np.ndarray


def lstm_forward_seq(params, xs):
    """Run a sequence through the LSTM from a zero initial state.

    Equivalent to composing :func:`lstm_step`; returns the (T, h) stack
    of hidden states plus a cache for :func:`lstm_backward_seq`.
    """
    xs = np.asarray(xs, dtype=np.float64)
    T = xs.shape[0]
    hd = params.hidden_dim
    zx = xs @ params.w.T + params.b  # (T, 4h)
    hs = np.empty((T, hd))
    i_s = np.empty((T, hd))
    f_s = np.empty((T, hd))
    g_s = np.empty((T, hd))
    o_s = np.empty((T, hd))
    c_prevs = np.empty((T, hd))
    h_prevs = np.empty((T, hd))
    tanh_cs = np.empty((T, hd))
    h = np.zeros(hd)
    c = np.zeros(hd)
    for t in range(T):
        h_prevs[t] = h
        c_prevs[t] = c
        z = zx[t] + params.u @ h
        i = sigmoid(z[:hd])
        f = sigmoid(z[hd : 2 * hd])
        g = np.tanh(z[2 * hd : 3 * hd])
        o = sigmoid(z[3 * hd :])
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        i_s[t], f_s[t], g_s[t], o_s[t] = i, f, g, o
        tanh_cs[t] = tanh_c
        hs[t] = h
    return hs, SeqCache(xs, h_prevs, i_s, f_s, g_s, o_s, c_prevs, tanh_cs)


def lstm_backward_seq(params, cache, d_hs):
    """Backward through time for a whole sequence.

    `d_hs` holds the upstream gradient on each hidden state.  Returns
    ``(grads, d_xs)``.
    """
    T, hd = d_hs.shape
    dz_all = np.empty((T, 4 * hd))
    d_h_rec = np.zeros(hd)
    d_c_rec = np.zeros(hd)
    for t in range(T - 1, -1, -1):
        i, f, g, o = cache.i[t], cache.f[t], cache.g[t], cache.o[t]
        tanh_c = cache.tanh_c[t]
        d_h = d_hs[t] + d_h_rec
        d_o = d_h * tanh_c
        d_c_total = d_c_rec + d_h * o * (1.0 - tanh_c**2)
        dz = dz_all[t]
        dz[:hd] = d_c_total * g * i * (1.0 - i)
        dz[hd : 2 * hd] = d_c_total * cache.c_prevs[t] * f * (1.0 - f)
        dz[2 * hd : 3 * hd] = d_c_total * i * (1.0 - g**2)
        dz[3 * hd :] = d_o * o * (1.0 - o)
        d_h_rec = params.u.T @ dz
        d_c_rec = d_c_total * f
    grads = LSTMGrads(
        dw=dz_all.T @ cache.xs,
        du=dz_all.T @ cache.h_prevs,
        db=dz_all.sum(axis=0),
    )
    d_xs = dz_all @ params.w
    return grads, d_xs


def global_grad_norm(grads):
    """L2 norm over a list of gradient arrays."""
    total = 0.0
    for g in grads:
        total += float((g * g).sum())
    return math.sqrt(total)


def sgd_update(params, grads, learning_rate, clip_norm=math.inf):
    """In-place SGD step with global-norm clipping; returns `params`.

    `params` and `grads` are parallel lists of arrays.
    """
    if len(params) != len(grads):
        raise ValueError("params and grads must align")
    scale = 1.0
    if math.isfinite(clip_norm):
        norm = global_grad_norm(grads)
        if norm > clip_norm:
            scale = clip_norm / norm
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch {p.shape} vs {g.shape}")
        p -= learning_rate * scale * g
    return params
