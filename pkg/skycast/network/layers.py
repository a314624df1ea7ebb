"""
Skycast Network - Layers
Forward and backward passes of the fixed layer set, batched over axis 0.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def dropout_mask(shape, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted dropout: keep with probability 1 - rate, scale kept units by 1/(1 - rate)."""
    if rate <= 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def conv1d_forward(z: np.ndarray, w: np.ndarray, b: np.ndarray):
    """
    Valid 1-D convolution over time followed by ReLU.

    Args:
        z: (B, T, Fin)
        w: (k, Fin, C)
        b: (C,)

    Returns:
        out (B, T - k + 1, C), cache
    """
    k = w.shape[0]
    patches = sliding_window_view(z, k, axis=1)  # (B, T', Fin, k)
    pre = np.einsum("btfk,kfc->btc", patches, w) + b
    return np.maximum(pre, 0.0), (patches, pre)


def conv1d_backward(dout: np.ndarray, cache):
    patches, pre = cache
    dpre = dout * (pre > 0)
    dw = np.einsum("btfk,btc->kfc", patches, dpre)
    db = dpre.sum(axis=(0, 1))
    return dw, db


def lstm_forward(x: np.ndarray, W: np.ndarray, U: np.ndarray, b: np.ndarray):
    """
    LSTM over x (B, S, C) from a zero state; gate order i, f, g, o.

    Returns:
        final hidden state (B, H), cache
    """
    batch, steps, _ = x.shape
    H = U.shape[0]
    h = np.zeros((batch, H))
    c = np.zeros((batch, H))
    cache = []
    for t in range(steps):
        gates = x[:, t] @ W + h @ U + b
        i = sigmoid(gates[:, :H])
        f = sigmoid(gates[:, H:2 * H])
        g = np.tanh(gates[:, 2 * H:3 * H])
        o = sigmoid(gates[:, 3 * H:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        cache.append((x[:, t], h_prev, c_prev, i, f, g, o, tanh_c))
    return h, cache


def lstm_backward(dh: np.ndarray, cache, W: np.ndarray, U: np.ndarray):
    """Backpropagation through time from a gradient on the final hidden state."""
    H = U.shape[0]
    dW, dU = np.zeros_like(W), np.zeros_like(U)
    db = np.zeros(4 * H)
    dx = []
    dc = np.zeros_like(dh)
    for x_t, h_prev, c_prev, i, f, g, o, tanh_c in reversed(cache):
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c ** 2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dgates = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g ** 2),
            do * o * (1.0 - o),
        ], axis=1)
        dW += x_t.T @ dgates
        dU += h_prev.T @ dgates
        db += dgates.sum(axis=0)
        dx.append(dgates @ W.T)
        dh = dgates @ U.T
        dc = dc * f
    return np.stack(dx[::-1], axis=1), dW, dU, db


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, relu: bool):
    pre = x @ w + b
    return (np.maximum(pre, 0.0) if relu else pre), (x, pre, relu)


def dense_backward(dout: np.ndarray, cache, w: np.ndarray):
    x, pre, relu = cache
    dpre = dout * (pre > 0) if relu else dout
    return dpre @ w.T, x.T @ dpre, dpre.sum(axis=0)
