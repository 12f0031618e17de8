"""CNN building blocks in plain numpy, channels-last.

Convolutions are valid-padding stride-1 via im2col; max pooling is 2x2
stride 2 and keeps partial edge windows, so an odd input of size s pools to
(s+1)//2. im2col patch matrices are rebuilt in chunks during backward
instead of cached, which bounds memory at the paper-scale 150-pixel input.
"""

from __future__ import annotations

import numpy as np

from ..errors import QganmarkError

# batch rows per im2col chunk are chosen so one patch matrix stays small
_CHUNK_FLOATS = 8_000_000


def conv_out_side(side: int, kernel: int = 3) -> int:
    return side - kernel + 1


def pool_out_side(side: int, size: int = 2) -> int:
    return (side + size - 1) // size


def _patches(x: np.ndarray, kernel: int) -> np.ndarray:
    """(B, H, W, C) -> (B, OH, OW, kernel*kernel*C) sliding windows."""
    win = np.lib.stride_tricks.sliding_window_view(x, (kernel, kernel), axis=(1, 2))
    # window axes arrive after the channel axis; order as (kh, kw, c)
    win = np.moveaxis(win, 3, 5)
    b, oh, ow = win.shape[:3]
    return np.ascontiguousarray(win).reshape(b, oh, ow, kernel * kernel * x.shape[3])


def _chunks(batch: int, per_image_floats: int):
    rows = max(1, _CHUNK_FLOATS // max(1, per_image_floats))
    for lo in range(0, batch, rows):
        yield lo, min(lo + rows, batch)


def conv_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray):
    """Valid stride-1 convolution. kernels is (kh, kw, C_in, F)."""
    kh, kw, c_in, filters = kernels.shape
    if x.shape[3] != c_in:
        raise QganmarkError(f"input has {x.shape[3]} channels, kernels expect {c_in}")
    if x.shape[1] < kh or x.shape[2] < kw:
        raise QganmarkError(f"input {x.shape[1]}x{x.shape[2]} smaller than kernel")
    b = x.shape[0]
    oh, ow = x.shape[1] - kh + 1, x.shape[2] - kw + 1
    kmat = kernels.reshape(-1, filters)
    out = np.empty((b, oh, ow, filters))
    for lo, hi in _chunks(b, oh * ow * kmat.shape[0]):
        p = _patches(x[lo:hi], kh)
        out[lo:hi] = p @ kmat + bias
    return out, x


def conv_backward(dout: np.ndarray, x: np.ndarray, kernels: np.ndarray):
    kh, kw, c_in, filters = kernels.shape
    b, oh, ow = dout.shape[:3]
    kmat = kernels.reshape(-1, filters)
    d_kmat = np.zeros_like(kmat)
    d_bias = dout.reshape(-1, filters).sum(axis=0)
    dx = np.zeros_like(x)
    for lo, hi in _chunks(b, oh * ow * kmat.shape[0]):
        p = _patches(x[lo:hi], kh)
        dmat = dout[lo:hi].reshape(-1, filters)
        d_kmat += p.reshape(-1, kmat.shape[0]).T @ dmat
        dp = (dmat @ kmat.T).reshape(hi - lo, oh, ow, kh, kw, c_in)
        for i in range(kh):
            for j in range(kw):
                dx[lo:hi, i : i + oh, j : j + ow, :] += dp[:, :, :, i, j, :]
    return dx, d_kmat.reshape(kernels.shape), d_bias


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0.0), x


def relu_backward(dout: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dout * (x > 0)


def maxpool_forward(x: np.ndarray, size: int = 2):
    """2x2 stride-2 max pooling with partial edge windows (-inf padding)."""
    b, h, w, c = x.shape
    oh, ow = pool_out_side(h, size), pool_out_side(w, size)
    padded = np.full((b, oh * size, ow * size, c), -np.inf)
    padded[:, :h, :w, :] = x
    windows = padded.reshape(b, oh, size, ow, size, c)
    windows = np.moveaxis(windows, 2, 4).reshape(b, oh, ow, size * size, c)
    idx = np.argmax(windows, axis=3)
    out = np.take_along_axis(windows, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return out, (idx, x.shape)


def maxpool_backward(dout: np.ndarray, cache, size: int = 2) -> np.ndarray:
    idx, x_shape = cache
    b, h, w, c = x_shape
    oh, ow = dout.shape[1], dout.shape[2]
    dwin = np.zeros((b, oh, ow, size * size, c))
    np.put_along_axis(dwin, idx[:, :, :, None, :], dout[:, :, :, None, :], axis=3)
    dwin = np.moveaxis(dwin.reshape(b, oh, ow, size, size, c), 4, 2)
    dpad = dwin.reshape(b, oh * size, ow * size, c)
    return dpad[:, :h, :w, :]


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    return x @ w + b, x


def dense_backward(dout: np.ndarray, x: np.ndarray, w: np.ndarray):
    return dout @ w.T, x.T @ dout, dout.sum(axis=0)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(probs: np.ndarray, onehot: np.ndarray) -> float:
    """Mean categorical cross-entropy over the batch."""
    clipped = np.clip(probs, 1e-12, 1.0)
    return float(-(onehot * np.log(clipped)).sum(axis=1).mean())
