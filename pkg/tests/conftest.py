import numpy as np
import pytest

from freqcast.autograd import Tensor
from freqcast.hypercomplex import HCNumber


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_hc(rng, base, scale=1.0):
    p = base // 2
    parts = rng.uniform(-scale, scale, size=(p, 2))
    return HCNumber(base, tuple(complex(a, b) for a, b in parts))


def naive_dft(x, axis=-1):
    """Independent O(n^2) DFT oracle: the textbook sum, nothing shared with
    the production kernels."""
    x = np.asarray(x, dtype=complex)
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    out = np.zeros_like(x)
    for k in range(n):
        for t in range(n):
            out[..., k] += x[..., t] * np.exp(-2j * np.pi * k * t / n)
    return np.moveaxis(out, -1, axis)


def numeric_gradient(loss_fn, tensor: Tensor, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar-valued closure."""
    flat = tensor.data.reshape(-1)
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        up = loss_fn()
        flat[i] = old - h
        down = loss_fn()
        flat[i] = old
        grad[i] = (up - down) / (2 * h)
    return grad.reshape(tensor.data.shape)


def max_rel_err(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-6) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float((np.abs(analytic - numeric) / denom).max())
