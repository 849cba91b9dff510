"""Reverse-mode differentiation over float64 numpy arrays.

A ``Tensor`` records the op that produced it as a backward closure, in the
micrograd style; ``Tensor.backward()`` topologically sorts the graph and
accumulates gradients into every node's ``.grad``.  Complex values never
appear on the tape: ``CTensor`` is just a (real, imag) pair of Tensors, so
complex and hyper-complex layers differentiate through their real planes.

Non-Tensor operands are treated as constants and receive no gradient.
"""

from __future__ import annotations

import numpy as np

from . import fftkit
from .errors import ContractError


class Tensor:
    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    def backward(self):
        if self.data.size != 1:
            raise ContractError("backward() starts from a scalar loss")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward(node.grad)

    # operator sugar; the constant side of a mixed op gets no gradient
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __getitem__(self, idx):
        return getitem(self, idx)


def _accum(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    squash = tuple(i for i, (gs, s) in enumerate(zip(g.shape, shape)) if s == 1 and gs != 1)
    if squash:
        g = g.sum(axis=squash, keepdims=True)
    return g.reshape(shape)


def _raw(x):
    return x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)


def add(a: Tensor, b) -> Tensor:
    bd = _raw(b)
    parents = (a, b) if isinstance(b, Tensor) else (a,)

    def backward(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        if isinstance(b, Tensor):
            _accum(b, _unbroadcast(g, b.data.shape))

    return Tensor(a.data + bd, parents, backward)


def sub(a: Tensor, b) -> Tensor:
    bd = _raw(b)
    parents = (a, b) if isinstance(b, Tensor) else (a,)

    def backward(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        if isinstance(b, Tensor):
            _accum(b, _unbroadcast(-g, b.data.shape))

    return Tensor(a.data - bd, parents, backward)


def neg(a: Tensor) -> Tensor:
    def backward(g):
        _accum(a, -g)

    return Tensor(-a.data, (a,), backward)


def mul(a: Tensor, b) -> Tensor:
    bd = _raw(b)
    parents = (a, b) if isinstance(b, Tensor) else (a,)

    def backward(g):
        _accum(a, _unbroadcast(g * bd, a.data.shape))
        if isinstance(b, Tensor):
            _accum(b, _unbroadcast(g * a.data, b.data.shape))

    return Tensor(a.data * bd, parents, backward)


def matmul(a: Tensor, w) -> Tensor:
    """a: (..., k) times w: (k, m).  The weight may be a constant array."""
    wd = _raw(w)
    if wd.ndim != 2 or a.data.shape[-1] != wd.shape[0]:
        raise ContractError(
            f"matmul shapes incompatible: {a.data.shape} x {wd.shape}"
        )
    parents = (a, w) if isinstance(w, Tensor) else (a,)

    def backward(g):
        _accum(a, g @ wd.T)
        if isinstance(w, Tensor):
            k, m = wd.shape
            _accum(w, a.data.reshape(-1, k).T @ g.reshape(-1, m))

    return Tensor(a.data @ wd, parents, backward)


def reshape(a: Tensor, shape) -> Tensor:
    def backward(g):
        _accum(a, g.reshape(a.data.shape))

    return Tensor(a.data.reshape(shape), (a,), backward)


def transpose(a: Tensor, axes) -> Tensor:
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(g):
        _accum(a, np.transpose(g, inverse))

    return Tensor(np.transpose(a.data, axes), (a,), backward)


def getitem(a: Tensor, idx) -> Tensor:
    """Basic (slice/int) indexing only."""

    def backward(g):
        buf = np.zeros_like(a.data)
        buf[idx] = g
        _accum(a, buf)

    return Tensor(a.data[idx], (a,), backward)


def pad_axis(a: Tensor, axis: int, before: int, after: int) -> Tensor:
    widths = [(0, 0)] * a.data.ndim
    widths[axis] = (before, after)

    def backward(g):
        take = [slice(None)] * a.data.ndim
        take[axis] = slice(before, before + a.data.shape[axis])
        _accum(a, g[tuple(take)])

    return Tensor(np.pad(a.data, widths), (a,), backward)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def backward(g):
        _accum(a, g * mask)

    return Tensor(np.where(mask, a.data, 0.0), (a,), backward)


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size

    def backward(g):
        _accum(a, np.full_like(a.data, float(g) / n))

    return Tensor(a.data.mean(), (a,), backward)


def gather_bins(a: Tensor, idx: np.ndarray, axis: int) -> Tensor:
    """take_along_axis with indices that are distinct within each row."""
    idx = np.broadcast_to(idx, idx.shape)

    def backward(g):
        buf = np.zeros_like(a.data)
        np.put_along_axis(buf, idx, g, axis)
        _accum(a, buf)

    return Tensor(np.take_along_axis(a.data, idx, axis), (a,), backward)


def scatter_bins(a: Tensor, idx: np.ndarray, axis: int, size: int) -> Tensor:
    """Place values at ``idx`` along ``axis`` of a zero tensor of width ``size``."""
    if idx.min() < 0 or idx.max() >= size:
        raise ContractError(f"scatter index out of range [0, {size})")
    shape = list(a.data.shape)
    shape[axis] = size

    def backward(g):
        _accum(a, np.take_along_axis(g, idx, axis))

    out = np.zeros(shape)
    np.put_along_axis(out, idx, a.data, axis)
    return Tensor(out, (a,), backward)


def rfft_pair(x: Tensor, axis: int = -1) -> tuple[Tensor, Tensor]:
    """One-sided DFT of a real tensor; returns (real, imag) plane Tensors."""
    n = x.data.shape[axis]
    re, im = fftkit.rfft_onesided(x.data, axis=axis)

    def backward_re(g):
        _accum(x, fftkit.rfft_transpose(g, np.zeros_like(g), n, axis=axis))

    def backward_im(g):
        _accum(x, fftkit.rfft_transpose(np.zeros_like(g), g, n, axis=axis))

    return Tensor(re, (x,), backward_re), Tensor(im, (x,), backward_im)


def irfft_real(re: Tensor, im: Tensor, n: int, axis: int = -1) -> Tensor:
    """Real synthesis from one-sided planes (1/n normalised)."""
    out = fftkit.irfft_onesided(re.data, im.data, n, axis=axis)

    def backward(g):
        gre, gim = fftkit.irfft_transpose(g, n, axis=axis)
        _accum(re, gre)
        _accum(im, gim)

    return Tensor(out, (re, im), backward)


class CTensor:
    """Complex tensor as a (real, imag) pair of Tensors."""

    __slots__ = ("re", "im")

    def __init__(self, re: Tensor, im: Tensor):
        if re.data.shape != im.data.shape:
            raise ContractError(
                f"complex planes disagree: {re.data.shape} vs {im.data.shape}"
            )
        self.re = re
        self.im = im

    @property
    def shape(self):
        return self.re.data.shape

    @classmethod
    def zeros(cls, shape) -> "CTensor":
        return cls(Tensor(np.zeros(shape)), Tensor(np.zeros(shape)))

    def value(self) -> np.ndarray:
        return self.re.data + 1j * self.im.data

    def __add__(self, other: "CTensor") -> "CTensor":
        return CTensor(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CTensor") -> "CTensor":
        return CTensor(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CTensor":
        return CTensor(-self.re, -self.im)

    def conj(self) -> "CTensor":
        return CTensor(self.re, -self.im)

    def matmul(self, w: "CTensor") -> "CTensor":
        """(..., E) x (E, F) complex product via four real products."""
        re = matmul(self.re, w.re) - matmul(self.im, w.im)
        im = matmul(self.re, w.im) + matmul(self.im, w.re)
        return CTensor(re, im)

    def relu(self) -> "CTensor":
        return CTensor(relu(self.re), relu(self.im))

    def scale(self, s: float) -> "CTensor":
        return CTensor(self.re * s, self.im * s)
