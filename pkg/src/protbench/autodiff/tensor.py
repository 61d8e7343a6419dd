"""Reverse-mode automatic differentiation on dense numpy arrays.

A :class:`Tensor` records the operations that produced it; calling
``backward()`` on a scalar result walks the tape in reverse topological order
and accumulates gradients additively into every reachable tensor that has
``requires_grad`` set.
"""

import numpy as np

from .. import kernels


class ShapeError(ValueError):
    pass


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` to undo numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """Dense array node on the reverse-mode tape."""

    def __init__(self, data, requires_grad=False, parents=(), backward=None):
        self.data = np.asarray(data)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float64)
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self.grad = None
        self._parents = parents if self.requires_grad else ()
        self._backward = backward if self.requires_grad else None

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self):
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, grad={self.requires_grad})"

    # -- backward pass -------------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ValueError(
                f"backward() requires a scalar output, got shape {self.shape}"
            )
        topo = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def _accumulate(self, grad):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad.astype(self.data.dtype, copy=False)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _lift(other, dtype):
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=dtype))

    def __add__(self, other):
        other = Tensor._lift(other, self.dtype)
        out = Tensor(self.data + other.data, parents=(self, other))

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g, self.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g, other.shape))

        out._backward = backward
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Tensor(-self.data, parents=(self,))
        out._backward = lambda g: self._accumulate(-g)
        return out

    def __sub__(self, other):
        return self + (-Tensor._lift(other, self.dtype))

    def __rsub__(self, other):
        return Tensor._lift(other, self.dtype) + (-self)

    def __mul__(self, other):
        other = Tensor._lift(other, self.dtype)
        out = Tensor(self.data * other.data, parents=(self, other))

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g * other.data, self.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g * self.data, other.shape))

        out._backward = backward
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Tensor._lift(other, self.dtype)
        out = Tensor(self.data / other.data, parents=(self, other))

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g / other.data, self.shape))
            if other.requires_grad:
                other._accumulate(
                    _unbroadcast(-g * self.data / other.data**2, other.shape)
                )

        out._backward = backward
        return out

    def __pow__(self, exponent):
        assert np.isscalar(exponent)
        out = Tensor(self.data**exponent, parents=(self,))
        out._backward = lambda g: self._accumulate(
            g * exponent * self.data ** (exponent - 1)
        )
        return out

    def __matmul__(self, other):
        other = Tensor._lift(other, self.dtype)
        if self.data.shape[-1] != other.data.shape[0]:
            raise ShapeError(
                f"matmul mismatch: {self.shape} @ {other.shape}"
            )
        out = Tensor(self.data @ other.data, parents=(self, other))

        def backward(g):
            a, b = self.data, other.data
            if self.requires_grad:
                if a.ndim == 1:
                    self._accumulate(b @ g if b.ndim > 1 else g * b)
                else:
                    self._accumulate(g @ b.T if b.ndim > 1 else np.outer(g, b))
            if other.requires_grad:
                if b.ndim == 1:
                    other._accumulate(a.T @ g if a.ndim > 1 else g * a)
                else:
                    ga = a.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1]) \
                        if a.ndim > 1 else np.outer(a, g)
                    other._accumulate(ga)

        out._backward = backward
        return out

    # -- elementwise nonlinearities -------------------------------------------

    def exp(self):
        out = Tensor(np.exp(self.data), parents=(self,))
        out._backward = lambda g: self._accumulate(g * out.data)
        return out

    def log(self):
        out = Tensor(np.log(self.data), parents=(self,))
        out._backward = lambda g: self._accumulate(g / self.data)
        return out

    def tanh(self):
        out = Tensor(np.tanh(self.data), parents=(self,))
        out._backward = lambda g: self._accumulate(g * (1.0 - out.data**2))
        return out

    def sigmoid(self):
        with np.errstate(over="ignore"):
            y = np.where(
                self.data >= 0,
                1.0 / (1.0 + np.exp(-np.abs(self.data))),
                np.exp(-np.abs(self.data)) / (1.0 + np.exp(-np.abs(self.data))),
            )
        out = Tensor(y.astype(self.dtype), parents=(self,))
        out._backward = lambda g: self._accumulate(g * out.data * (1.0 - out.data))
        return out

    def relu(self):
        out = Tensor(np.maximum(self.data, 0), parents=(self,))
        out._backward = lambda g: self._accumulate(g * (self.data > 0))
        return out

    def leaky_relu(self, slope=0.01):
        out = Tensor(np.where(self.data > 0, self.data, slope * self.data),
                     parents=(self,))
        out._backward = lambda g: self._accumulate(
            g * np.where(self.data > 0, 1.0, slope).astype(self.dtype)
        )
        return out

    def sqrt(self):
        return self**0.5

    def abs(self):
        # subgradient 0 at the origin
        out = Tensor(np.abs(self.data), parents=(self,))
        out._backward = lambda g: self._accumulate(g * np.sign(self.data))
        return out

    # -- reductions ------------------------------------------------------------

    def sum(self, axis=None, keepdims=False):
        out = Tensor(self.data.sum(axis=axis, keepdims=keepdims), parents=(self,))

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.shape).astype(self.dtype))

        out._backward = backward
        return out

    def mean(self, axis=None, keepdims=False):
        n = self.size if axis is None else self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def max(self, axis=None, keepdims=False):
        out = Tensor(self.data.max(axis=axis, keepdims=keepdims), parents=(self,))

        def backward(g):
            # route gradient to the first maximum along the reduced axis
            if axis is None:
                mask = np.zeros_like(self.data)
                mask.flat[np.argmax(self.data)] = 1.0
                self._accumulate(mask * g)
            else:
                idx = np.argmax(self.data, axis=axis)
                mask = np.zeros_like(self.data)
                np.put_along_axis(mask, np.expand_dims(idx, axis), 1.0, axis=axis)
                ge = g if keepdims else np.expand_dims(g, axis)
                self._accumulate(mask * ge)

        out._backward = backward
        return out

    # -- shape manipulation ------------------------------------------------------

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = Tensor(self.data.reshape(shape), parents=(self,))
        out._backward = lambda g: self._accumulate(g.reshape(self.shape))
        return out

    def transpose(self, *axes):
        axes = axes or None
        out = Tensor(self.data.transpose(axes), parents=(self,))
        inv = np.argsort(axes) if axes else None
        out._backward = lambda g: self._accumulate(g.transpose(inv))
        return out

    @property
    def T(self):
        return self.transpose()

    def __getitem__(self, key):
        out = Tensor(self.data[key], parents=(self,))

        def backward(g):
            full = np.zeros_like(self.data)
            np.add.at(full, key, g)
            self._accumulate(full)

        out._backward = backward
        return out


# -- free functions -----------------------------------------------------------


def tensor(data, dtype=np.float64, requires_grad=False):
    return Tensor(np.asarray(data, dtype=dtype), requires_grad=requires_grad)


def concat(tensors, axis=0):
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis),
                 parents=tuple(tensors))

    def backward(g):
        sizes = [t.shape[axis] for t in tensors]
        splits = np.cumsum(sizes)[:-1]
        for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
            if t.requires_grad:
                t._accumulate(piece)

    out._backward = backward
    return out


def stack(tensors, axis=0):
    out = Tensor(np.stack([t.data for t in tensors], axis=axis),
                 parents=tuple(tensors))

    def backward(g):
        for i, t in enumerate(tensors):
            if t.requires_grad:
                t._accumulate(np.take(g, i, axis=axis))

    out._backward = backward
    return out


def softmax(x, axis=-1):
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(y.astype(x.dtype), parents=(x,))

    def backward(g):
        dot = (g * y).sum(axis=axis, keepdims=True)
        x._accumulate((y * (g - dot)).astype(x.dtype))

    out._backward = backward
    return out


def embedding(weight, ids):
    """Row lookup ``weight[ids]`` with scatter-add backward."""
    ids = np.asarray(ids)
    out = Tensor(weight.data[ids], parents=(weight,))

    def backward(g):
        full = np.zeros_like(weight.data)
        np.add.at(full, ids, g)
        weight._accumulate(full)

    out._backward = backward
    return out


def conv1d_valid(x, w):
    """Valid cross-correlation over the length axis via the kernel module."""
    if x.shape[0] < w.shape[0]:
        raise ShapeError(
            f"conv1d valid padding: input length {x.shape[0]} shorter than "
            f"kernel size {w.shape[0]} (empty output)"
        )
    out = Tensor(kernels.conv1d_forward(x.data, w.data), parents=(x, w))

    def backward(g):
        gx, gw = kernels.conv1d_backward(x.data, w.data, g)
        if x.requires_grad:
            x._accumulate(gx)
        if w.requires_grad:
            w._accumulate(gw)

    out._backward = backward
    return out


def pad_rows(x, before, after):
    """Zero-pad along axis 0."""
    widths = [(before, after)] + [(0, 0)] * (x.ndim - 1)
    out = Tensor(np.pad(x.data, widths), parents=(x,))
    out._backward = lambda g: x._accumulate(
        g[before : before + x.shape[0]]
    )
    return out


def dropout(x, rate, rng, train):
    """Inverted dropout: identity in eval mode, rescaled mask in train mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    out = Tensor(x.data * keep, parents=(x,))
    out._backward = lambda g: x._accumulate(g * keep)
    return out
