"""Layers, parameter containers, and the module tree.

Parameters are created uninitialized; ``Module.init_parameters(seed)`` fills
them from an RNG stream keyed by ``(seed, parameter path)`` so that values are
reproducible regardless of construction order.
"""

import zlib

import numpy as np

from .tensor import (
    ShapeError,
    Tensor,
    concat,
    conv1d_valid,
    dropout,
    pad_rows,
    softmax,
)


class Parameter(Tensor):
    """Trainable tensor with a declarative init spec."""

    def __init__(self, shape, init="xavier", fans=None):
        super().__init__(np.zeros(shape, dtype=np.float64), requires_grad=True)
        self.init_kind = init
        if init == "xavier" and fans is None:
            if len(shape) == 2:
                fans = (shape[0], shape[1])
            else:
                raise ValueError("xavier init needs explicit fans for ndim != 2")
        self.fans = fans

    def materialize(self, rng, dtype):
        if self.init_kind == "xavier":
            fan_in, fan_out = self.fans
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.data = rng.uniform(-limit, limit, self.shape).astype(dtype)
        elif self.init_kind == "zeros":
            self.data = np.zeros(self.shape, dtype=dtype)
        elif self.init_kind == "ones":
            self.data = np.ones(self.shape, dtype=dtype)
        else:
            raise ValueError(f"unknown init kind {self.init_kind!r}")
        self.grad = None

    def zero_grad(self):
        self.grad = None


class Module:
    """Minimal module tree; children discovered from instance attributes."""

    train_mode = True

    def named_parameters(self, prefix=""):
        for name, value in vars(self).items():
            path = f"{prefix}.{name}" if prefix else name
            if isinstance(value, Parameter):
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(path)
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}[{i}]")
                    elif isinstance(item, Parameter):
                        yield f"{path}[{i}]", item

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def init_parameters(self, seed, dtype=np.float32):
        for path, param in self.named_parameters():
            rng = np.random.default_rng([seed, zlib.crc32(path.encode())])
            param.materialize(rng, dtype)

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def set_train(self, train):
        self.train_mode = train
        for _, v in vars(self).items():
            if isinstance(v, Module):
                v.set_train(train)
            elif isinstance(v, (list, tuple)):
                for item in v:
                    if isinstance(item, Module):
                        item.set_train(train)


class Context:
    """Per-forward execution state: train/eval mode and the dropout RNG."""

    def __init__(self, train=False, rng=None):
        self.train = train
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def dropout(self, x, rate):
        return dropout(x, rate, self.rng, self.train)


class Dense(Module):
    def __init__(self, d_in, d_out, bias=True):
        self.w = Parameter((d_in, d_out))
        self.b = Parameter((d_out,), init="zeros") if bias else None

    def __call__(self, x):
        if x.shape[-1] != self.w.shape[0]:
            raise ShapeError(
                f"dense: input features {x.shape} incompatible with weight "
                f"{self.w.shape}"
            )
        y = x @ self.w
        return y + self.b if self.b is not None else y


class Conv1d(Module):
    """Cross-correlation over the length axis of an [L, c_in] input."""

    def __init__(self, c_in, c_out, kernel_size):
        self.kernel_size = kernel_size
        self.w = Parameter(
            (kernel_size, c_in, c_out), fans=(kernel_size * c_in, kernel_size * c_out)
        )
        self.b = Parameter((c_out,), init="zeros")

    def __call__(self, x, padding="valid"):
        if padding == "same":
            k = self.kernel_size
            x = pad_rows(x, (k - 1) // 2, k // 2)
        elif padding != "valid":
            raise ValueError(f"padding must be 'valid' or 'same', got {padding!r}")
        return conv1d_valid(x, self.w) + self.b


class GRUCell(Module):
    """Single gated-recurrent step; update gate blends old state and candidate."""

    def __init__(self, d_in, d_h):
        self.d_h = d_h
        self.wz = Parameter((d_in, d_h))
        self.uz = Parameter((d_h, d_h))
        self.bz = Parameter((d_h,), init="zeros")
        self.wr = Parameter((d_in, d_h))
        self.ur = Parameter((d_h, d_h))
        self.br = Parameter((d_h,), init="zeros")
        self.wh = Parameter((d_in, d_h))
        self.uh = Parameter((d_h, d_h))
        self.bh = Parameter((d_h,), init="zeros")

    def __call__(self, x, h):
        z = (x @ self.wz + h @ self.uz + self.bz).sigmoid()
        r = (x @ self.wr + h @ self.ur + self.br).sigmoid()
        cand = (x @ self.wh + (r * h) @ self.uh + self.bh).tanh()
        return (1.0 - z) * h + z * cand


class GRULayer(Module):
    """Unidirectional GRU over an [L, d_in] sequence, zero initial state."""

    def __init__(self, d_in, d_h, reverse=False):
        self.cell = GRUCell(d_in, d_h)
        self.reverse = reverse

    def __call__(self, x):
        L = x.shape[0]
        if L == 0:
            raise ValueError("gru: empty sequence")
        h = Tensor(np.zeros((1, self.cell.d_h), dtype=x.dtype))
        order = range(L - 1, -1, -1) if self.reverse else range(L)
        outputs = [None] * L
        for t in order:
            h = self.cell(x[t : t + 1], h)
            outputs[t] = h
        return concat(outputs, axis=0), h


class BiGRU(Module):
    """Bidirectional GRU layer; outputs forward/backward concatenation [L, 2*d_h]."""

    def __init__(self, d_in, d_h):
        self.fwd = GRULayer(d_in, d_h)
        self.bwd = GRULayer(d_in, d_h, reverse=True)

    def __call__(self, x):
        out_f, last_f = self.fwd(x)
        out_b, last_b = self.bwd(x)
        return concat([out_f, out_b], axis=1), concat([last_f, last_b], axis=1)


class LayerNorm(Module):
    """Normalization over the trailing feature axis with learnable affine."""

    def __init__(self, d, eps=1e-5):
        self.scale = Parameter((d,), init="ones")
        self.shift = Parameter((d,), init="zeros")
        self.eps = eps

    def __call__(self, x):
        mu = x.mean(axis=-1, keepdims=True)
        centered = x - mu
        var = (centered * centered).mean(axis=-1, keepdims=True)
        normed = centered * ((var + self.eps) ** -0.5)
        return normed * self.scale + self.shift


class BatchNorm(Module):
    """Normalization over the batch axis with running statistics for eval."""

    def __init__(self, d, eps=1e-5, momentum=0.1):
        self.scale = Parameter((d,), init="ones")
        self.shift = Parameter((d,), init="zeros")
        self.eps = eps
        self.momentum = momentum
        self.running_mean = np.zeros(d)
        self.running_var = np.ones(d)

    def __call__(self, x, ctx):
        if ctx.train:
            mu = x.mean(axis=0, keepdims=True)
            centered = x - mu
            var = (centered * centered).mean(axis=0, keepdims=True)
            m = self.momentum
            self.running_mean = (1 - m) * self.running_mean + m * mu.data[0]
            self.running_var = (1 - m) * self.running_var + m * var.data[0]
            normed = centered * ((var + self.eps) ** -0.5)
        else:
            mu = self.running_mean.astype(x.dtype)
            var = self.running_var.astype(x.dtype)
            normed = (x - mu) * ((var + self.eps) ** -0.5)
        return normed * self.scale + self.shift


class MultiHeadSelfAttention(Module):
    """Scaled dot-product self-attention with key padding mask."""

    def __init__(self, d, n_heads):
        if d % n_heads != 0:
            raise ValueError(
                f"model dim {d} not divisible by head count {n_heads}"
            )
        self.d = d
        self.n_heads = n_heads
        self.wq = Dense(d, d)
        # key bias is cancelled exactly by the softmax; omit it
        self.wk = Dense(d, d, bias=False)
        self.wv = Dense(d, d)
        self.wo = Dense(d, d)

    def __call__(self, x, mask=None, bias=None):
        """``x`` is [L, d]; ``mask`` marks attendable key positions.

        ``bias`` is an optional additive [n_heads, L, L] logit bias (used by
        the graph transformer for spatial/edge encodings).
        """
        L = x.shape[0]
        dh = self.d // self.n_heads
        q, k, v = self.wq(x), self.wk(x), self.wv(x)
        heads = []
        neg = np.asarray(-1e30, dtype=x.dtype)
        for h in range(self.n_heads):
            sl = slice(h * dh, (h + 1) * dh)
            qh, kh, vh = q[:, sl], k[:, sl], v[:, sl]
            logits = (qh @ kh.T) * (1.0 / np.sqrt(dh))
            if bias is not None:
                logits = logits + bias[h]
            if mask is not None:
                penalty = np.where(mask[None, :], 0.0, neg).astype(x.dtype)
                logits = logits + Tensor(penalty)
            attn = softmax(logits, axis=-1)
            heads.append(attn @ vh)
        return self.wo(concat(heads, axis=1))


class MLP(Module):
    """Dense stack with ReLU hidden activations, optional norm and dropout."""

    def __init__(self, d_in, hidden, d_out, norm=None, dropout_rate=0.0):
        dims = [d_in] + list(hidden)
        self.layers = [Dense(dims[i], dims[i + 1]) for i in range(len(hidden))]
        self.norms = None
        if norm == "layer":
            self.norms = [LayerNorm(d) for d in dims[1:]]
        elif norm == "batch":
            self.norms = [BatchNorm(d) for d in dims[1:]]
        self.norm_kind = norm
        self.out = Dense(dims[-1], d_out)
        self.dropout_rate = dropout_rate

    def __call__(self, x, ctx):
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if self.norms is not None:
                norm = self.norms[i]
                x = norm(x, ctx) if self.norm_kind == "batch" else norm(x)
            x = x.relu()
            if self.dropout_rate:
                x = ctx.dropout(x, self.dropout_rate)
        return self.out(x)
