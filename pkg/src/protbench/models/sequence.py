"""Sequence encoders: CNN, CNN-GRU, and transformer."""

import logging

import numpy as np

from ..autodiff import (
    BiGRU,
    Conv1d,
    Dense,
    LayerNorm,
    Module,
    MultiHeadSelfAttention,
    Tensor,
    embedding,
)
from ..encoding import PAD_INDEX, VOCAB_SIZE, positional_encoding

log = logging.getLogger(__name__)

CNN_CHANNELS = (32, 64, 96)
CNN_KERNELS = (4, 8, 12)


def _strip_trailing_pad(ids):
    """Trailing padding carries no signal, so embeddings ignore it."""
    ids = np.asarray(ids)
    end = ids.size
    while end and ids[end - 1] == PAD_INDEX:
        end -= 1
    if end == 0:
        raise ValueError("sequence contains only padding")
    return ids[:end]


def _one_hot(ids, dtype):
    x = np.zeros((len(ids), VOCAB_SIZE), dtype=dtype)
    x[np.arange(len(ids)), ids] = 1.0
    return x


class CNNEncoder(Module):
    """Three conv stages (32/64/96 channels, kernels 4/8/12) with ReLU,
    global max over positions, and a dense projection to 256."""

    output_dim = 256
    per_position_dim = 256

    def __init__(self, config, dtype=np.float32):
        self.dropout_rate = config.dropout
        self.dtype = dtype
        chans = (VOCAB_SIZE,) + CNN_CHANNELS
        self.convs = [
            Conv1d(chans[i], chans[i + 1], CNN_KERNELS[i]) for i in range(3)
        ]
        self.proj = Dense(CNN_CHANNELS[-1], config.hidden_dim)
        self._warned_short = False

    def _stack(self, x, same_padding, ctx):
        for conv, k in zip(self.convs, CNN_KERNELS):
            if not same_padding and x.shape[0] < k:
                # too short for a valid window; fall back to same padding
                if not self._warned_short:
                    self._warned_short = True
                    log.warning(
                        "cnn: length %d < kernel %d, switching to same "
                        "padding (reported once)",
                        x.shape[0], k,
                    )
                padding = "same"
            else:
                padding = "same" if same_padding else "valid"
            x = conv(x, padding=padding).relu()
            x = ctx.dropout(x, self.dropout_rate)
        return x

    def encode(self, ids, ctx):
        x = Tensor(_one_hot(_strip_trailing_pad(ids), self.dtype))
        h = self._stack(x, same_padding=False, ctx=ctx)
        pooled = h.max(axis=0)
        return self.proj(pooled.reshape(1, -1)).relu().reshape(-1)

    def encode_positions(self, ids, ctx):
        x = Tensor(_one_hot(_strip_trailing_pad(ids), self.dtype))
        h = self._stack(x, same_padding=True, ctx=ctx)
        return self.proj(h).relu()


class CNNGRUEncoder(Module):
    """Three same-padding conv stages followed by a two-layer bidirectional
    GRU with hidden size 64; pooled output concatenates the top layer's final
    forward/backward states."""

    output_dim = 128
    per_position_dim = 128

    def __init__(self, config, dtype=np.float32):
        self.dropout_rate = config.dropout
        self.dtype = dtype
        d_h = config.hidden_dim
        chans = (VOCAB_SIZE,) + CNN_CHANNELS
        self.convs = [
            Conv1d(chans[i], chans[i + 1], CNN_KERNELS[i]) for i in range(3)
        ]
        self.gru1 = BiGRU(CNN_CHANNELS[-1], d_h)
        self.gru2 = BiGRU(2 * d_h, d_h)

    def _forward(self, ids, ctx):
        x = Tensor(_one_hot(_strip_trailing_pad(ids), self.dtype))
        for conv in self.convs:
            x = conv(x, padding="same").relu()
            x = ctx.dropout(x, self.dropout_rate)
        seq1, _ = self.gru1(x)
        seq1 = seq1.relu()
        seq2, last2 = self.gru2(seq1)
        return seq2.relu(), last2

    def encode(self, ids, ctx):
        seq, _ = self._forward(ids, ctx)
        L = seq.shape[0]
        d_h = self.gru2.fwd.cell.d_h
        # final states of the top layer: forward at t=L-1, backward at t=0
        last_f = seq[L - 1 : L, :d_h]
        last_b = seq[0:1, d_h:]
        from ..autodiff import concat

        return concat([last_f, last_b], axis=1).reshape(-1)

    def encode_positions(self, ids, ctx):
        seq, _ = self._forward(ids, ctx)
        return seq


class TransformerEncoder(Module):
    """Two post-norm transformer blocks over learned token embeddings plus
    sinusoidal positions; pooled output is the mean over positions."""

    output_dim = 64
    per_position_dim = 64

    def __init__(self, config, dtype=np.float32):
        d = config.hidden_dim
        self.d = d
        self.dtype = dtype
        self.dropout_rate = config.dropout
        from ..autodiff import Parameter

        self.token_emb = Parameter((VOCAB_SIZE, d), fans=(VOCAB_SIZE, d))
        self.blocks = [
            _TransformerBlock(d, config.n_heads, config.dropout)
            for _ in range(config.n_layers)
        ]

    def _forward(self, ids, ctx):
        ids = _strip_trailing_pad(ids)
        x = embedding(self.token_emb, ids)
        x = x + Tensor(positional_encoding(len(ids), self.d, self.dtype))
        for block in self.blocks:
            x = block(x, ctx)
        return x

    def encode(self, ids, ctx):
        return self._forward(ids, ctx).mean(axis=0)

    def encode_positions(self, ids, ctx):
        return self._forward(ids, ctx)


class _TransformerBlock(Module):
    def __init__(self, d, n_heads, dropout_rate):
        self.attn = MultiHeadSelfAttention(d, n_heads)
        self.ln1 = LayerNorm(d)
        self.ff1 = Dense(d, 4 * d)
        self.ff2 = Dense(4 * d, d)
        self.ln2 = LayerNorm(d)
        self.dropout_rate = dropout_rate

    def __call__(self, x, ctx):
        a = ctx.dropout(self.attn(x), self.dropout_rate)
        x = self.ln1(x + a)
        f = ctx.dropout(self.ff2(self.ff1(x).relu()), self.dropout_rate)
        return self.ln2(x + f)
