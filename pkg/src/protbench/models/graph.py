"""Graph encoders: GCN, GAT, NeuralFP, AttentiveFP, MPNN, PAGTN, Graphormer."""

import numpy as np

from ..autodiff import (
    Dense,
    GRUCell,
    LayerNorm,
    Module,
    MultiHeadSelfAttention,
    Parameter,
    Tensor,
    concat,
    embedding,
    softmax,
)
from ..molgraph import (
    BOND_ORDERS,
    DEGREE_CAP,
    EDGE_FEATURE_DIM,
    FAR_BUCKET,
    NODE_FEATURE_DIM,
    PATH_FEATURE_DIM,
)

GRAPHORMER_MAX_ATOMS = 512


class GraphSizeError(ValueError):
    pass


def _norm_adjacency(bundle, dtype):
    """Symmetric-normalized adjacency with self-loops."""
    a = bundle.graph.adjacency().astype(np.float64) + np.eye(bundle.graph.n_atoms)
    d = a.sum(axis=1)
    inv = 1.0 / np.sqrt(d)
    return (a * inv[:, None] * inv[None, :]).astype(dtype)


def _masked_softmax(logits, mask, dtype):
    penalty = np.where(mask, 0.0, -1e30).astype(dtype)
    return softmax(logits + Tensor(penalty), axis=-1)


class WeightedSumMaxReadout(Module):
    """Gated sum and elementwise max over node states, concatenated."""

    def __init__(self, d):
        self.gate = Dense(d, 1)

    def __call__(self, h):
        g = self.gate(h).sigmoid()
        ws = (h * g).sum(axis=0)
        mx = h.max(axis=0)
        return concat([ws, mx], axis=0)


class SumMaxReadout(Module):
    def __init__(self, d):
        pass

    def __call__(self, h):
        return concat([h.sum(axis=0), h.max(axis=0)], axis=0)


class NodeNorm(Module):
    """Batch normalization over the node axis of a single graph.

    Graphs are encoded one at a time, so the node population plays the role
    of the batch; its statistics are well-defined at inference time too,
    which removes the need for running averages.
    """

    def __init__(self, d, eps=1e-5):
        self.scale = Parameter((d,), init="ones")
        self.shift = Parameter((d,), init="zeros")
        self.eps = eps

    def __call__(self, x):
        mu = x.mean(axis=0, keepdims=True)
        centered = x - mu
        var = (centered * centered).mean(axis=0, keepdims=True)
        return (centered * ((var + self.eps) ** -0.5)) * self.scale + self.shift


class GCNEncoder(Module):
    """Three symmetric-normalized aggregation layers with self-loops."""

    output_dim = 128

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        d = config.hidden_dim
        dims = [NODE_FEATURE_DIM] + [d] * config.n_layers
        # Batch norm acts at the node level, where statistics pool over all
        # atoms of a graph rather than over the handful of samples in a
        # minibatch; it precedes the activation.  The norm's shift makes a
        # conv bias redundant (mean subtraction would cancel it exactly).
        normed = config.norm == "batch"
        self.layers = [
            Dense(dims[i], dims[i + 1], bias=not normed)
            for i in range(config.n_layers)
        ]
        self.norms = [NodeNorm(d) for d in dims[1:]] if normed else None
        self.readout = WeightedSumMaxReadout(d)

    def encode_graph(self, bundle, ctx):
        a_hat = Tensor(_norm_adjacency(bundle, self.dtype))
        h = Tensor(bundle.graph.node_features.astype(self.dtype))
        for i, layer in enumerate(self.layers):
            h = layer(a_hat @ h)
            if self.norms is not None:
                h = self.norms[i](h)
            h = h.relu()
            h = ctx.dropout(h, self.dropout_rate)
        return self.readout(h)


class NeuralFPEncoder(GCNEncoder):
    """GCN-style convolutions with a Sum + Max fingerprint readout."""

    def __init__(self, config, dtype=np.float32):
        super().__init__(config, dtype)
        self.readout = SumMaxReadout(config.hidden_dim)


class GATLayer(Module):
    def __init__(self, d_in, d_out, n_heads, combine):
        self.n_heads = n_heads
        self.combine = combine  # "project" or "average"
        self.w = [Dense(d_in, d_out, bias=False) for _ in range(n_heads)]
        self.a_src = [Dense(d_out, 1, bias=False) for _ in range(n_heads)]
        self.a_dst = [Dense(d_out, 1, bias=False) for _ in range(n_heads)]
        if combine == "project":
            self.proj = Dense(n_heads * d_out, d_out)

    def __call__(self, h, attend_mask, dtype):
        outs = []
        for k in range(self.n_heads):
            z = self.w[k](h)
            logits = self.a_src[k](z) + self.a_dst[k](z).T
            alpha = _masked_softmax(logits.leaky_relu(0.2), attend_mask, dtype)
            outs.append(alpha @ z)
        if self.combine == "project":
            return self.proj(concat(outs, axis=1))
        total = outs[0]
        for o in outs[1:]:
            total = total + o
        return total * (1.0 / self.n_heads)


class GATEncoder(Module):
    """Three attention layers, 4 heads each; heads are concatenated and
    projected except in the last layer, where they are averaged."""

    output_dim = 128
    n_attention_heads = 4

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        d = config.hidden_dim
        n = config.n_layers
        dims = [NODE_FEATURE_DIM] + [d] * n
        self.layers = [
            GATLayer(
                dims[i], d, self.n_attention_heads,
                "average" if i == n - 1 else "project",
            )
            for i in range(n)
        ]
        self.readout = WeightedSumMaxReadout(d)

    def encode_graph(self, bundle, ctx):
        mask = bundle.graph.adjacency() | np.eye(bundle.graph.n_atoms, dtype=bool)
        h = Tensor(bundle.graph.node_features.astype(self.dtype))
        for layer in self.layers:
            h = layer(h, mask, self.dtype).relu()
            h = ctx.dropout(h, self.dropout_rate)
        return self.readout(h)


class AttentiveFPEncoder(Module):
    """Edge-conditioned attention message passing with gated node updates and
    a super-node attention readout."""

    output_dim = 64
    readout_steps = 2

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        d = config.hidden_dim
        self.d = d
        self.init = Dense(NODE_FEATURE_DIM, d)
        self.layers = [
            _AttentiveFPLayer(d) for _ in range(config.n_layers)
        ]
        self.read_logit = Dense(2 * d, 1)
        self.read_value = Dense(d, d)
        self.read_gru = GRUCell(d, d)

    def encode_graph(self, bundle, ctx):
        n = bundle.graph.n_atoms
        adj = bundle.graph.adjacency()
        # dense [N, N, 3] bond features; zero rows where no bond
        ef = np.zeros((n, n, EDGE_FEATURE_DIM), dtype=self.dtype)
        for (u, v), feat in zip(bundle.graph.edges, bundle.graph.edge_features):
            ef[u, v] = ef[v, u] = feat
        h = self.init(Tensor(bundle.graph.node_features.astype(self.dtype))).relu()
        for layer in self.layers:
            h = layer(h, adj, ef, self.dtype)
            h = ctx.dropout(h, self.dropout_rate)
        # super node attends over all atoms for a fixed number of steps
        s = h.sum(axis=0).reshape(1, -1)
        ones = np.ones((1, n), dtype=bool)
        for _ in range(self.readout_steps):
            paired = concat(
                [Tensor(np.ones((n, 1), dtype=self.dtype)) @ s, h], axis=1
            )
            logits = self.read_logit(paired).leaky_relu(0.2).T
            alpha = _masked_softmax(logits, ones, self.dtype)
            c = alpha @ self.read_value(h).relu()
            s = self.read_gru(c, s)
        return s.reshape(-1)


class _AttentiveFPLayer(Module):
    def __init__(self, d):
        self.msg = Dense(d + EDGE_FEATURE_DIM, d)
        self.logit = Dense(2 * d, 1)
        self.value = Dense(d, d)
        self.gru = GRUCell(d, d)

    def __call__(self, h, adj, ef, dtype):
        n = h.shape[0]
        # m[i, j] encodes neighbor j's state together with the (i, j) bond
        h_j = Tensor(np.ones((n, 1, 1), dtype=dtype)) * h.reshape(1, n, -1)
        m = self.msg(concat([h_j, Tensor(ef)], axis=2)).relu()
        h_i = h.reshape(n, 1, -1) * Tensor(np.ones((1, n, 1), dtype=dtype))
        logits = self.logit(concat([h_i, m], axis=2)).leaky_relu(0.2)
        alpha = _masked_softmax(logits.reshape(n, n), adj, dtype)
        context = (alpha.reshape(n, n, 1) * self.value(m)).sum(axis=1)
        return self.gru(context, h)


class MPNNEncoder(Module):
    """Message passing with a bond-order-conditioned linear message map and a
    GRU node update shared across steps."""

    output_dim = 128

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        self.n_steps = config.n_layers
        d = config.hidden_dim
        self.init = Dense(NODE_FEATURE_DIM, d)
        # one linear message map per bond order (one-hot edge features)
        self.edge_maps = [Dense(d, d) for _ in BOND_ORDERS]
        self.gru = GRUCell(d, d)
        self.readout = SumMaxReadout(d)

    def encode_graph(self, bundle, ctx):
        n = bundle.graph.n_atoms
        adj_by_order = [
            np.zeros((n, n), dtype=self.dtype) for _ in BOND_ORDERS
        ]
        for (u, v), feat in zip(bundle.graph.edges, bundle.graph.edge_features):
            k = int(np.argmax(feat))
            adj_by_order[k][u, v] = adj_by_order[k][v, u] = 1.0
        h = self.init(Tensor(bundle.graph.node_features.astype(self.dtype))).relu()
        for _ in range(self.n_steps):
            msg = None
            for a, emap in zip(adj_by_order, self.edge_maps):
                if not a.any():
                    continue
                part = Tensor(a) @ emap(h)
                msg = part if msg is None else msg + part
            if msg is None:
                msg = Tensor(np.zeros_like(h.data))
            h = self.gru(msg, h)
        return self.readout(h)


class PAGTNEncoder(Module):
    """Attention over node pairs within path range, with logits and values
    conditioned on shortest-path bond features."""

    output_dim = 128

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        d = config.hidden_dim
        self.init = Dense(NODE_FEATURE_DIM, d)
        self.layers = [_PAGTNLayer(d) for _ in range(config.n_layers)]
        self.readout = WeightedSumMaxReadout(d)

    def encode_graph(self, bundle, ctx):
        h = self.init(
            Tensor(bundle.graph.node_features.astype(self.dtype))
        ).leaky_relu()
        pf = Tensor(bundle.path_features.astype(self.dtype))
        for layer in self.layers:
            h = layer(h, pf, bundle.path_in_range, self.dtype)
            h = ctx.dropout(h, self.dropout_rate)
        return self.readout(h)


class _PAGTNLayer(Module):
    def __init__(self, d):
        self.w = Dense(d, d, bias=False)
        self.a_src = Dense(d, 1, bias=False)
        self.a_dst = Dense(d, 1, bias=False)
        self.a_path = Dense(PATH_FEATURE_DIM, 1, bias=False)
        self.value = Dense(d, d)
        self.path_value = Dense(PATH_FEATURE_DIM, d, bias=False)

    def __call__(self, h, pf, in_range, dtype):
        n = h.shape[0]
        z = self.w(h)
        logits = self.a_src(z) + self.a_dst(z).T + self.a_path(pf).reshape(n, n)
        alpha = _masked_softmax(logits.leaky_relu(0.2), in_range, dtype)
        pv = self.path_value(pf)  # [N, N, d]
        mixed = alpha @ self.value(h) + (alpha.reshape(n, n, 1) * pv).sum(axis=1)
        return mixed.leaky_relu() + h


class GraphormerEncoder(Module):
    """Single full-attention layer with degree (centrality), shortest-path
    distance, and mean bond-order attention biases; max readout over nodes."""

    output_dim = 64

    def __init__(self, config, dtype=np.float32):
        self.dtype = dtype
        self.dropout_rate = config.dropout
        d = config.hidden_dim
        n_heads = config.n_heads
        self.n_heads = n_heads
        self.init = Dense(NODE_FEATURE_DIM, d)
        self.degree_emb = Parameter((DEGREE_CAP + 1, d), fans=(DEGREE_CAP + 1, d))
        self.spd_bias = Parameter(
            (FAR_BUCKET + 1, n_heads), fans=(FAR_BUCKET + 1, n_heads)
        )
        self.edge_bias = Dense(EDGE_FEATURE_DIM, n_heads, bias=False)
        self.attn = MultiHeadSelfAttention(d, n_heads)
        self.ln1 = LayerNorm(d)
        self.ff1 = Dense(d, 4 * d)
        self.ff2 = Dense(4 * d, d)
        self.ln2 = LayerNorm(d)

    def attention_bias(self, bundle):
        """Additive [n_heads, N, N] attention-logit bias."""
        spd = embedding(self.spd_bias, bundle.spd)  # [N, N, H]
        mean_bond = (bundle.mean_bond + bundle.mean_bond.transpose(1, 0, 2)) / 2.0
        edge = self.edge_bias(Tensor(mean_bond.astype(self.dtype)))
        return (spd + edge).transpose(2, 0, 1)

    def encode_graph(self, bundle, ctx):
        n = bundle.graph.n_atoms
        if n > GRAPHORMER_MAX_ATOMS:
            raise GraphSizeError(
                f"graph has {n} atoms; dense attention capped at "
                f"{GRAPHORMER_MAX_ATOMS}"
            )
        h = self.init(Tensor(bundle.graph.node_features.astype(self.dtype)))
        h = h + embedding(self.degree_emb, bundle.degrees)
        bias = self.attention_bias(bundle)
        a = ctx.dropout(self.attn(h, bias=bias), self.dropout_rate)
        h = self.ln1(h + a)
        f = ctx.dropout(self.ff2(self.ff1(h).relu()), self.dropout_rate)
        h = self.ln2(h + f)
        return h.max(axis=0)
