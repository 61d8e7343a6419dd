"""Encoder + prediction-head composition, pair inputs, and residue mode."""

import numpy as np

from ..autodiff import MLP, Module, concat, stack
from ..data.tasks import TaskSpec
from ..encoding import tokenize
from ..molgraph import prepare_graph
from .config import (
    ENCODER_KINDS,
    GRAPH_KINDS,
    SEQUENCE_KINDS,
    UnknownEncoderError,
    default_config,
)
from .graph import (
    AttentiveFPEncoder,
    GATEncoder,
    GCNEncoder,
    GraphormerEncoder,
    MPNNEncoder,
    NeuralFPEncoder,
    PAGTNEncoder,
)
from .sequence import CNNEncoder, CNNGRUEncoder, TransformerEncoder

_ENCODER_CLASSES = {
    "CNN": CNNEncoder,
    "CNN_RNN": CNNGRUEncoder,
    "Transformer": TransformerEncoder,
    "GCN": GCNEncoder,
    "GAT": GATEncoder,
    "NeuralFP": NeuralFPEncoder,
    "AttentiveFP": AttentiveFPEncoder,
    "MPNN": MPNNEncoder,
    "PAGTN": PAGTNEncoder,
    "Graphormer": GraphormerEncoder,
}


class IncompatibleTaskError(ValueError):
    pass


def make_encoder(config, dtype=np.float32):
    if config.kind not in _ENCODER_CLASSES:
        raise UnknownEncoderError(config.kind)
    return _ENCODER_CLASSES[config.kind](config, dtype)


def prepare_input(kind, sequence):
    """Model input for one sequence: token ids or a graph bundle."""
    if kind in SEQUENCE_KINDS:
        return np.asarray(tokenize(sequence).ids)
    return prepare_graph(sequence)


class PredictionModel(Module):
    """Shared-weight encoder with an MLP head; handles pooled, pair, and
    per-residue output modes."""

    def __init__(self, config, task: TaskSpec, dtype=np.float32, seed=0):
        if task.is_residue and config.kind not in SEQUENCE_KINDS:
            raise IncompatibleTaskError(
                f"residue-level tasks require a sequence encoder "
                f"(CNN, CNN_RNN, Transformer); got {config.kind}"
            )
        self.kind = config.kind
        self.task = task
        self.dtype = dtype
        self.encoder = make_encoder(config, dtype)
        d_emb = (
            self.encoder.per_position_dim
            if task.is_residue
            else self.encoder.output_dim * task.input_arity
        )
        # Batch norm belongs to the node-level encoder layers (see
        # GCNEncoder); applying it across a small prediction batch would tie
        # each output to its batchmates' statistics.
        head_norm = config.norm if config.norm != "batch" else None
        self.head = MLP(
            d_emb,
            config.head_hidden,
            task.output_dim,
            norm=head_norm,
            dropout_rate=config.dropout,
        )
        self.init_parameters(seed, dtype)

    def _embed_one(self, model_input, ctx):
        if self.kind in SEQUENCE_KINDS:
            return self.encoder.encode(model_input, ctx)
        return self.encoder.encode_graph(model_input, ctx)

    def forward_batch(self, inputs, ctx):
        """Pooled prediction for a batch; returns [B, output_dim] logits."""
        embeddings = []
        for item in inputs:
            if self.task.input_arity == 2:
                a, b = item
                emb = concat([self._embed_one(a, ctx), self._embed_one(b, ctx)],
                             axis=0)
            else:
                emb = self._embed_one(item, ctx)
            embeddings.append(emb)
        return self.head(stack(embeddings, axis=0), ctx)

    def forward_residue(self, ids, ctx):
        """Per-position logits [L] for one sequence."""
        per_pos = self.encoder.encode_positions(ids, ctx)
        return self.head(per_pos, ctx).reshape(-1)
