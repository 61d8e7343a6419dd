"""Per-architecture default hyperparameters and encoder kind registry."""

from dataclasses import dataclass, field

SEQUENCE_KINDS = ("CNN", "CNN_RNN", "Transformer")
GRAPH_KINDS = (
    "GCN", "GAT", "NeuralFP", "AttentiveFP", "MPNN", "PAGTN", "Graphormer",
)
ENCODER_KINDS = SEQUENCE_KINDS + GRAPH_KINDS

SEQUENCE_LR = 1e-4
GRAPH_LR = 1e-5


class UnknownEncoderError(ValueError):
    def __init__(self, kind):
        super().__init__(
            f"unknown encoder {kind!r}; valid kinds: {', '.join(ENCODER_KINDS)}"
        )


@dataclass
class EncoderConfig:
    kind: str
    lr: float
    dropout: float = 0.1
    activation: str = "relu"
    n_heads: int | None = None
    n_layers: int = 3
    hidden_dim: int = 64
    pooling: str | None = None
    batch_size: int = 32
    epochs: int = 100
    norm: str | None = None
    head_hidden: tuple = (1024, 1024)


#: default rows: (lr, activation, n_heads, n_layers, hidden_dim, pooling, norm)
_DEFAULT_ROWS = {
    "CNN": (SEQUENCE_LR, "relu", None, 3, 256, "max", None),
    "CNN_RNN": (SEQUENCE_LR, "relu", None, 2, 64, None, None),
    "Transformer": (SEQUENCE_LR, "relu", 4, 2, 64, None, "layer"),
    "GCN": (GRAPH_LR, "relu", None, 3, 64, "weighted_sum_max", "batch"),
    "GAT": (GRAPH_LR, "relu", None, 3, 64, "weighted_sum_max", None),
    "NeuralFP": (GRAPH_LR, "relu", None, 3, 64, "sum_max", "batch"),
    "AttentiveFP": (GRAPH_LR, "relu", None, 3, 64, "attentive", None),
    "MPNN": (GRAPH_LR, "relu", None, 6, 64, "sum_max", None),
    "PAGTN": (GRAPH_LR, "leaky_relu", None, 5, 64, "weighted_sum_max", None),
    "Graphormer": (GRAPH_LR, "relu", 8, 1, 64, "max", "layer"),
}


def default_config(kind):
    if kind not in _DEFAULT_ROWS:
        raise UnknownEncoderError(kind)
    lr, act, heads, layers, dim, pooling, norm = _DEFAULT_ROWS[kind]
    return EncoderConfig(
        kind=kind, lr=lr, activation=act, n_heads=heads, n_layers=layers,
        hidden_dim=dim, pooling=pooling, norm=norm,
    )


def default_lr(kind):
    if kind not in _DEFAULT_ROWS:
        raise UnknownEncoderError(kind)
    return SEQUENCE_LR if kind in SEQUENCE_KINDS else GRAPH_LR
