from .tensor import (
    ShapeError,
    Tensor,
    concat,
    conv1d_valid,
    dropout,
    embedding,
    pad_rows,
    softmax,
    stack,
    tensor,
)
from .nn import (
    BatchNorm,
    BiGRU,
    Context,
    Conv1d,
    Dense,
    GRUCell,
    GRULayer,
    LayerNorm,
    MLP,
    Module,
    MultiHeadSelfAttention,
    Parameter,
)
from .losses import (
    DegenerateLossError,
    bce_with_logits,
    l1_loss,
    masked_residue_bce,
    mse_loss,
    softmax_cross_entropy,
)
from .optim import Adam, NonFiniteGradientError
from .gradcheck import finite_difference_check
