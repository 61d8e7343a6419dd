from .config import (
    ENCODER_KINDS,
    GRAPH_KINDS,
    SEQUENCE_KINDS,
    EncoderConfig,
    UnknownEncoderError,
    default_config,
    default_lr,
)
from .model import (
    IncompatibleTaskError,
    PredictionModel,
    make_encoder,
    prepare_input,
)
from .graph import (
    AttentiveFPEncoder,
    GATEncoder,
    GCNEncoder,
    GraphSizeError,
    GraphormerEncoder,
    MPNNEncoder,
    NeuralFPEncoder,
    PAGTNEncoder,
    SumMaxReadout,
    WeightedSumMaxReadout,
)
from .sequence import CNNEncoder, CNNGRUEncoder, TransformerEncoder
