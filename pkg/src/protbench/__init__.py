"""protbench: protein sequence property prediction toolkit and benchmark
harness.

Ten sequence/graph encoders with a from-scratch reverse-mode autodiff core,
peptide molecular-graph construction, task-aware training, oracle-verified
metrics, and a multi-seed benchmark runner with significance testing.
"""

__version__ = "0.1.0"

from .data import SyntheticSpec, make_synthetic, registry_lookup
from .metrics import compute_metric, students_t_test
from .models import (
    ENCODER_KINDS,
    GRAPH_KINDS,
    SEQUENCE_KINDS,
    PredictionModel,
    default_config,
    make_encoder,
    prepare_input,
)
from .molgraph import build_graph, prepare_graph
from .training import TrainConfig, run_benchmark, train_model

__all__ = [
    "__version__",
    "ENCODER_KINDS",
    "GRAPH_KINDS",
    "SEQUENCE_KINDS",
    "PredictionModel",
    "SyntheticSpec",
    "TrainConfig",
    "build_graph",
    "compute_metric",
    "default_config",
    "make_encoder",
    "make_synthetic",
    "prepare_graph",
    "prepare_input",
    "registry_lookup",
    "run_benchmark",
    "students_t_test",
    "train_model",
]
