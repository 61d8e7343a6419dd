from .tasks import (
    DatasetRecord,
    TaskError,
    TaskSpec,
    TASK_KINDS,
)
from .registry import REGISTRY, RegistryEntry, UnknownDatasetError, registry_lookup
from .io import DataFormatError, load_dataset, load_split, save_dataset, save_split
from .synthetic import RULES, SyntheticSpec, make_synthetic
