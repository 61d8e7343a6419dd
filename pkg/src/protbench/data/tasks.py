"""Task taxonomy and dataset records."""

from dataclasses import dataclass

import numpy as np

REGRESSION_METRICS = ("mse", "mae", "spearman", "r2")
CLASSIFICATION_METRICS = ("acc", "precision", "recall", "pr_auc", "roc_auc")

TASK_KINDS = (
    "regression",
    "binary",
    "multiclass",
    "residue_binary",
    "pair_regression",
    "pair_binary",
    "multi_regression",
)


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    primary_metric: str
    n_classes: int = 1  # K for multiclass, output count for multi_regression

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise TaskError(f"unknown task kind {self.kind!r}")
        regression_like = self.kind in (
            "regression", "pair_regression", "multi_regression",
        )
        allowed = REGRESSION_METRICS if regression_like else CLASSIFICATION_METRICS
        if self.primary_metric not in allowed:
            raise TaskError(
                f"metric {self.primary_metric!r} incompatible with task kind "
                f"{self.kind!r}"
            )

    @property
    def input_arity(self):
        return 2 if self.kind.startswith("pair") else 1

    @property
    def is_residue(self):
        return self.kind == "residue_binary"

    @property
    def output_dim(self):
        if self.kind == "multiclass":
            return self.n_classes
        if self.kind == "multi_regression":
            return self.n_classes
        return 1

    @property
    def higher_is_better(self):
        return self.primary_metric not in ("mse", "mae")


@dataclass
class DatasetRecord:
    sequences: tuple  # one or two sequences per input arity
    label: object  # float, int, numpy vector, or position index list

    def validate(self, task):
        if len(self.sequences) != task.input_arity:
            raise TaskError(
                f"record has {len(self.sequences)} sequences; task expects "
                f"{task.input_arity}"
            )
        if task.kind == "residue_binary":
            length = len(self.sequences[0])
            for idx in self.label:
                if not 0 <= idx < length:
                    raise TaskError(
                        f"residue index {idx} out of range for length {length}"
                    )
        elif task.kind == "multiclass":
            if not 0 <= int(self.label) < task.n_classes:
                raise TaskError(
                    f"class index {self.label} out of range for "
                    f"K={task.n_classes}"
                )
        elif task.kind == "multi_regression":
            arr = np.asarray(self.label, dtype=float)
            if arr.shape != (task.n_classes,):
                raise TaskError(
                    f"expected {task.n_classes}-vector label, got shape "
                    f"{arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise TaskError("non-finite label")
        else:
            if not np.isfinite(float(self.label)):
                raise TaskError("non-finite label")
