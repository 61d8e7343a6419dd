"""Benchmark dataset registry with published split sizes."""

from dataclasses import dataclass

from .tasks import TaskSpec


class UnknownDatasetError(KeyError):
    def __init__(self, name, valid):
        super().__init__(
            f"unknown dataset {name!r}; valid names: {', '.join(sorted(valid))}"
        )


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    task: TaskSpec
    splits: tuple  # (train, valid, test)
    provenance: str


def _entry(name, kind, metric, splits, provenance, n_classes=1):
    return RegistryEntry(
        name=name,
        task=TaskSpec(kind=kind, primary_metric=metric, n_classes=n_classes),
        splits=splits,
        provenance=provenance,
    )


REGISTRY = {
    e.name: e
    for e in [
        _entry("Fluorescence", "regression", "spearman",
               (21446, 5362, 27217), "PEER function prediction"),
        _entry("Stability", "regression", "spearman",
               (53571, 2512, 12851), "PEER function prediction"),
        _entry("Beta-lactamase", "regression", "spearman",
               (4158, 520, 520), "PEER function prediction"),
        _entry("Solubility", "binary", "pr_auc",
               (62478, 6942, 1999), "PEER function prediction"),
        _entry("Subcellular", "multiclass", "acc",
               (8945, 2248, 2768), "PEER localization", n_classes=10),
        _entry("Binary-localization", "binary", "pr_auc",
               (5161, 1727, 1746), "PEER localization"),
        _entry("PPI-Affinity", "pair_regression", "r2",
               (2127, 212, 343), "PEER protein-protein interaction"),
        _entry("Yeast", "pair_binary", "pr_auc",
               (1668, 131, 373), "PEER protein-protein interaction"),
        _entry("Human-PPI", "pair_binary", "pr_auc",
               (6844, 277, 227), "PEER protein-protein interaction"),
        _entry("IEDB", "residue_binary", "roc_auc",
               (2211, 316, 632), "TDC epitope prediction"),
        _entry("PDB-Jespersen", "residue_binary", "roc_auc",
               (313, 45, 89), "TDC epitope prediction"),
        _entry("SAbDab-Liberis", "residue_binary", "roc_auc",
               (716, 102, 205), "TDC paratope prediction"),
        _entry("TAP", "pair_regression", "mae",
               (169, 24, 48), "TDC antibody developability"),
        _entry("SAbDab-Chen", "pair_regression", "mae",
               (1686, 241, 482), "TDC antibody developability"),
        _entry("CRISPR-Leenay", "multi_regression", "mae",
               (1065, 152, 304), "TDC CRISPR repair outcome", n_classes=5),
    ]
}


def registry_lookup(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownDatasetError(name, REGISTRY) from None
