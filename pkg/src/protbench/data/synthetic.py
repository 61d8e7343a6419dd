"""Rule-based synthetic datasets for desk-scale testing.

Every label is a deterministic function of the sequence(s) (plus seeded
Gaussian noise for regression rules), so identical specs produce identical
datasets bit for bit.
"""

from dataclasses import dataclass, field

import numpy as np

from ..encoding import CANONICAL
from .tasks import DatasetRecord, TaskSpec

#: disjoint residue groups behind the five-output hydrophobicity rule
HYDRO_GROUPS = ("AV", "LI", "FW", "MC", "PG")

RULES = {
    "regression": TaskSpec("regression", "spearman"),
    "binary": TaskSpec("binary", "pr_auc"),
    "multiclass": TaskSpec("multiclass", "acc", n_classes=10),
    "residue": TaskSpec("residue_binary", "roc_auc"),
    "pair-regression": TaskSpec("pair_regression", "r2"),
    "pair-binary": TaskSpec("pair_binary", "pr_auc"),
    "multi-regression": TaskSpec("multi_regression", "mae", n_classes=5),
}

NOISE_SIGMA = 0.02


@dataclass(frozen=True)
class SyntheticSpec:
    rule: str
    n_train: int = 128
    n_valid: int = 32
    n_test: int = 32
    min_length: int = 10
    max_length: int = 30
    seed: int = 0

    @property
    def task(self):
        if self.rule not in RULES:
            raise ValueError(
                f"unknown synthetic rule {self.rule!r}; valid: "
                f"{', '.join(RULES)}"
            )
        return RULES[self.rule]


def _trigrams(seq):
    return {seq[i : i + 3] for i in range(len(seq) - 2)}


def regression_label(seq):
    return (seq.count("K") + seq.count("R")) / len(seq)


def binary_label(seq):
    return int("KR" in seq)


def multiclass_label(seq):
    return seq.count("A") % 10


def residue_label(seq):
    return [i for i, ch in enumerate(seq) if ch in "DE"]


def pair_binary_label(seq_a, seq_b):
    return int(bool(_trigrams(seq_a) & _trigrams(seq_b)))


def pair_regression_label(seq_a, seq_b):
    ta, tb = _trigrams(seq_a), _trigrams(seq_b)
    union = ta | tb
    return len(ta & tb) / len(union) if union else 0.0


def multi_regression_label(seq):
    return np.array(
        [sum(seq.count(ch) for ch in group) / len(seq) for group in HYDRO_GROUPS]
    )


def _random_sequence(rng, spec):
    n = int(rng.integers(spec.min_length, spec.max_length + 1))
    return "".join(rng.choice(list(CANONICAL), size=n))


def _make_record(rng, spec):
    rule = spec.rule
    if rule.startswith("pair"):
        a, b = _random_sequence(rng, spec), _random_sequence(rng, spec)
        if rule == "pair-binary":
            return DatasetRecord((a, b), pair_binary_label(a, b))
        label = pair_regression_label(a, b) + rng.normal(0.0, NOISE_SIGMA)
        return DatasetRecord((a, b), label)
    seq = _random_sequence(rng, spec)
    if rule == "regression":
        return DatasetRecord(
            (seq,), regression_label(seq) + rng.normal(0.0, NOISE_SIGMA)
        )
    if rule == "binary":
        return DatasetRecord((seq,), binary_label(seq))
    if rule == "multiclass":
        return DatasetRecord((seq,), multiclass_label(seq))
    if rule == "residue":
        return DatasetRecord((seq,), residue_label(seq))
    if rule == "multi-regression":
        noise = rng.normal(0.0, NOISE_SIGMA, len(HYDRO_GROUPS))
        return DatasetRecord((seq,), multi_regression_label(seq) + noise)
    raise AssertionError(rule)


def make_synthetic(spec):
    """Generate {train, valid, test} record lists from a synthetic spec."""
    spec.task  # validates the rule name
    sizes = {"train": spec.n_train, "valid": spec.n_valid, "test": spec.n_test}
    for split, n in sizes.items():
        if n < 4:
            raise ValueError(f"synthetic split {split!r} too small: {n} < 4")
    out = {}
    for si, (split, n) in enumerate(sizes.items()):
        rng = np.random.default_rng([spec.seed, si])
        records = []
        while len(records) < n:
            rec = _make_record(rng, spec)
            if spec.task.is_residue and not rec.label:
                continue  # keep at least one active position per record
            records.append(rec)
        out[split] = records
    return out
