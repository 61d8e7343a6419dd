"""CSV dataset ingestion and emission.

Directory layout: ``<root>/{train,valid,test}.csv`` with a header row.
Columns by task shape: ``sequence,label`` for single-input tasks,
``sequence_1,sequence_2,label`` for pair tasks, and
``sequence,active_positions`` (JSON integer array) for residue tasks.
Multi-output labels are JSON float arrays in the ``label`` column.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .tasks import DatasetRecord, TaskError

SPLITS = ("train", "valid", "test")


class DataFormatError(ValueError):
    pass


def _expected_columns(task):
    if task.input_arity == 2:
        return ["sequence_1", "sequence_2", "label"]
    if task.is_residue:
        return ["sequence", "active_positions"]
    return ["sequence", "label"]


def _parse_label(raw, task, where):
    try:
        if task.is_residue:
            label = json.loads(raw)
            if not isinstance(label, list) or not all(
                isinstance(i, int) for i in label
            ):
                raise ValueError("expected a JSON integer array")
            return label
        if task.kind == "multi_regression":
            label = np.asarray(json.loads(raw), dtype=float)
            return label
        if task.kind in ("binary", "pair_binary", "multiclass"):
            return int(raw)
        return float(raw)
    except (ValueError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"{where}: malformed label {raw!r}: {exc}") from None


def load_split(path, task):
    path = Path(path)
    expected = _expected_columns(task)
    records = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot open {path}: {exc}") from None
    with fh:
        try:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != expected:
                raise DataFormatError(
                    f"{path}: expected columns {expected}, got {header}"
                )
            for lineno, row in enumerate(reader, start=2):
                where = f"{path}:{lineno}"
                if len(row) != len(expected):
                    raise DataFormatError(
                        f"{where}: expected {len(expected)} columns, got "
                        f"{len(row)}"
                    )
                seqs = tuple(row[:-1])
                label = _parse_label(row[-1], task, where)
                record = DatasetRecord(sequences=seqs, label=label)
                try:
                    record.validate(task)
                except TaskError as exc:
                    raise DataFormatError(f"{where}: {exc}") from None
                records.append(record)
        except UnicodeDecodeError as exc:
            raise DataFormatError(f"{path}: not valid UTF-8: {exc}") from None
    return records


def load_dataset(root, task):
    """Load train/valid/test splits from a dataset directory."""
    root = Path(root)
    return {split: load_split(root / f"{split}.csv", task) for split in SPLITS}


def _format_label(record, task):
    if task.is_residue:
        return json.dumps(list(record.label))
    if task.kind == "multi_regression":
        return json.dumps([float(v) for v in record.label])
    if task.kind in ("binary", "pair_binary", "multiclass"):
        return str(int(record.label))
    return repr(float(record.label))


def save_split(path, records, task):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_expected_columns(task))
        for record in records:
            writer.writerow(list(record.sequences) + [_format_label(record, task)])


def save_dataset(root, splits, task):
    root = Path(root)
    for split, records in splits.items():
        save_split(root / f"{split}.csv", records, task)
