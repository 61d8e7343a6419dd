"""Training loop, multi-seed benchmark runner, profiling, report emission."""

import json
import resource
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .autodiff import Adam, Context
from .autodiff.losses import (
    bce_with_logits,
    masked_residue_bce,
    mse_loss,
    softmax_cross_entropy,
)
from .data import (
    RULES,
    SyntheticSpec,
    UnknownDatasetError,
    load_dataset,
    make_synthetic,
    registry_lookup,
)
from .metrics import (
    HIGHER_IS_BETTER,
    UndefinedMetricError,
    classification_point_metrics,
    compute_metric,
    mae,
    mse,
    multiclass_accuracy,
    pr_auc,
    r_squared,
    roc_auc,
    spearman_rho,
    students_t_test,
)
from .models import PredictionModel, default_config, default_lr, prepare_input
from .models.config import GRAPH_KINDS

SCHEMA_VERSION = "1"


class TrainingError(RuntimeError):
    pass


class DataResolutionError(ValueError):
    pass


@dataclass
class TrainConfig:
    encoder: str
    dataset: str = None
    data_dir: str = None
    lr: float = None
    batch_size: int = 32
    epochs: int = 100
    seed: int = 0
    eval_every: int = 1
    out: str = None
    threshold: float = 0.5
    precision: str = "float32"
    offline: bool = False
    run_name: str = None

    def __post_init__(self):
        if self.lr is None:
            self.lr = default_lr(self.encoder)
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.precision not in ("float32", "float64"):
            raise ValueError(f"unknown precision mode {self.precision!r}")

    @property
    def dtype(self):
        return np.float64 if self.precision == "float64" else np.float32


@dataclass
class ProfileRecord:
    sec_per_epoch: float = None
    total_sec: float = None
    peak_mem_mb: float = None


@dataclass
class RunResult:
    seed: int
    train_losses: list
    valid_metrics: list
    best_epoch: int
    test_metrics: dict
    profile: ProfileRecord


@dataclass
class BenchmarkReport:
    dataset: str
    model: str
    seeds: list
    per_seed: dict  # str(seed) -> {metric: value}
    mean: dict
    std: dict
    profile: dict
    significance: dict
    run_name: str = None
    traces: dict = field(default_factory=dict, repr=False)


def resolve_dataset(config):
    """Load the dataset splits and task for a config.

    ``synth-<rule>`` names generate the rule-based dataset on the fly;
    registry names and bare ``data_dir`` paths load CSV splits from disk.
    """
    name = config.dataset
    if name is not None and name.startswith("synth-"):
        rule = name[len("synth-"):]
        if rule not in RULES:
            raise DataResolutionError(
                f"unknown synthetic dataset {name!r}; valid: "
                + ", ".join(f"synth-{r}" for r in RULES)
            )
        spec = SyntheticSpec(rule)
        return make_synthetic(spec), RULES[rule], name
    if name is not None:
        entry = registry_lookup(name)  # raises UnknownDatasetError
        if config.data_dir is None:
            raise DataResolutionError(
                f"dataset {name!r} requires --data_dir pointing at local "
                f"train/valid/test CSV files (no downloader is included)"
            )
        return load_dataset(config.data_dir, entry.task), entry.task, name
    if config.data_dir is None:
        raise DataResolutionError("either a dataset name or a data_dir is required")
    task = infer_task(config.data_dir)
    return load_dataset(config.data_dir, task), task, Path(config.data_dir).name


def infer_task(data_dir):
    """Infer the task spec of a bare CSV directory from its train split."""
    import csv

    from .data.tasks import TaskSpec

    path = Path(data_dir) / "train.csv"
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [row for row in reader]
    except OSError as exc:
        raise DataResolutionError(f"cannot open {path}: {exc}") from None
    if header is None or not rows:
        raise DataResolutionError(f"{path}: empty file")
    labels = [row[-1] for row in rows]
    if header == ["sequence", "active_positions"]:
        return TaskSpec("residue_binary", "roc_auc")
    pair = header == ["sequence_1", "sequence_2", "label"]
    if not pair and header != ["sequence", "label"]:
        raise DataResolutionError(f"{path}: unrecognized columns {header}")
    if all(lab.lstrip().startswith("[") for lab in labels):
        k = len(json.loads(labels[0]))
        return TaskSpec("multi_regression", "mae", n_classes=k)
    try:
        values = [int(lab) for lab in labels]
    except ValueError:
        return TaskSpec(
            "pair_regression" if pair else "regression",
            "mae" if pair else "spearman",
        )
    if set(values) <= {0, 1}:
        return TaskSpec(
            "pair_binary" if pair else "binary", "roc_auc"
        )
    if pair:
        raise DataResolutionError(
            f"{path}: pair tasks support binary or float labels only"
        )
    return TaskSpec("multiclass", "acc", n_classes=max(values) + 1)


def _prepare_inputs(kind, records):
    """Model inputs per record, caching by sequence string."""
    cache = {}
    prepared = []
    for rec in records:
        items = []
        for seq in rec.sequences:
            if seq not in cache:
                cache[seq] = prepare_input(kind, seq)
            items.append(cache[seq])
        prepared.append(tuple(items) if len(items) == 2 else items[0])
    return prepared


def _residue_targets(record, length):
    labels = np.zeros(length)
    for i in record.label:
        labels[i] = 1.0
    return labels


def _batch_loss(model, task, inputs, records, ctx):
    if task.is_residue:
        total = None
        for x, rec in zip(inputs, records):
            logits = model.forward_residue(x, ctx)
            labels = _residue_targets(rec, logits.shape[0])
            loss = masked_residue_bce(logits, labels, np.ones(len(labels), bool))
            total = loss if total is None else total + loss
        return total * (1.0 / len(records))
    out = model.forward_batch(inputs, ctx)
    if task.kind in ("regression", "pair_regression"):
        target = np.array([[rec.label] for rec in records])
        return mse_loss(out, target)
    if task.kind == "multi_regression":
        target = np.stack([np.asarray(rec.label, float) for rec in records])
        return mse_loss(out, target)
    if task.kind in ("binary", "pair_binary"):
        target = np.array([[float(rec.label)] for rec in records])
        return bce_with_logits(out, target)
    if task.kind == "multiclass":
        labels = np.array([rec.label for rec in records], dtype=np.int64)
        return softmax_cross_entropy(out, labels)
    raise TrainingError(f"no loss defined for task kind {task.kind!r}")


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def predict(model, task, inputs, batch_size=32):
    """Deterministic eval-mode predictions (probabilities for binary tasks,
    class indices for multiclass, raw values for regression)."""
    ctx = Context(train=False, rng=np.random.default_rng(0))
    if task.is_residue:
        preds = []
        for x in inputs:
            logits = model.forward_residue(x, ctx)
            preds.append(_sigmoid(logits.data))
        return preds
    outs = []
    for start in range(0, len(inputs), batch_size):
        chunk = inputs[start : start + batch_size]
        outs.append(model.forward_batch(chunk, ctx).data)
    out = np.concatenate(outs, axis=0)
    if task.kind in ("binary", "pair_binary"):
        return _sigmoid(out[:, 0])
    if task.kind == "multiclass":
        return out.argmax(axis=1)
    if task.kind == "multi_regression":
        return out
    return out[:, 0]


def evaluate(model, task, inputs, records, threshold=0.5, batch_size=32):
    """All applicable metrics on one split; undefined metrics are omitted."""
    preds = predict(model, task, inputs, batch_size)
    values = {}
    if task.is_residue:
        scores = np.concatenate(preds)
        labels = np.concatenate(
            [_residue_targets(rec, len(p)) for rec, p in zip(records, preds)]
        )
        _try(values, "roc_auc", roc_auc, scores, labels)
        _try(values, "pr_auc", pr_auc, scores, labels)
        _, point = classification_point_metrics(scores, labels, threshold)
        values.update(point.values)
        return values
    labels = np.array([rec.label for rec in records], dtype=object)
    if task.kind in ("regression", "pair_regression"):
        y = labels.astype(float)
        values["mse"] = mse(y, preds)
        values["mae"] = mae(y, preds)
        _try(values, "spearman", spearman_rho, y, preds)
        _try(values, "r2", r_squared, y, preds)
    elif task.kind == "multi_regression":
        y = np.stack([np.asarray(l, float) for l in labels])
        values["mse"] = mse(y.reshape(-1), preds.reshape(-1))
        values["mae"] = mae(y.reshape(-1), preds.reshape(-1))
    elif task.kind == "multiclass":
        values["acc"] = multiclass_accuracy(preds, labels.astype(int))
    else:  # binary, pair_binary
        y = labels.astype(int)
        _try(values, "roc_auc", roc_auc, preds, y)
        _try(values, "pr_auc", pr_auc, preds, y)
        _, point = classification_point_metrics(preds, y, threshold)
        values.update(point.values)
    return values


def _try(values, name, fn, *args):
    try:
        values[name] = fn(*args)
    except UndefinedMetricError:
        pass


def _snapshot(model):
    return {name: p.data.copy() for name, p in model.named_parameters()}


def _restore(model, snapshot):
    for name, p in model.named_parameters():
        p.data = snapshot[name].copy()


def train_model(config, splits=None, task=None, progress=None):
    """Train one model for one seed; returns a RunResult.

    Model selection keeps the parameters from the epoch with the best
    validation value of the task's primary metric; the test split is
    evaluated exactly once, with those parameters.
    """
    if splits is None or task is None:
        splits, task, _ = resolve_dataset(config)
    model = PredictionModel(
        default_config(config.encoder), task, dtype=config.dtype, seed=config.seed
    )
    inputs = {
        split: _prepare_inputs(config.encoder, records)
        for split, records in splits.items()
    }
    optimizer = Adam(list(model.named_parameters()), lr=config.lr)
    n_train = len(splits["train"])
    order_rng_key = [config.seed, 1]
    dropout_rng = np.random.default_rng([config.seed, 2])

    higher = HIGHER_IS_BETTER[task.primary_metric]
    best_value = None
    best_epoch = -1
    best_params = _snapshot(model)
    train_losses = []
    valid_metrics = []
    epoch_times = []

    for epoch in range(config.epochs):
        started = time.perf_counter()
        order = np.random.default_rng(order_rng_key + [epoch]).permutation(n_train)
        epoch_loss = 0.0
        for bi, start in enumerate(range(0, n_train, config.batch_size)):
            idx = order[start : start + config.batch_size]
            batch_inputs = [inputs["train"][i] for i in idx]
            batch_records = [splits["train"][i] for i in idx]
            ctx = Context(train=True, rng=dropout_rng)
            loss = _batch_loss(model, task, batch_inputs, batch_records, ctx)
            value = float(loss.data)
            if not np.isfinite(value):
                raise TrainingError(
                    f"non-finite training loss {value} at epoch {epoch}, "
                    f"batch {bi}"
                )
            loss.backward()
            optimizer.step()
            epoch_loss += value * len(idx)
        train_losses.append(epoch_loss / n_train)
        epoch_times.append(time.perf_counter() - started)

        if (epoch + 1) % config.eval_every == 0 or epoch == config.epochs - 1:
            valid = evaluate(
                model, task, inputs["valid"], splits["valid"],
                config.threshold, config.batch_size,
            )
            value = valid.get(task.primary_metric)
            valid_metrics.append(value)
            improved = value is not None and (
                best_value is None
                or (value > best_value if higher else value < best_value)
            )
            if improved:
                best_value = value
                best_epoch = epoch
                best_params = _snapshot(model)
            if progress is not None:
                progress(epoch, train_losses[-1], value)
        else:
            valid_metrics.append(None)

    _restore(model, best_params)
    test_metrics = evaluate(
        model, task, inputs["test"], splits["test"],
        config.threshold, config.batch_size,
    )
    if config.precision == "float64":
        profile = ProfileRecord()  # timings omitted so reports are reproducible
    else:
        peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        profile = ProfileRecord(
            sec_per_epoch=float(np.mean(epoch_times)),
            total_sec=float(np.sum(epoch_times)),
            peak_mem_mb=peak_kb / 1024.0,
        )
    return RunResult(
        seed=config.seed,
        train_losses=train_losses,
        valid_metrics=valid_metrics,
        best_epoch=best_epoch,
        test_metrics=test_metrics,
        profile=profile,
    )


def _aggregate(per_seed):
    metrics = sorted({m for values in per_seed.values() for m in values})
    mean, std = {}, {}
    for m in metrics:
        samples = [values[m] for values in per_seed.values() if m in values]
        mean[m] = float(np.mean(samples))
        std[m] = float(np.std(samples, ddof=1)) if len(samples) > 1 else 0.0
    return mean, std


def _significance(per_seed, baseline_report):
    """t-test per shared metric against a baseline report's per-seed values."""
    out = {}
    base = baseline_report["per_seed"]
    for m in sorted({k for v in per_seed.values() for k in v}):
        ours = [v[m] for v in per_seed.values() if m in v]
        theirs = [v[m] for v in base.values() if m in v]
        if len(ours) < 2 or len(theirs) < 2:
            raise TrainingError(
                f"t-test for metric {m!r} needs at least 2 seeds per side"
            )
        r = students_t_test(ours, theirs)
        out[m] = {
            "t": None if np.isinf(r.t) else r.t,
            "df": r.df,
            "p": r.p,
            "significant_05": r.significant_05,
            "significant_01": r.significant_01,
        }
    return out


def run_benchmark(config, seeds=(0, 1, 2, 3, 4), baseline=None, progress=None):
    """Independent runs over seeds; aggregates mean/std and optional t-test
    significance against a previously emitted baseline report file."""
    seeds = list(seeds)
    if len(seeds) < 2:
        raise TrainingError("benchmark needs at least 2 seeds")
    splits, task, dataset_name = resolve_dataset(config)
    per_seed = {}
    traces = {}
    profiles = []
    for seed in seeds:
        run_config = TrainConfig(**{**config.__dict__, "seed": seed})
        result = train_model(run_config, splits=splits, task=task, progress=progress)
        per_seed[str(seed)] = result.test_metrics
        traces[str(seed)] = list(zip(result.train_losses, result.valid_metrics))
        profiles.append(result.profile)
    mean, std = _aggregate(per_seed)
    if profiles[0].sec_per_epoch is None:
        profile = {"sec_per_epoch": None, "peak_mem_mb": None}
    else:
        profile = {
            "sec_per_epoch": float(np.mean([p.sec_per_epoch for p in profiles])),
            "peak_mem_mb": float(max(p.peak_mem_mb for p in profiles)),
        }
    significance = {}
    if baseline is not None:
        with open(baseline, encoding="utf-8") as fh:
            significance = _significance(per_seed, json.load(fh))
    return BenchmarkReport(
        dataset=dataset_name,
        model=config.encoder,
        seeds=seeds,
        per_seed=per_seed,
        mean=mean,
        std=std,
        profile=profile,
        significance=significance,
        run_name=config.run_name,
        traces=traces,
    )


def report_to_dict(report):
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": report.dataset,
        "model": report.model,
        "seeds": report.seeds,
        "per_seed": report.per_seed,
        "mean": report.mean,
        "std": report.std,
        "profile": report.profile,
        "significance": report.significance,
        "run_name": report.run_name,
    }


def emit_report(report, path, traces=False):
    """Write the report JSON (and optional per-epoch CSV traces alongside)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if traces:
        for seed, rows in report.traces.items():
            trace_path = path.with_suffix(f".seed{seed}.csv")
            with open(trace_path, "w", encoding="utf-8") as fh:
                fh.write("epoch,train_loss,valid_metric\n")
                for epoch, (loss, metric) in enumerate(rows):
                    metric_str = "" if metric is None else repr(metric)
                    fh.write(f"{epoch},{loss!r},{metric_str}\n")
    return path
