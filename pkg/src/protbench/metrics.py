"""Evaluation metrics and the two-sample Student's t-test.

Metric names used in reports: acc, precision, recall, pr_auc, roc_auc,
mse, mae, spearman, r2.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class MetricReport:
    values: dict
    n_samples: int
    threshold: float = 0.5
    degenerate: tuple = ()


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    significant_05: bool
    significant_01: bool
    degenerate: bool = False


def _as_1d(x, name):
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size == 0:
        raise UndefinedMetricError(f"{name}: empty input")
    return arr


def _check_lengths(a, b):
    if a.shape != b.shape:
        raise UndefinedMetricError(
            f"length mismatch: {a.shape} vs {b.shape}"
        )


def confusion_counts(preds, labels):
    preds = np.asarray(preds, dtype=int).reshape(-1)
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if preds.size == 0:
        raise UndefinedMetricError("confusion_counts: empty input")
    if preds.shape != labels.shape:
        raise UndefinedMetricError(
            f"length mismatch: {preds.shape} vs {labels.shape}"
        )
    tp = int(np.sum((preds == 1) & (labels == 1)))
    fp = int(np.sum((preds == 1) & (labels == 0)))
    tn = int(np.sum((preds == 0) & (labels == 0)))
    fn = int(np.sum((preds == 0) & (labels == 1)))
    return ConfusionCounts(tp, fp, tn, fn)


def classification_point_metrics(scores, labels, threshold=0.5):
    """Accuracy/precision/recall at a probability threshold.

    ``scores`` may be hard {0,1} predictions or probabilities; anything
    strictly above ``threshold`` counts as a positive prediction.  Zero
    denominators yield 0 with the metric named in ``degenerate``.
    """
    scores = _as_1d(scores, "classification_point_metrics")
    preds = (scores > threshold).astype(int)
    counts = confusion_counts(preds, labels)
    degenerate = []
    if counts.tp + counts.fp == 0:
        precision = 0.0
        degenerate.append("precision")
    else:
        precision = counts.tp / (counts.tp + counts.fp)
    if counts.tp + counts.fn == 0:
        recall = 0.0
        degenerate.append("recall")
    else:
        recall = counts.tp / (counts.tp + counts.fn)
    accuracy = (counts.tp + counts.tn) / counts.total
    report = MetricReport(
        values={"acc": accuracy, "precision": precision, "recall": recall},
        n_samples=counts.total,
        threshold=threshold,
        degenerate=tuple(degenerate),
    )
    return counts, report


def multiclass_accuracy(preds, labels):
    preds = np.asarray(preds, dtype=int).reshape(-1)
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if preds.size == 0:
        raise UndefinedMetricError("multiclass_accuracy: empty input")
    return float(np.mean(preds == labels))


def _binary_labels(labels, name):
    labels = np.asarray(labels).reshape(-1)
    if not np.isin(labels, (0, 1)).all():
        raise UndefinedMetricError(f"{name}: labels must be 0/1")
    return labels.astype(int)


def roc_auc(scores, labels):
    """Mann–Whitney formulation: P(random positive outscores a random
    negative), ties counted one half."""
    scores = _as_1d(scores, "roc_auc")
    labels = _binary_labels(labels, "roc_auc")
    _check_lengths(scores, labels.astype(float))
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("roc_auc: both classes must be present")
    ranks = _average_ranks(scores)
    rank_sum = ranks[labels == 1].sum()
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_auc(scores, labels):
    """Average precision by step integration in descending-score order,
    with tied scores grouped into one threshold."""
    scores = _as_1d(scores, "pr_auc")
    labels = _binary_labels(labels, "pr_auc")
    _check_lengths(scores, labels.astype(float))
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise UndefinedMetricError("pr_auc: at least one positive required")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    ap = 0.0
    tp = 0
    seen = 0
    i = 0
    n = s.size
    while i < n:
        j = i
        while j < n and s[j] == s[i]:
            j += 1
        group_pos = int(y[i:j].sum())
        tp += group_pos
        seen = j
        if group_pos:
            precision = tp / seen
            ap += group_pos * precision
        i = j
    return float(ap / n_pos)


def mse(y, y_hat):
    y = _as_1d(y, "mse")
    y_hat = _as_1d(y_hat, "mse")
    _check_lengths(y, y_hat)
    return float(np.mean((y - y_hat) ** 2))


def mae(y, y_hat):
    y = _as_1d(y, "mae")
    y_hat = _as_1d(y_hat, "mae")
    _check_lengths(y, y_hat)
    return float(np.mean(np.abs(y - y_hat)))


def _average_ranks(x):
    """1-based ranks with ties assigned the mean rank of the tied block."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size, dtype=float)
    i = 0
    while i < x.size:
        j = i
        while j < x.size and x[order[j]] == x[order[i]]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2.0  # mean of ranks i+1 .. j
        i = j
    return ranks


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a * a).sum() * (b * b).sum())
    return float((a * b).sum() / denom)


def spearman_rho(y, y_hat):
    """Pearson correlation of average-ranked values (ties get mean rank)."""
    y = _as_1d(y, "spearman")
    y_hat = _as_1d(y_hat, "spearman")
    _check_lengths(y, y_hat)
    if y.size < 2:
        raise UndefinedMetricError("spearman: need at least 2 samples")
    if np.all(y == y[0]) or np.all(y_hat == y_hat[0]):
        raise UndefinedMetricError("spearman: constant input vector")
    return _pearson(_average_ranks(y), _average_ranks(y_hat))


def r_squared(y, y_hat):
    y = _as_1d(y, "r2")
    y_hat = _as_1d(y_hat, "r2")
    _check_lengths(y, y_hat)
    if y.size < 2:
        raise UndefinedMetricError("r2: need at least 2 samples")
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise UndefinedMetricError("r2: constant target vector")
    ss_res = float(((y - y_hat) ** 2).sum())
    return 1.0 - ss_res / ss_tot


def students_t_test(samples_a, samples_b):
    """Two-sample pooled-variance t-test with an exact two-sided p-value
    via the regularized incomplete beta function."""
    a = _as_1d(samples_a, "t-test")
    b = _as_1d(samples_b, "t-test")
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise UndefinedMetricError("t-test: need at least 2 samples per group")
    df = na + nb - 2
    pooled = (((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()) / df
    diff = a.mean() - b.mean()
    if pooled == 0.0:
        if diff == 0.0:
            return TTestResult(0.0, df, 1.0, False, False)
        return TTestResult(
            float(np.sign(diff)) * np.inf, df, 0.0, True, True, degenerate=True
        )
    se = np.sqrt(pooled * (1.0 / na + 1.0 / nb))
    t = float(diff / se)
    # two-sided p = I_{df/(df+t^2)}(df/2, 1/2)
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t, df, p, p < 0.05, p < 0.01)


def compute_metric(name, y_true, y_pred, threshold=0.5):
    """Evaluate one named metric; scores are raw for AUCs, thresholded for
    point metrics."""
    if name == "acc":
        pred = np.asarray(y_pred, dtype=float).reshape(-1)
        # class indices compare directly; binary probabilities are thresholded
        if not np.isin(pred, (0.0, 1.0)).all() and (pred != np.round(pred)).any():
            pred = (pred > threshold).astype(float)
        return multiclass_accuracy(pred.astype(int), y_true)
    if name == "precision" or name == "recall":
        _, report = classification_point_metrics(y_pred, y_true, threshold)
        return report.values[name]
    if name == "pr_auc":
        return pr_auc(y_pred, y_true)
    if name == "roc_auc":
        return roc_auc(y_pred, y_true)
    if name == "mse":
        return mse(y_true, y_pred)
    if name == "mae":
        return mae(y_true, y_pred)
    if name == "spearman":
        return spearman_rho(y_true, y_pred)
    if name == "r2":
        return r_squared(y_true, y_pred)
    raise UndefinedMetricError(f"unknown metric {name!r}")


#: metrics where larger values are better
HIGHER_IS_BETTER = {
    "acc": True,
    "precision": True,
    "recall": True,
    "pr_auc": True,
    "roc_auc": True,
    "mse": False,
    "mae": False,
    "spearman": True,
    "r2": True,
}
