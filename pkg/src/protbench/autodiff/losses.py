"""Loss functions with numerically stable log-sum-exp formulations."""

import numpy as np

from .tensor import ShapeError, Tensor


class DegenerateLossError(ValueError):
    pass


def _check_shapes(pred, target):
    if pred.shape != np.asarray(target).shape:
        raise ShapeError(
            f"loss shape mismatch: prediction {pred.shape} vs target "
            f"{np.asarray(target).shape}"
        )


def mse_loss(pred, target):
    _check_shapes(pred, target)
    diff = pred - Tensor(np.asarray(target, dtype=pred.dtype))
    return (diff * diff).mean()


def l1_loss(pred, target):
    """Mean absolute error as a differentiable loss."""
    _check_shapes(pred, target)
    diff = pred - Tensor(np.asarray(target, dtype=pred.dtype))
    return diff.abs().mean()


def _softplus(x):
    # log(1 + exp(x)) without overflow: max(x, 0) + log1p(exp(-|x|)),
    # with max(x, 0) written as (x + |x|)/2 so the subgradient at exactly
    # zero is 1/2 and the composite derivative is sigmoid(x) everywhere
    return (x + x.abs()) * 0.5 + ((-x.abs()).exp() + 1.0).log()


def bce_with_logits(logits, labels):
    """Binary cross-entropy on logits; labels in {0, 1}."""
    labels = np.asarray(labels, dtype=logits.dtype)
    _check_shapes(logits, labels)
    # loss_i = softplus(x_i) - y_i * x_i
    return (_softplus(logits) - logits * Tensor(labels)).mean()


def masked_residue_bce(logits, labels, mask):
    """Per-position BCE averaged over mask-true positions only."""
    labels = np.asarray(labels, dtype=logits.dtype)
    mask = np.asarray(mask, dtype=bool)
    _check_shapes(logits, labels)
    n = int(mask.sum())
    if n == 0:
        raise DegenerateLossError("masked BCE: mask selects zero positions")
    m = Tensor(mask.astype(logits.dtype))
    per = (_softplus(logits) - logits * Tensor(labels)) * m
    return per.sum() * (1.0 / n)


def softmax_cross_entropy(logits, labels):
    """Multiclass cross-entropy; ``logits`` [n, K], ``labels`` integer classes."""
    labels = np.asarray(labels, dtype=np.int64)
    n, k = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels shape {labels.shape} incompatible with ({n},)")
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"class index out of range for K={k}")
    shift = Tensor(logits.data.max(axis=1, keepdims=True))
    lse = ((logits - shift).exp().sum(axis=1, keepdims=True)).log() + shift
    picked = logits[np.arange(n), labels]
    return (lse.sum() - picked.sum()) * (1.0 / n)
