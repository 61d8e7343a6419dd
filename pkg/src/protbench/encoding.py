"""Amino-acid vocabulary, tokenization, one-hot batch encoding, and padding."""

from dataclasses import dataclass

import numpy as np

CANONICAL = "ACDEFGHIKLMNPQRSTVWY"
UNKNOWN = "X"
PAD = "<pad>"

#: canonical letters, then X (unknown), then PAD — indices are stable
SYMBOLS = tuple(CANONICAL) + (UNKNOWN, PAD)
VOCAB_SIZE = len(SYMBOLS)  # 22
X_INDEX = VOCAB_SIZE - 2
PAD_INDEX = VOCAB_SIZE - 1

_LETTER_TO_ID = {aa: i for i, aa in enumerate(CANONICAL)}

MAX_LENGTH = 1024


class SequenceParseError(ValueError):
    pass


@dataclass
class TokenSequence:
    ids: list
    original_length: int
    truncated: bool = False
    substituted: bool = False


def tokenize(sequence):
    """Map a protein sequence to vocabulary ids.

    Canonical one-letter codes map to their fixed index; any other letter
    (B, Z, J, U, O, ...) maps to the unknown token and sets the substitution
    flag.  Non-alphabetic characters and empty input are parse errors.
    """
    if not sequence:
        raise SequenceParseError("empty sequence")
    ids = []
    substituted = False
    for pos, ch in enumerate(sequence):
        if not ch.isalpha():
            raise SequenceParseError(
                f"non-alphabetic character {ch!r} at position {pos}"
            )
        ch = ch.upper()
        idx = _LETTER_TO_ID.get(ch)
        if idx is None:
            idx = X_INDEX
            substituted = True
        ids.append(idx)
    return TokenSequence(ids=ids, original_length=len(ids), substituted=substituted)


def detokenize(tokens):
    return "".join(SYMBOLS[i] for i in tokens.ids)


@dataclass
class EncodedBatch:
    one_hot: np.ndarray  # [B, L, VOCAB_SIZE]
    token_ids: np.ndarray  # [B, L], PAD-filled
    mask: np.ndarray  # [B, L] bool, True at real positions
    lengths: np.ndarray  # [B] effective (possibly truncated) lengths
    truncated: np.ndarray  # [B] bool


def pad_batch(seqs, max_length=MAX_LENGTH, dtype=np.float32):
    """Right-truncate to ``max_length``, PAD-fill to the batch-local maximum."""
    if not seqs:
        raise ValueError("pad_batch needs at least one sequence")
    lengths = np.array([min(s.original_length, max_length) for s in seqs])
    L = int(lengths.max())
    B = len(seqs)
    ids = np.full((B, L), PAD_INDEX, dtype=np.int64)
    truncated = np.zeros(B, dtype=bool)
    for i, s in enumerate(seqs):
        n = lengths[i]
        ids[i, :n] = s.ids[:n]
        truncated[i] = s.original_length > max_length or s.truncated
    mask = ids != PAD_INDEX
    one_hot = np.zeros((B, L, VOCAB_SIZE), dtype=dtype)
    rows, cols = np.nonzero(mask)
    one_hot[rows, cols, ids[rows, cols]] = 1.0
    return EncodedBatch(
        one_hot=one_hot, token_ids=ids, mask=mask, lengths=lengths,
        truncated=truncated,
    )


def positional_encoding(length, d=64, dtype=np.float32):
    """Sinusoidal position table [length, d]; even columns sin, odd cos."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if d % 2 != 0:
        raise ValueError(f"positional encoding dimension must be even, got {d}")
    pos = np.arange(length)[:, None].astype(np.float64)
    i = np.arange(d // 2)[None, :].astype(np.float64)
    angle = pos / np.power(10000.0, 2.0 * i / d)
    table = np.zeros((length, d))
    table[:, 0::2] = np.sin(angle)
    table[:, 1::2] = np.cos(angle)
    return table.astype(dtype)
