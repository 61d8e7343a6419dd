"""Vocabulary, tokenizer, batch padding, and positional-encoding contracts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from protbench.encoding import (
    CANONICAL,
    MAX_LENGTH,
    PAD_INDEX,
    SYMBOLS,
    VOCAB_SIZE,
    X_INDEX,
    SequenceParseError,
    detokenize,
    pad_batch,
    positional_encoding,
    tokenize,
)


class TestVocabulary:
    def test_layout(self):
        assert len(CANONICAL) == 20
        assert VOCAB_SIZE == 22
        assert X_INDEX == 20
        assert PAD_INDEX == 21
        assert len(set(SYMBOLS)) == VOCAB_SIZE

    def test_canonical_indices_are_alphabetical(self):
        assert CANONICAL == "".join(sorted(CANONICAL))


class TestTokenize:
    def test_round_trip_canonical(self):
        seq = "ACDEFGHIKLMNPQRSTVWY"
        toks = tokenize(seq)
        assert detokenize(toks) == seq
        assert not toks.substituted
        assert toks.original_length == 20

    def test_lowercase_accepted(self):
        assert tokenize("acd").ids == tokenize("ACD").ids

    def test_ambiguity_codes_map_to_unknown(self):
        for ch in "BZJUO":
            toks = tokenize(f"A{ch}C")
            assert toks.ids[1] == X_INDEX
            assert toks.substituted

    def test_empty_raises(self):
        with pytest.raises(SequenceParseError, match="empty"):
            tokenize("")

    def test_non_alphabetic_raises_with_position(self):
        with pytest.raises(SequenceParseError, match="position 2"):
            tokenize("AC1D")


class TestPadBatch:
    def test_shapes_and_mask(self):
        batch = pad_batch([tokenize("ACD"), tokenize("ACDEFG")])
        assert batch.one_hot.shape == (2, 6, VOCAB_SIZE)
        assert batch.token_ids.shape == (2, 6)
        np.testing.assert_array_equal(batch.lengths, [3, 6])
        np.testing.assert_array_equal(
            batch.mask, [[1, 1, 1, 0, 0, 0], [1, 1, 1, 1, 1, 1]]
        )
        assert batch.token_ids[0, 3] == PAD_INDEX

    def test_one_hot_rows(self):
        batch = pad_batch([tokenize("AC")])
        np.testing.assert_array_equal(batch.one_hot[0].sum(axis=-1), [1, 1])
        assert batch.one_hot[0, 0, 0] == 1.0  # A -> index 0
        assert batch.one_hot[0, 1, 1] == 1.0  # C -> index 1

    def test_pad_positions_all_zero_one_hot(self):
        batch = pad_batch([tokenize("A"), tokenize("ACD")])
        np.testing.assert_array_equal(batch.one_hot[0, 1:], 0.0)

    def test_truncation_flag(self):
        long_seq = tokenize("A" * 2000)
        batch = pad_batch([long_seq])
        assert batch.truncated[0]
        assert batch.lengths[0] == MAX_LENGTH
        assert batch.one_hot.shape[1] == MAX_LENGTH

    def test_empty_batch_raises(self):
        with pytest.raises(ValueError):
            pad_batch([])


class TestPositionalEncoding:
    def test_first_row_is_zero_sin_one_cos(self):
        table = positional_encoding(5, 8)
        np.testing.assert_allclose(table[0, 0::2], 0.0, atol=1e-7)
        np.testing.assert_allclose(table[0, 1::2], 1.0, atol=1e-7)

    def test_values_match_formula(self):
        table = positional_encoding(10, 6, dtype=np.float64)
        for pos in range(10):
            for i in range(3):
                angle = pos / 10000 ** (2 * i / 6)
                assert table[pos, 2 * i] == pytest.approx(np.sin(angle))
                assert table[pos, 2 * i + 1] == pytest.approx(np.cos(angle))

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError, match="even"):
            positional_encoding(4, 7)

    def test_bounded(self):
        table = positional_encoding(100, 64)
        assert np.abs(table).max() <= 1.0 + 1e-6


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet=CANONICAL, min_size=1, max_size=64))
def test_tokenize_round_trip_property(seq):
    toks = tokenize(seq)
    assert detokenize(toks) == seq
    assert not toks.substituted
    assert all(0 <= i < X_INDEX for i in toks.ids)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.text(alphabet=CANONICAL + "BZX", min_size=1, max_size=40),
        min_size=1,
        max_size=6,
    )
)
def test_pad_batch_property(seqs):
    batch = pad_batch([tokenize(s) for s in seqs])
    assert batch.one_hot.shape[1] == max(len(s) for s in seqs)
    np.testing.assert_array_equal(batch.mask.sum(axis=1), batch.lengths)
    # one-hot sums: exactly one symbol per real position, zero at padding
    np.testing.assert_array_equal(
        batch.one_hot.sum(axis=-1), batch.mask.astype(float)
    )
