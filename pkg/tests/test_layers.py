"""Layer, loss, and optimizer contracts, with hand-computed references."""

import numpy as np
import pytest

from protbench.autodiff import (
    Adam,
    BatchNorm,
    BiGRU,
    Context,
    Conv1d,
    Dense,
    GRUCell,
    GRULayer,
    LayerNorm,
    MLP,
    MultiHeadSelfAttention,
    Module,
    NonFiniteGradientError,
    Parameter,
    ShapeError,
    Tensor,
    finite_difference_check,
    tensor,
)
from protbench.autodiff.losses import (
    DegenerateLossError,
    bce_with_logits,
    l1_loss,
    masked_residue_bce,
    mse_loss,
    softmax_cross_entropy,
)

RNG = np.random.default_rng(7)


def init64(module, seed=0):
    module.init_parameters(seed, np.float64)
    return module


def check_grads(module, fn, tol=1e-5):
    err, worst = finite_difference_check(
        fn, dict(module.named_parameters()), rng=np.random.default_rng(3)
    )
    assert err < tol, f"worst rel err {err:.3e} at {worst}"


class TestDense:
    def test_forward_matches_numpy(self):
        layer = init64(Dense(3, 2))
        x = RNG.standard_normal((4, 3))
        out = layer(tensor(x))
        np.testing.assert_allclose(
            out.data, x @ layer.w.data + layer.b.data, atol=1e-12
        )

    def test_shape_error_names_both_shapes(self):
        layer = init64(Dense(3, 2))
        with pytest.raises(ShapeError, match=r"3"):
            layer(tensor(np.ones((4, 5))))

    def test_no_bias_option(self):
        layer = init64(Dense(3, 2, bias=False))
        assert layer.b is None
        assert [n for n, _ in layer.named_parameters()] == ["w"]

    def test_gradients(self):
        layer = init64(Dense(4, 3))
        x = RNG.standard_normal((5, 4))
        target = RNG.standard_normal((5, 3))
        check_grads(layer, lambda: mse_loss(layer(tensor(x)), target), 1e-6)


class TestConv1d:
    def test_valid_length_and_gradients(self):
        layer = init64(Conv1d(3, 5, 4))
        x = RNG.standard_normal((9, 3))
        out = layer(tensor(x), padding="valid")
        assert out.shape == (6, 5)
        target = RNG.standard_normal((6, 5))
        check_grads(
            layer, lambda: mse_loss(layer(tensor(x), padding="valid"), target),
            1e-6,
        )

    def test_same_padding_preserves_length(self):
        for k in (3, 4, 8):
            layer = init64(Conv1d(2, 3, k))
            out = layer(tensor(RNG.standard_normal((10, 2))), padding="same")
            assert out.shape == (10, 3)


class TestGRU:
    def test_single_step_hand_computation(self):
        cell = GRUCell(1, 1)
        # all weights zero: z = r = sigmoid(0) = 0.5, cand = tanh(0) = 0,
        # h1 = 0.5*h0; then with wh set, cand = tanh(x*wh)
        for _, p in cell.named_parameters():
            p.data = np.zeros(p.shape)
        cell.wh.data = np.array([[1.0]])
        h1 = cell(tensor(np.array([[0.3]])), tensor(np.array([[0.0]])))
        # z = 0.5, h0 = 0 -> h1 = 0.5 * tanh(0.3)
        np.testing.assert_allclose(h1.data, [[0.5 * np.tanh(0.3)]], atol=1e-12)

    def test_step_matches_numpy_reference(self):
        cell = init64(GRUCell(3, 2), seed=1)
        x = RNG.standard_normal((1, 3))
        h = RNG.standard_normal((1, 2))
        out = cell(tensor(x), tensor(h)).data

        def sig(v):
            return 1.0 / (1.0 + np.exp(-v))

        z = sig(x @ cell.wz.data + h @ cell.uz.data + cell.bz.data)
        r = sig(x @ cell.wr.data + h @ cell.ur.data + cell.br.data)
        cand = np.tanh(x @ cell.wh.data + (r * h) @ cell.uh.data + cell.bh.data)
        np.testing.assert_allclose(out, (1 - z) * h + z * cand, atol=1e-12)

    def test_layer_gradients(self):
        layer = init64(GRULayer(3, 4), seed=2)
        x = RNG.standard_normal((5, 3))
        target = RNG.standard_normal((5, 4))
        check_grads(
            layer, lambda: mse_loss(layer(tensor(x))[0], target), 1e-5
        )

    def test_empty_sequence_raises(self):
        layer = init64(GRULayer(3, 4))
        with pytest.raises(ValueError, match="empty"):
            layer(tensor(np.zeros((0, 3))))

    def test_bigru_output_shape_and_direction(self):
        layer = init64(BiGRU(3, 4), seed=3)
        x = RNG.standard_normal((6, 3))
        out, last = layer(tensor(x))
        assert out.shape == (6, 8)
        assert last.shape == (1, 8)
        # forward last state is the t=L-1 output; backward last is t=0
        np.testing.assert_allclose(out.data[-1, :4], last.data[0, :4])
        np.testing.assert_allclose(out.data[0, 4:], last.data[0, 4:])


class TestNorms:
    def test_layernorm_statistics(self):
        ln = init64(LayerNorm(8))
        x = RNG.standard_normal((5, 8)) * 3 + 2
        out = ln(tensor(x)).data
        np.testing.assert_allclose(out.mean(axis=-1), 0.0, atol=1e-7)
        np.testing.assert_allclose(out.std(axis=-1), 1.0, atol=1e-3)

    def test_layernorm_gradients(self):
        ln = init64(LayerNorm(6))
        x = RNG.standard_normal((4, 6))
        target = RNG.standard_normal((4, 6))
        check_grads(ln, lambda: mse_loss(ln(tensor(x)), target), 1e-5)

    def test_batchnorm_train_statistics_and_running_update(self):
        bn = init64(BatchNorm(4))
        x = RNG.standard_normal((16, 4)) * 2 + 5
        ctx = Context(train=True)
        out = bn(tensor(x), ctx).data
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-7)
        expected_mean = 0.1 * x.mean(axis=0)
        np.testing.assert_allclose(bn.running_mean, expected_mean, atol=1e-12)

    def test_batchnorm_eval_uses_running_stats(self):
        bn = init64(BatchNorm(4))
        bn.running_mean = np.array([1.0, 2.0, 3.0, 4.0])
        bn.running_var = np.full(4, 4.0)
        x = np.tile([[1.0, 2.0, 3.0, 4.0]], (3, 1))
        out = bn(tensor(x), Context(train=False)).data
        np.testing.assert_allclose(out, 0.0, atol=1e-3)

    def test_batchnorm_train_gradients(self):
        bn = init64(BatchNorm(5))
        x = RNG.standard_normal((8, 5))
        target = RNG.standard_normal((8, 5))
        ctx = Context(train=True)
        check_grads(bn, lambda: mse_loss(bn(tensor(x), ctx), target), 1e-5)


class TestAttention:
    def test_rows_sum_to_one_over_unmasked_keys(self):
        attn = init64(MultiHeadSelfAttention(8, 2))
        x = tensor(RNG.standard_normal((6, 8)))
        mask = np.array([True, True, True, True, False, False])
        probs = []

        # reconstruct attention probabilities by probing value identity:
        # instead, check the output is unaffected by masked key values
        x2 = x.data.copy()
        x2[4:] += 100.0
        out1 = attn(x, mask=mask).data[:4]
        out2 = attn(tensor(x2), mask=mask).data[:4]
        # masked keys may differ as queries, but rows 0..3 only attend to 0..3
        np.testing.assert_allclose(out1, out2, atol=1e-8)

    def test_gradients(self):
        attn = init64(MultiHeadSelfAttention(8, 2), seed=5)
        x = RNG.standard_normal((6, 8))
        target = RNG.standard_normal((6, 8))
        check_grads(attn, lambda: mse_loss(attn(tensor(x)), target), 1e-5)

    def test_additive_bias_shifts_attention(self):
        attn = init64(MultiHeadSelfAttention(8, 2), seed=5)
        x = tensor(RNG.standard_normal((4, 8)))
        bias = np.zeros((2, 4, 4))
        out0 = attn(x, bias=tensor(bias)).data
        bias_big = bias.copy()
        bias_big[:, :, 0] = 50.0  # force all attention onto key 0
        out1 = attn(x, bias=tensor(bias_big)).data
        assert not np.allclose(out0, out1)


class TestMLP:
    def test_output_shape_and_dropout_determinism(self):
        mlp = init64(MLP(6, (16, 16), 3, norm="layer", dropout_rate=0.5))
        x = tensor(RNG.standard_normal((4, 6)))
        out_eval_1 = mlp(x, Context(train=False)).data
        out_eval_2 = mlp(x, Context(train=False)).data
        np.testing.assert_array_equal(out_eval_1, out_eval_2)
        assert out_eval_1.shape == (4, 3)
        out_train = mlp(x, Context(train=True, rng=np.random.default_rng(1)))
        assert not np.allclose(out_train.data, out_eval_1)


class TestParameterInit:
    def test_deterministic_and_path_keyed(self):
        class Net(Module):
            def __init__(self):
                self.a = Dense(4, 4)
                self.b = Dense(4, 4)

        n1, n2 = Net(), Net()
        n1.init_parameters(0, np.float64)
        n2.init_parameters(0, np.float64)
        np.testing.assert_array_equal(n1.a.w.data, n2.a.w.data)
        # same shape, different path -> different draw
        assert not np.allclose(n1.a.w.data, n1.b.w.data)
        n3 = Net()
        n3.init_parameters(1, np.float64)
        assert not np.allclose(n1.a.w.data, n3.a.w.data)

    def test_xavier_bound(self):
        p = Parameter((50, 30))
        p.materialize(np.random.default_rng(0), np.float64)
        bound = np.sqrt(6.0 / (50 + 30))
        assert np.abs(p.data).max() <= bound
        assert np.abs(p.data).max() > 0.8 * bound  # draws fill the range


class TestLosses:
    def test_mse_l1_hand_values(self):
        pred = tensor(np.array([[1.0], [-1.0]]))
        target = np.array([[0.0], [0.0]])
        assert mse_loss(pred, target).item() == pytest.approx(1.0)
        assert l1_loss(pred, target).item() == pytest.approx(1.0)

    def test_losses_non_negative(self):
        for _ in range(10):
            pred = tensor(RNG.standard_normal((6, 1)))
            target = RNG.standard_normal((6, 1))
            assert mse_loss(pred, target).item() >= 0
            assert l1_loss(pred, target).item() >= 0
            labels = (RNG.random((6, 1)) > 0.5).astype(float)
            assert bce_with_logits(pred, labels).item() >= 0

    def test_bce_matches_reference(self):
        logits = RNG.standard_normal((8, 1)) * 3
        labels = (RNG.random((8, 1)) > 0.5).astype(float)
        got = bce_with_logits(tensor(logits), labels).item()
        p = 1.0 / (1.0 + np.exp(-logits))
        ref = -(labels * np.log(p) + (1 - labels) * np.log(1 - p)).mean()
        assert got == pytest.approx(ref, rel=1e-9)

    def test_bce_stable_at_extreme_logits(self):
        logits = tensor(np.array([[1000.0], [-1000.0]]))
        labels = np.array([[1.0], [0.0]])
        assert bce_with_logits(logits, labels).item() == pytest.approx(0.0)

    def test_bce_gradient_at_zero_logit(self):
        t = tensor(np.array([[0.0]]), requires_grad=True)
        loss = bce_with_logits(t, np.array([[1.0]]))
        loss.backward()
        np.testing.assert_allclose(t.grad, [[-0.5]])  # sigmoid(0) - 1

    def test_softmax_ce_matches_reference(self):
        logits = RNG.standard_normal((5, 4)) * 2
        labels = np.array([0, 3, 1, 1, 2])
        got = softmax_cross_entropy(tensor(logits), labels).item()
        shifted = logits - logits.max(axis=1, keepdims=True)
        logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        ref = -logp[np.arange(5), labels].mean()
        assert got == pytest.approx(ref, rel=1e-9)

    def test_softmax_ce_label_out_of_range(self):
        with pytest.raises(ValueError):
            softmax_cross_entropy(tensor(np.zeros((2, 3))), np.array([0, 3]))

    def test_masked_bce_ignores_masked_positions(self):
        logits = tensor(np.array([0.5, -0.2, 100.0]))
        labels = np.array([1.0, 0.0, 0.0])
        mask = np.array([True, True, False])
        full = masked_residue_bce(logits, labels, mask).item()
        ref = masked_residue_bce(
            tensor(np.array([0.5, -0.2])), labels[:2], mask[:2]
        ).item()
        assert full == pytest.approx(ref, rel=1e-12)

    def test_masked_bce_empty_mask_raises(self):
        with pytest.raises(DegenerateLossError):
            masked_residue_bce(
                tensor(np.zeros(3)), np.zeros(3), np.zeros(3, bool)
            )

    def test_loss_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse_loss(tensor(np.zeros((2, 1))), np.zeros((3, 1)))


class TestAdam:
    def test_two_step_hand_trace(self):
        p = Parameter((1,), init="zeros")
        p.materialize(np.random.default_rng(0), np.float64)
        p.data = np.array([1.0])
        opt = Adam([("p", p)], lr=0.1)

        m = v = 0.0
        theta = 1.0
        for t, g in enumerate([0.5, -0.25], start=1):
            p.grad = np.array([g])
            opt.step()
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            m_hat = m / (1 - 0.9**t)
            v_hat = v / (1 - 0.999**t)
            theta -= 0.1 * m_hat / (np.sqrt(v_hat) + 1e-8)
            np.testing.assert_allclose(p.data, [theta], rtol=1e-12)

    def test_first_step_size_is_lr(self):
        # bias correction makes the first update exactly lr * sign(g)
        p = Parameter((1,), init="zeros")
        p.materialize(np.random.default_rng(0), np.float64)
        p.data = np.array([0.0])
        opt = Adam([("p", p)], lr=0.01)
        p.grad = np.array([123.456])
        opt.step()
        np.testing.assert_allclose(p.data, [-0.01], rtol=1e-6)

    def test_grads_cleared_after_step(self):
        p = Parameter((2,), init="zeros")
        p.materialize(np.random.default_rng(0), np.float64)
        opt = Adam([("p", p)], lr=0.1)
        p.grad = np.ones(2)
        opt.step()
        assert p.grad is None

    def test_non_finite_gradient_names_parameter(self):
        p = Parameter((2,), init="zeros")
        p.materialize(np.random.default_rng(0), np.float64)
        opt = Adam([("layer.w", p)], lr=0.1)
        p.grad = np.array([1.0, np.nan])
        with pytest.raises(NonFiniteGradientError, match="layer.w"):
            opt.step()

    def test_invalid_lr(self):
        with pytest.raises(ValueError):
            Adam([], lr=0.0)

    def test_descends_quadratic(self):
        p = Parameter((3,), init="zeros")
        p.materialize(np.random.default_rng(0), np.float64)
        p.data = np.array([5.0, -3.0, 2.0])
        opt = Adam([("p", p)], lr=0.1)
        for _ in range(500):
            t = Tensor(p.data, parents=(p,),
                       backward=None)
            p.grad = 2 * p.data
            opt.step()
        np.testing.assert_allclose(p.data, 0.0, atol=1e-3)
