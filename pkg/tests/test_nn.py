import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gcnsi.nn import (
    AdamConfig,
    Parameter,
    adam_step,
    finite_difference_check,
    glorot_init,
    l2_penalty,
    masked_cross_entropy,
    relu,
    softmax_rows,
)


class TestGlorot:
    def test_bound_single_row(self):
        w = glorot_init(1, 5, seed=0)  # s = sqrt(6/6) = 1
        assert np.all(np.abs(w) <= 1.0)

    def test_empirical_mean_near_zero(self):
        # 3x3 draws have s = 1, variance s^2/3; mean of N samples within 3 sigma.
        rng = np.random.default_rng(42)
        draws = np.concatenate([glorot_init(3, 3, rng).ravel() for _ in range(1200)])
        sigma = 1.0 / np.sqrt(3 * draws.size)
        assert abs(draws.mean()) < 3 * sigma

    def test_deterministic_per_seed(self):
        npt.assert_array_equal(glorot_init(4, 6, seed=9), glorot_init(4, 6, seed=9))

    def test_rejects_empty_shape(self):
        with pytest.raises(ValueError):
            glorot_init(0, 3, seed=0)


class TestRelu:
    def test_mixed(self):
        npt.assert_array_equal(relu(np.array([[-1.0, 0.0, 2.0]])), [[0.0, 0.0, 2.0]])

    def test_all_negative(self):
        npt.assert_array_equal(relu(-np.ones((2, 2))), np.zeros((2, 2)))

    def test_identity_on_nonnegative(self):
        x = np.arange(6, dtype=float).reshape(2, 3)
        npt.assert_array_equal(relu(x), x)


class TestSoftmax:
    def test_symmetric_row(self):
        npt.assert_allclose(softmax_rows(np.array([[0.0, 0.0]])), [[0.5, 0.5]], atol=1e-15)

    def test_large_values_no_overflow(self):
        z = softmax_rows(np.array([[1000.0, 0.0]]))
        assert np.isfinite(z).all()
        assert z[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_log_ratio(self):
        z = softmax_rows(np.array([[np.log(1.0), np.log(3.0)]]))
        npt.assert_allclose(z, [[0.25, 0.75]], atol=1e-15)

    @settings(max_examples=80, deadline=None)
    @given(
        hnp.arrays(
            np.float64,
            hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
            elements=st.floats(-50, 50),
        ),
        st.floats(-30, 30),
    )
    def test_rows_sum_to_one_and_shift_invariance(self, x, c):
        z = softmax_rows(x)
        npt.assert_allclose(z.sum(axis=1), np.ones(x.shape[0]), atol=1e-12)
        assert (z > 0).all()
        shifted = softmax_rows(x + c)
        npt.assert_allclose(shifted, z, atol=1e-12)


class TestMaskedCrossEntropy:
    def test_single_term(self):
        probs = np.array([[0.5, 0.5, 0.0], [0.1, 0.2, 0.7]])
        loss, _ = masked_cross_entropy(probs, np.array([0, 2]), np.array([1]))
        assert loss == pytest.approx(-np.log(0.7), abs=1e-12)

    def test_perfect_prediction_zero_loss(self):
        probs = np.array([[1.0, 0.0], [0.0, 1.0]])
        loss, grad = masked_cross_entropy(probs, np.array([0, 1]), np.array([0, 1]))
        assert loss == 0.0
        npt.assert_array_equal(grad, np.zeros((2, 2)))

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            masked_cross_entropy(np.ones((2, 2)) / 2, np.array([0, 0]), np.array([], dtype=int))

    def test_target_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            masked_cross_entropy(np.ones((2, 2)) / 2, np.array([0, 2]), np.array([1]))

    def test_rows_outside_mask_have_zero_grad(self):
        rng = np.random.default_rng(0)
        probs = softmax_rows(rng.standard_normal((5, 3)))
        _, grad = masked_cross_entropy(probs, np.array([0, 1, 2, 0, 1]), np.array([1, 3]))
        npt.assert_array_equal(grad[[0, 2, 4]], np.zeros((3, 3)))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        logits = rng.standard_normal((6, 3))
        targets = rng.integers(0, 3, size=6)
        s = np.array([0, 2, 3, 5])

        def loss_of(lg):
            return masked_cross_entropy(softmax_rows(lg), targets, s)[0]

        _, grad = masked_cross_entropy(softmax_rows(logits), targets, s)
        assert finite_difference_check(loss_of, logits, grad) <= 1e-6


class TestAdam:
    def test_zero_grad_leaves_value(self):
        p = Parameter.of(np.ones((2, 2)))
        adam_step(p, AdamConfig(0.1))
        npt.assert_array_equal(p.value, np.ones((2, 2)))
        assert p.step_count == 1

    def test_lr_zero_is_identity(self):
        p = Parameter.of(np.ones((2, 2)))
        p.grad[...] = 3.0
        adam_step(p, AdamConfig(0.0))
        npt.assert_array_equal(p.value, np.ones((2, 2)))

    def test_first_step_is_normalized_sign(self):
        g = np.array([[0.3, -2.0]])
        p = Parameter.of(np.zeros((1, 2)))
        p.grad[...] = g
        cfg = AdamConfig(0.05)
        adam_step(p, cfg)
        expected = -cfg.learning_rate * g / (np.abs(g) + cfg.epsilon)
        npt.assert_allclose(p.value, expected, atol=1e-15)

    def test_constant_grad_step_approaches_lr(self):
        p = Parameter.of(np.zeros((1, 1)))
        cfg = AdamConfig(0.01)
        prev = p.value.copy()
        for _ in range(500):
            p.grad[...] = 0.7
            prev = p.value.copy()
            adam_step(p, cfg)
        assert abs(abs(float(p.value[0, 0] - prev[0, 0])) - cfg.learning_rate) < 1e-5

    def test_rejects_bad_betas(self):
        with pytest.raises(ValueError):
            AdamConfig(0.1, beta1=1.0)


class TestL2Penalty:
    def test_zero_matrix(self):
        loss, grad = l2_penalty(np.zeros((3, 3)), 0.7)
        assert loss == 0.0
        npt.assert_array_equal(grad, np.zeros((3, 3)))

    def test_hand_value(self):
        loss, grad = l2_penalty(np.array([[2.0]]), 0.5)
        assert loss == pytest.approx(1.0, abs=0)
        npt.assert_array_equal(grad, [[1.0]])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        w = rng.standard_normal((3, 4))
        loss, grad = l2_penalty(w, 0.3)
        err = finite_difference_check(lambda v: l2_penalty(v, 0.3)[0], w, grad)
        assert err <= 1e-8


class TestFiniteDifferenceCheck:
    def test_quadratic(self):
        x = np.array([[1.0, -2.0], [0.5, 3.0]])
        err = finite_difference_check(lambda v: float(np.sum(v * v)), x, 2 * x)
        assert err <= 1e-8

    def test_detects_wrong_gradient(self):
        x = np.ones((2, 2))
        err = finite_difference_check(lambda v: float(np.sum(v * v)), x, 4 * x)
        assert err == pytest.approx(0.5, abs=1e-6)

    def test_small_softmax_head(self):
        # masked CE over a 4x3 linear head in the weight matrix.
        rng = np.random.default_rng(2)
        x = rng.standard_normal((4, 2))
        w = rng.standard_normal((2, 3))
        targets = np.array([0, 2, 1, 1])
        s = np.arange(4)

        def loss_of(wv):
            return masked_cross_entropy(softmax_rows(x @ wv), targets, s)[0]

        _, g_logits = masked_cross_entropy(softmax_rows(x @ w), targets, s)
        grad_w = x.T @ g_logits
        assert finite_difference_check(loss_of, w, grad_w) <= 1e-6

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            finite_difference_check(lambda v: float("nan"), np.ones((1, 1)), np.ones((1, 1)))
