"""
Tests for the assembled classifier.
"""
import math
from dataclasses import replace

import numpy as np

from django.test import SimpleTestCase

from core.exceptions import DataError, ParameterError, ShapeError
from core.numerics import Rng
from network.attention import attention_forward
from network.gradcheck import tiny_config
from network.layers import conv1d_forward, dense_forward, maxpool1d_forward
from network.model import (
    ModelConfig,
    argmax_classes,
    backward,
    build,
    forward,
    predict,
    sparse_categorical_crossentropy,
)
from network.recurrent import bilstm_forward


class BuildTests(SimpleTestCase):
    """Test model construction."""

    def test_default_shapes(self):
        """Test the default layer chain 57 -> 55 -> 27 with 64 channels."""
        config = ModelConfig()
        params = build(config)

        self.assertEqual(config.conv_steps, 55)
        self.assertEqual(config.pooled_steps, 27)
        self.assertEqual(config.state_width, 64)
        self.assertEqual(params.conv.kernel.shape, (3, 1, 64))
        self.assertEqual(params.bilstm1.forward.w_input.shape, (128, 64))
        self.assertEqual(params.attn.w1.shape, (64, 64))
        self.assertEqual(params.dense_hidden.weight.shape,
                         (250, 55 * 64 + 64))
        self.assertEqual(params.dense_out.weight.shape, (5, 250))

    def test_forward_intermediate_shapes(self):
        """Test the cached intermediate shapes of a default forward."""
        params = build(ModelConfig())

        _, cache = forward(params, np.zeros((2, 57)))

        self.assertEqual(cache.conv_output_shape, (2, 55, 64))
        self.assertEqual(cache.pool.argmax.shape, (2, 27, 64))
        self.assertEqual(cache.bilstm2_output_shape, (2, 1, 64))
        self.assertEqual(cache.attention_weights.shape, (2, 1, 27))

    def test_same_seed_identical(self):
        """Test the same seed gives bit-identical parameters."""
        first = build(tiny_config(seed=5)).named_arrays()
        second = build(tiny_config(seed=5)).named_arrays()

        for (name, a), (_, b) in zip(first, second):
            np.testing.assert_array_equal(a, b, err_msg=name)

    def test_initialization_policy(self):
        """Test zero biases and a forget-gate bias of one."""
        params = build(tiny_config())
        units = 2
        bias = params.bilstm1.forward.bias

        np.testing.assert_array_equal(bias[units:2 * units], 1.0)
        self.assertFalse(np.any(bias[:units]))
        self.assertFalse(np.any(params.dense_hidden.bias))

    def test_two_classes(self):
        """Test num_classes sets the output width."""
        params = build(ModelConfig(num_classes=2))

        self.assertEqual(params.dense_out.weight.shape[0], 2)

    def test_inconsistent_config(self):
        """Test invalid configurations raise parameter errors."""
        for bad in (dict(kernel_size=60), dict(dropout_rate=1.0),
                    dict(conv_filters=0), dict(attention_mode='mean'),
                    dict(input_features=4, kernel_size=3, pool_size=3)):
            with self.assertRaises(ParameterError, msg=bad):
                build(ModelConfig(**bad))

    def test_unknown_config_key(self):
        """Test from_dict rejects unknown keys."""
        with self.assertRaises(ParameterError):
            ModelConfig.from_dict({'layers': 3})


class ForwardTests(SimpleTestCase):
    """Test the forward pass."""

    def setUp(self):
        self.params = build(tiny_config())
        self.batch = Rng(1).normal(size=(4, 6))

    def test_rows_sum_to_one(self):
        """Test probability rows sum to one in both modes."""
        for training in (False, True):
            probs, _ = forward(self.params, self.batch, training=training,
                               rng=Rng(2))

            np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_identical_rows(self):
        """Test identical inputs give identical outputs at inference."""
        batch = np.vstack([self.batch[0], self.batch[0]])

        probs, _ = forward(self.params, batch)

        np.testing.assert_array_equal(probs[0], probs[1])

    def test_matches_composed_modules(self):
        """Test a single sample against composing the layers by hand."""
        params = self.params
        x = self.batch[:1]

        conv, _ = conv1d_forward(x[:, :, np.newaxis], params.conv)
        pooled, _ = maxpool1d_forward(conv, 2)
        states, _ = bilstm_forward(pooled, params.bilstm1)
        attended, _ = attention_forward(states, params.attn, 'final')
        higher, _ = bilstm_forward(attended.contexts, params.bilstm2)
        combined = np.concatenate([conv.reshape(1, -1),
                                   higher.reshape(1, -1)], axis=1)
        hidden, _ = dense_forward(combined, params.dense_hidden, 'relu')
        expected, _ = dense_forward(hidden, params.dense_out, 'softmax')

        probs, _ = forward(params, x)

        np.testing.assert_allclose(probs, expected, atol=1e-12)

    def test_width_mismatch(self):
        """Test a wrong feature width raises a shape error."""
        with self.assertRaises(ShapeError):
            forward(self.params, np.zeros((2, 7)))

    def test_inference_does_not_consume_rng(self):
        """Test inference mode draws nothing from the generator."""
        rng = Rng(3)
        state = rng.state

        forward(self.params, self.batch, training=False, rng=rng)

        self.assertEqual(rng.state, state)


class LossTests(SimpleTestCase):
    """Test sparse categorical cross-entropy."""

    def test_certain_prediction(self):
        """Test p[label] = 1 gives zero loss."""
        loss, _ = sparse_categorical_crossentropy(np.eye(3), [0, 1, 2])

        self.assertEqual(loss, 0.0)

    def test_uniform_prediction(self):
        """Test a uniform prediction over five classes costs ln 5."""
        loss, _ = sparse_categorical_crossentropy(np.full((2, 5), 0.2),
                                                  [1, 4])

        self.assertAlmostEqual(loss, math.log(5), places=12)

    def test_matches_per_sample(self):
        """Test against a per-sample scalar computation."""
        rng = Rng(4)
        probs = rng.uniform(0.1, 1.0, size=(6, 4))
        probs /= probs.sum(axis=1, keepdims=True)
        labels = np.array([0, 3, 2, 1, 1, 0])

        loss, d_logits = sparse_categorical_crossentropy(probs, labels)

        expected = -sum(math.log(probs[i, labels[i]]) for i in range(6)) / 6
        self.assertAlmostEqual(loss, expected, delta=1e-12)
        onehot = np.eye(4)[labels]
        np.testing.assert_allclose(d_logits, (probs - onehot) / 6,
                                   atol=1e-15)

    def test_clamped(self):
        """Test a zero probability is clamped instead of giving inf."""
        loss, _ = sparse_categorical_crossentropy(np.array([[1.0, 0.0]]),
                                                  [1])

        self.assertAlmostEqual(loss, -math.log(1e-12))

    def test_label_out_of_range(self):
        """Test a bad label raises a data error naming the row."""
        with self.assertRaisesRegex(DataError, 'row 1'):
            sparse_categorical_crossentropy(np.full((2, 3), 1 / 3), [0, 3])


class BackwardTests(SimpleTestCase):
    """Test the whole-model backward pass."""

    def setUp(self):
        self.params = build(tiny_config())
        self.batch = Rng(1).normal(size=(3, 6))

    def test_zero_upstream(self):
        """Test a zero upstream gradient gives all-zero gradients."""
        probs, cache = forward(self.params, self.batch)

        grads = backward(cache, np.zeros_like(probs))

        for name, array in grads.named_arrays():
            self.assertFalse(np.any(array), name)

    def test_gradient_structure(self):
        """Test every gradient has the shape of its parameter."""
        probs, cache = forward(self.params, self.batch, training=True,
                               rng=Rng(2))
        _, d_logits = sparse_categorical_crossentropy(probs, [0, 1, 2])

        grads = backward(cache, d_logits)

        for (name, p), (_, g) in zip(self.params.named_arrays(),
                                     grads.named_arrays()):
            self.assertEqual(p.shape, g.shape, name)

    def test_dropped_units_get_no_gradient(self):
        """Test dense units dropped this step receive zero gradient."""
        config = replace(tiny_config(), dropout_rate=0.5, dense_units=32)
        params = build(config)
        probs, cache = forward(params, self.batch[:1], training=True,
                               rng=Rng(7))
        _, d_logits = sparse_categorical_crossentropy(probs, [0])

        grads = backward(cache, d_logits)

        dropped = cache.dropout2[0] == 0
        self.assertTrue(dropped.any())
        self.assertFalse(np.any(grads.dense_out.weight[:, dropped]))

    def test_upstream_mismatch(self):
        """Test an upstream of the wrong shape is refused."""
        _, cache = forward(self.params, self.batch)

        with self.assertRaises(ShapeError):
            backward(cache, np.zeros((3, 5)))


class PredictTests(SimpleTestCase):
    """Test inference-mode prediction."""

    def test_argmax(self):
        """Test the most probable class is chosen."""
        self.assertEqual(argmax_classes([0.1, 0.2, 0.4, 0.2, 0.1])[0], 2)

    def test_tie_goes_low(self):
        """Test an exact tie resolves to the lower class id."""
        self.assertEqual(argmax_classes([0.1, 0.35, 0.1, 0.35, 0.1])[0], 1)

    def test_single_sample(self):
        """Test a single vector returns a class id and its vector."""
        params = build(tiny_config())
        x = Rng(2).normal(size=6)

        label, probs = predict(params, x)
        expected, _ = forward(params, x[np.newaxis])

        self.assertIsInstance(label, int)
        self.assertEqual(label, int(np.argmax(expected[0])))
        np.testing.assert_array_equal(probs, expected[0])

    def test_empty_batch(self):
        """Test an empty batch returns empty arrays."""
        classes, probs = predict(build(tiny_config()), np.zeros((0, 6)))

        self.assertEqual(classes.shape, (0,))
        self.assertEqual(probs.shape, (0, 3))

    def test_width_mismatch(self):
        """Test a wrong width raises a shape error."""
        with self.assertRaises(ShapeError):
            predict(build(tiny_config()), np.zeros(5))
