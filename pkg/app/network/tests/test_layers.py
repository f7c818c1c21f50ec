"""
Tests for the feed-forward layers.
"""
import numpy as np

from django.test import SimpleTestCase

from core.exceptions import ParameterError, ShapeError
from core.numerics import Rng
from network.layers import (
    Conv1DParams,
    DenseParams,
    conv1d_backward,
    conv1d_forward,
    dense_backward,
    dense_forward,
    dropout_backward,
    dropout_forward,
    maxpool1d_backward,
    maxpool1d_forward,
)


EPSILON = 1e-5


def numeric_gradient(fn, array):
    """Central differences of scalar ``fn()`` w.r.t. ``array`` in place."""
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + EPSILON
        plus = fn()
        flat[i] = original - EPSILON
        minus = fn()
        flat[i] = original
        grad.reshape(-1)[i] = (plus - minus) / (2 * EPSILON)
    return grad


def assert_gradient_close(analytic, numeric):
    error = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))
    assert error.max() <= 1e-4, f'relative error {error.max():.2e}'


class Conv1DTests(SimpleTestCase):
    """Test the 1-D convolution layer."""

    def setUp(self):
        self.rng = Rng(3)

    def random_params(self, k, c_in, filters):
        return Conv1DParams(self.rng.normal(size=(k, c_in, filters)),
                            self.rng.normal(size=filters))

    def test_output_length(self):
        """Test a 57-step input with K=3 gives 55 steps."""
        out, _ = conv1d_forward(np.ones((2, 57, 1)),
                                self.random_params(3, 1, 64))

        self.assertEqual(out.shape, (2, 55, 64))

    def test_identity_kernel(self):
        """Test kernel [0, 1, 0] copies interior positions."""
        x = np.abs(self.rng.normal(size=(1, 9, 1)))
        params = Conv1DParams(np.array([0.0, 1.0, 0.0]).reshape(3, 1, 1),
                              np.zeros(1))

        out, _ = conv1d_forward(x, params)

        np.testing.assert_array_equal(out[0, :, 0], x[0, 1:-1, 0])

    def test_matches_sliding_window(self):
        """Test against a direct sliding-window dot product."""
        x = self.rng.normal(size=(1, 8, 1))
        params = self.random_params(3, 1, 2)

        out, _ = conv1d_forward(x, params, activation='identity')

        for t in range(6):
            for f in range(2):
                expected = np.dot(x[0, t:t + 3, 0], params.kernel[:, 0, f])
                self.assertAlmostEqual(
                    out[0, t, f], expected + params.bias[f], delta=1e-12
                )

    def test_too_short(self):
        """Test fewer timesteps than the kernel raises a shape error."""
        with self.assertRaises(ShapeError):
            conv1d_forward(np.ones((1, 2, 1)), self.random_params(3, 1, 1))

    def test_channel_mismatch(self):
        """Test a channel mismatch raises a shape error."""
        with self.assertRaises(ShapeError):
            conv1d_forward(np.ones((1, 6, 2)), self.random_params(3, 1, 1))

    def test_zero_upstream(self):
        """Test a zero upstream gradient gives zero gradients."""
        out, cache = conv1d_forward(self.rng.normal(size=(2, 7, 2)),
                                    self.random_params(3, 2, 3))
        grads, dx = conv1d_backward(np.zeros_like(out), cache)

        self.assertFalse(np.any(grads.kernel))
        self.assertFalse(np.any(grads.bias))
        self.assertFalse(np.any(dx))

    def test_backward_finite_differences(self):
        """Test every conv gradient against central differences."""
        x = self.rng.normal(size=(2, 7, 2))
        params = self.random_params(3, 2, 3)
        upstream = self.rng.normal(size=(2, 5, 3))

        def loss():
            out, _ = conv1d_forward(x, params, activation='tanh')
            return np.sum(out * upstream)

        _, cache = conv1d_forward(x, params, activation='tanh')
        grads, dx = conv1d_backward(upstream, cache)

        assert_gradient_close(grads.kernel,
                              numeric_gradient(loss, params.kernel))
        assert_gradient_close(grads.bias, numeric_gradient(loss, params.bias))
        assert_gradient_close(dx, numeric_gradient(loss, x))


class MaxPoolTests(SimpleTestCase):
    """Test max pooling."""

    def test_output_length(self):
        """Test 55 steps pooled by 2 give 27."""
        out, _ = maxpool1d_forward(np.zeros((1, 55, 64)), 2)

        self.assertEqual(out.shape, (1, 27, 64))

    def test_values(self):
        """Test [1, 3, 2, 0] pooled by 2 gives [3, 2]."""
        x = np.array([1.0, 3.0, 2.0, 0.0]).reshape(1, 4, 1)

        out, _ = maxpool1d_forward(x, 2)

        np.testing.assert_array_equal(out[0, :, 0], [3.0, 2.0])

    def test_zero_pool(self):
        """Test pool size 0 raises a parameter error."""
        with self.assertRaises(ParameterError):
            maxpool1d_forward(np.ones((1, 4, 1)), 0)

    def test_backward_routes_to_argmax(self):
        """Test the gradient reaches only the window maxima."""
        x = np.array([1.0, 3.0, 2.0, 0.0, 5.0]).reshape(1, 5, 1)
        _, cache = maxpool1d_forward(x, 2)

        dx = maxpool1d_backward(np.array([[[10.0], [20.0]]]), cache)

        np.testing.assert_array_equal(dx[0, :, 0], [0, 10, 20, 0, 0])

    def test_backward_finite_differences(self):
        """Test pooling gradients against central differences."""
        rng = Rng(5)
        x = rng.normal(size=(2, 9, 3))
        upstream = rng.normal(size=(2, 3, 3))

        def loss():
            return np.sum(maxpool1d_forward(x, 3)[0] * upstream)

        _, cache = maxpool1d_forward(x, 3)
        assert_gradient_close(maxpool1d_backward(upstream, cache),
                              numeric_gradient(loss, x))


class DenseTests(SimpleTestCase):
    """Test the dense layer."""

    def test_identity_weight(self):
        """Test W = I and b = 0 return the input."""
        x = np.array([1.0, -2.0, 3.0])

        out, _ = dense_forward(x, DenseParams(np.eye(3), np.zeros(3)))

        np.testing.assert_array_equal(out[0], x)

    def test_zero_weight(self):
        """Test W = 0 returns the bias."""
        bias = np.array([0.5, -1.5])

        out, _ = dense_forward(np.ones(4),
                               DenseParams(np.zeros((2, 4)), bias))

        np.testing.assert_array_equal(out[0], bias)

    def test_matches_matmul(self):
        """Test a random layer against matmul plus bias."""
        rng = Rng(8)
        params = DenseParams(rng.normal(size=(3, 5)), rng.normal(size=3))
        x = rng.normal(size=(4, 5))

        out, _ = dense_forward(x, params)

        np.testing.assert_allclose(out, x @ params.weight.T + params.bias,
                                   atol=1e-12)

    def test_width_mismatch(self):
        """Test a wrong input width raises a shape error."""
        with self.assertRaises(ShapeError):
            dense_forward(np.ones(3), DenseParams(np.ones((2, 4)),
                                                  np.zeros(2)))

    def test_backward_finite_differences(self):
        """Test dense gradients for each activation."""
        rng = Rng(9)
        x = rng.normal(size=(3, 4))
        params = DenseParams(rng.normal(size=(5, 4)), rng.normal(size=5))
        upstream = rng.normal(size=(3, 5))
        for act in ('relu', 'tanh', 'identity', 'softmax'):
            def loss():
                return np.sum(dense_forward(x, params, act)[0] * upstream)

            _, cache = dense_forward(x, params, act)
            grads, dx = dense_backward(upstream, cache)

            assert_gradient_close(grads.weight,
                                  numeric_gradient(loss, params.weight))
            assert_gradient_close(grads.bias,
                                  numeric_gradient(loss, params.bias))
            assert_gradient_close(dx, numeric_gradient(loss, x))


class DropoutTests(SimpleTestCase):
    """Test inverted dropout."""

    def test_rate_zero(self):
        """Test rate 0 leaves the input unchanged."""
        x = np.arange(6.0)

        out, mask = dropout_forward(x, 0.0, True, Rng(1))

        np.testing.assert_array_equal(out, x)
        self.assertIsNone(mask)

    def test_inference_identity(self):
        """Test inference mode is the identity and draws nothing."""
        x = np.arange(6.0)
        rng = Rng(1)
        state = rng.state

        out, _ = dropout_forward(x, 0.5, False, rng)

        np.testing.assert_array_equal(out, x)
        self.assertEqual(rng.state, state)

    def test_drop_fraction(self):
        """Test the zeroed fraction concentrates around the rate."""
        out, _ = dropout_forward(np.ones(100000), 0.2, True, Rng(4))

        self.assertAlmostEqual(np.mean(out == 0), 0.2, delta=0.01)
        np.testing.assert_allclose(out[out != 0], 1.25)

    def test_rate_one(self):
        """Test rate 1 raises a parameter error."""
        with self.assertRaises(ParameterError):
            dropout_forward(np.ones(3), 1.0, True, Rng(0))

    def test_backward_reuses_mask(self):
        """Test backward applies the forward mask and scale."""
        x = np.ones(1000)
        out, mask = dropout_forward(x, 0.3, True, Rng(2))

        np.testing.assert_array_equal(dropout_backward(np.ones(1000), mask),
                                      out)
