"""
Tests for the whole-model gradient check.
"""
from django.test import SimpleTestCase, tag

from network.gradcheck import (
    TOLERANCE,
    GradientCheckReport,
    gradient_check,
    render_gradient_check,
    tiny_batch,
    tiny_config,
)


@tag('slow')
class GradientCheckTests(SimpleTestCase):
    """Test analytic gradients against central differences."""

    def run_check(self, mode, **kwargs):
        config = tiny_config(mode)
        features, labels = tiny_batch(config)
        return gradient_check(config, features, labels, **kwargs)

    def test_final_mode_passes(self):
        """Test every parameter group passes in final-query mode."""
        report = self.run_check('final')

        self.assertTrue(report.passed, render_gradient_check(report))
        self.assertLess(report.worst, TOLERANCE)

    def test_all_mode_passes(self):
        """Test every parameter group passes in all-positions mode."""
        report = self.run_check('all')

        self.assertTrue(report.passed, render_gradient_check(report))

    def test_covers_every_group(self):
        """Test the report has an entry for every parameter array."""
        report = self.run_check('final')

        self.assertIn('conv.kernel', report.errors)
        self.assertIn('bilstm1.backward.w_hidden', report.errors)
        self.assertIn('attn.v', report.errors)
        self.assertIn('dense_out.bias', report.errors)
        self.assertEqual(len(report.errors), 21)

    def test_injected_fault_flagged(self):
        """Test a doubled conv gradient is flagged."""
        report = self.run_check('final', fault='conv')

        self.assertFalse(report.passed)
        self.assertIn('conv.kernel', report.failed)
        self.assertNotIn('dense_out.weight', report.failed)

    def test_step_size_robust(self):
        """Test epsilon 1e-5 and 1e-6 agree on pass/fail."""
        coarse = self.run_check('final', epsilon=1e-5)
        fine = self.run_check('final', epsilon=1e-6)

        self.assertEqual(coarse.passed, fine.passed)


class ReportTests(SimpleTestCase):
    """Test the gradient check report."""

    def test_failed_groups(self):
        """Test groups above tolerance are listed as failed."""
        report = GradientCheckReport({'a': 1e-7, 'b': 2e-3})

        self.assertEqual(report.failed, ['b'])
        self.assertFalse(report.passed)
        self.assertEqual(report.worst, 2e-3)
        self.assertIn('FAIL', render_gradient_check(report))
