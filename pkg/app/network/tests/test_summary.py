"""
Tests for the model summary.
"""
from django.test import SimpleTestCase

from network.model import ModelConfig, build
from network.summary import render_summary, summarize_model


class SummaryTests(SimpleTestCase):
    """Test the layer table."""

    def test_default_chain(self):
        """Test the default output shapes layer by layer."""
        rows = {(r.name, r.output_shape) for r in summarize_model(
            ModelConfig())}

        for expected in (('Conv1D', (55, 64)), ('MaxPooling1D', (27, 64)),
                         ('BiLSTM', (27, 64)), ('Attention', (1, 64)),
                         ('BiLSTM', (1, 64)), ('Dense', (250,)),
                         ('Dense', (5,))):
            self.assertIn(expected, rows)

    def test_all_mode_sequence(self):
        """Test all-positions mode keeps one context per timestep."""
        rows = summarize_model(ModelConfig(attention_mode='all'))
        attention = next(r for r in rows if r.name == 'Attention')

        self.assertEqual(attention.output_shape, (27, 64))

    def test_total_matches_built_model(self):
        """Test the parameter total equals the built model's size."""
        for mode in ('final', 'all'):
            config = ModelConfig(attention_mode=mode)
            total = sum(r.params for r in summarize_model(config))
            built = sum(a.size for _, a in build(config).named_arrays())

            self.assertEqual(total, built)

    def test_render(self):
        """Test the rendered table lists layers and the total."""
        text = render_summary(ModelConfig())

        self.assertIn('Conv1D', text)
        self.assertIn('Total params', text)
