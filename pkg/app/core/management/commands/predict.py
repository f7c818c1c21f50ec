"""
Django command to predict severity classes for a feature CSV.
"""
from pathlib import Path

import pandas as pd
from django.conf import settings

from core.management.base import PipelineCommand
from network.checkpoint import check_compatible, load_checkpoint
from network.model import predict
from tapping.dataset import atomic_write, load_feature_csv, zscore_apply


class Command(PipelineCommand):
    """Write row, predicted_class, p0..p{K-1} per input row."""
    help = 'Predict classes and probabilities with a checkpoint.'

    def add_arguments(self, parser):
        parser.add_argument('checkpoint')
        parser.add_argument('features', help='Feature CSV, label optional.')
        parser.add_argument('--output', default=None,
                            help='Defaults to predictions.csv in OUT_DIR.')
        parser.add_argument('--out-dir', default=None)

    def run(self, *args, **options):
        checkpoint = load_checkpoint(options['checkpoint'])
        config = checkpoint.config
        dataset = load_feature_csv(options['features'], config.num_classes)
        check_compatible(config, dataset.width)
        if checkpoint.stats is not None and len(dataset):
            dataset = zscore_apply(checkpoint.stats, dataset)

        classes, probs = predict(checkpoint.params, dataset.features)
        frame = pd.DataFrame({
            'row': range(len(dataset)),
            'predicted_class': classes,
        })
        for k in range(config.num_classes):
            frame[f'p{k}'] = probs[:, k]

        output = options['output']
        if output is None:
            out_dir = self.output_dir(options['out_dir'] or settings.OUT_DIR)
            output = out_dir / 'predictions.csv'
        atomic_write(output, lambda tmp: frame.to_csv(
            tmp, index=False, float_format='%.17g'))
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(frame)} predictions to {Path(output)}'
        ))
