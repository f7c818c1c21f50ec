"""
Django command to evaluate a checkpoint on a labeled feature CSV.
"""
from django.conf import settings

from core.exceptions import ConfigError
from core.management.base import PipelineCommand
from evaluation.metrics import confusion, report
from network.checkpoint import check_compatible, load_checkpoint
from network.model import predict
from tapping.dataset import LABEL_COLUMN, load_feature_csv, zscore_apply


class Command(PipelineCommand):
    """Inference-mode predictions scored against the CSV labels."""
    help = 'Evaluate a checkpoint and write report and confusion matrix.'

    def add_arguments(self, parser):
        parser.add_argument('checkpoint')
        parser.add_argument('features', help='Labeled feature CSV.')
        parser.add_argument('--digits', type=int, default=None)
        parser.add_argument('--out-dir', default=None)

    def run(self, *args, **options):
        checkpoint = load_checkpoint(options['checkpoint'])
        config = checkpoint.config
        dataset = load_feature_csv(options['features'], config.num_classes)
        if dataset.labels is None:
            raise ConfigError(
                f'{options["features"]} has no "{LABEL_COLUMN}" column; '
                'use the predict command for unlabeled data'
            )
        check_compatible(config, dataset.width)
        if checkpoint.stats is not None:
            dataset = zscore_apply(checkpoint.stats, dataset)

        predicted, _ = predict(checkpoint.params, dataset.features)
        cm = confusion(dataset.labels, predicted, config.num_classes)
        rep = report(cm, digits=options['digits'])

        out_dir = self.output_dir(options['out_dir'] or settings.OUT_DIR)
        text = self.write_report(out_dir, rep, cm)
        self.stdout.write(text)
        self.stdout.write(self.style.SUCCESS(
            f'Evaluated {len(dataset)} rows: accuracy {rep.accuracy:.2f}'
        ))
