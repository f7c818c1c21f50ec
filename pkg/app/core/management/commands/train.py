"""
Django command to train the classifier on a labeled feature CSV.
"""
from pathlib import Path

from core.exceptions import ConfigError
from core.management.base import PipelineCommand
from evaluation.curves import emit_curves
from evaluation.metrics import confusion, report
from network.checkpoint import save_checkpoint
from network.model import predict
from network.summary import render_summary
from network.training import train
from tapping.dataset import (
    LABEL_COLUMN,
    load_feature_csv,
    stratified_split,
    zscore_apply,
    zscore_fit,
)


class Command(PipelineCommand):
    """Split, normalize, train and evaluate on the held-out split."""
    help = 'Train the classifier and write checkpoint, curves and report.'

    def add_arguments(self, parser):
        parser.add_argument('features', help='Labeled feature CSV.')
        parser.add_argument('--digits', type=int, default=None,
                            help='Round per-class fractions before '
                                 'averaging (2 gives whole percent).')
        self.add_config_arguments(parser)

    def run(self, *args, **options):
        config = self.load_config(options)
        model_config = config.model_config().validate()
        train_config = config.train_config().validate()

        dataset = load_feature_csv(options['features'], config.num_classes)
        if dataset.labels is None:
            raise ConfigError(
                f'{options["features"]}: missing "{LABEL_COLUMN}" column'
            )
        if dataset.width != model_config.input_features:
            raise ConfigError(
                f'{options["features"]} has {dataset.width} features but '
                f'input_features is {model_config.input_features}'
            )
        self.stdout.write(render_summary(model_config))

        train_set, test_set = stratified_split(
            dataset, config.test_fraction, config.seed
        )
        stats = zscore_fit(train_set)
        train_set = zscore_apply(stats, train_set)
        test_set = zscore_apply(stats, test_set)

        params, history = train(train_set, model_config, train_config)
        predicted, _ = predict(params, test_set.features)
        cm = confusion(test_set.labels, predicted, config.num_classes)
        rep = report(cm, digits=options['digits'])

        out_dir = self.output_dir(config.out_dir)
        save_checkpoint(params, out_dir / 'model.tapt', stats)
        emit_curves(history, out_dir / 'history.csv')
        text = self.write_report(out_dir, rep, cm)

        self.stdout.write(text)
        self.stdout.write(self.style.SUCCESS(
            f'Trained on {len(train_set)} rows, artifacts in '
            f'{Path(out_dir)}'
        ))
