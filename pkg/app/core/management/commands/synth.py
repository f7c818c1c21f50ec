"""
Django command to generate the synthetic Gaussian feature dataset.
"""
from core.management.base import PipelineCommand
from tapping.dataset import NUM_CLASSES, synth_generate, write_feature_csv


class Command(PipelineCommand):
    help = 'Write a synthetic labeled feature CSV.'

    def add_arguments(self, parser):
        parser.add_argument('output')
        parser.add_argument('--n-per-class', type=int, default=100)
        parser.add_argument('--separation', type=float, default=6.0)
        parser.add_argument('--seed', type=int, default=42)
        parser.add_argument('--features', type=int, default=57)
        parser.add_argument('--classes', type=int, default=NUM_CLASSES)

    def run(self, *args, **options):
        dataset = synth_generate(
            options['n_per_class'], options['separation'], options['seed'],
            n_features=options['features'], num_classes=options['classes'],
        )
        write_feature_csv(dataset, options['output'])
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(dataset)} rows to {options["output"]}'
        ))
