"""
Django command to verify analytic gradients against finite differences.
"""
import time

from django.core.management.base import CommandError

from core.management.base import PipelineCommand
from network.attention import MODES
from network.gradcheck import (
    DEFAULT_EPSILON,
    gradient_check,
    render_gradient_check,
    tiny_batch,
    tiny_config,
)


class Command(PipelineCommand):
    """Check both attention modes on the tiny configuration."""
    help = 'Run the whole-model gradient check; exits 1 on failure.'

    def add_arguments(self, parser):
        parser.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument(
            '--inject-fault', default=None, metavar='PARAM',
            help='Double the analytic gradient of a parameter array or '
                 'layer (e.g. conv) to confirm the check catches it.',
        )

    def run(self, *args, **options):
        started = time.perf_counter()
        failed = []
        worst = 0.0
        for mode in MODES:
            config = tiny_config(mode, seed=options['seed'])
            features, labels = tiny_batch(config, seed=options['seed'])
            result = gradient_check(
                config, features, labels,
                epsilon=options['epsilon'], fault=options['inject_fault'],
            )
            self.stdout.write(render_gradient_check(result, f'[{mode}] '))
            worst = max(worst, result.worst)
            failed.extend(f'{mode}:{name}' for name in result.failed)

        elapsed = time.perf_counter() - started
        if failed:
            self.stderr.write(self.style.ERROR(
                f'Gradient check FAILED for {", ".join(failed)}'
            ))
            raise CommandError('gradient check failed', returncode=1)
        self.stdout.write(self.style.SUCCESS(
            f'Gradient check passed: worst relative error {worst:.3e} '
            f'({elapsed:.1f} s)'
        ))
