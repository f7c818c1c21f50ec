"""Shared plumbing for the pipeline management commands."""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.config import load_run_config
from core.exceptions import TappingError
from evaluation.metrics import render_confusion, render_report
from evaluation.serializers import report_to_json
from tapping.dataset import atomic_write


IO_ERROR_CODE = 4


class PipelineCommand(BaseCommand):
    """Base command mapping pipeline errors onto process exit codes.

    Subclasses implement ``run(*args, **options)`` instead of ``handle``.
    """

    def add_config_arguments(self, parser):
        parser.add_argument('--config', help='YAML run configuration file.')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--epochs', type=int)
        parser.add_argument('--batch-size', type=int)
        parser.add_argument('--lr', type=float, dest='learning_rate')
        parser.add_argument('--test-fraction', type=float)
        parser.add_argument('--attention-mode', choices=['final', 'all'])
        parser.add_argument('--out-dir')

    def handle(self, *args, **options):
        try:
            self.run(*args, **options)
        except TappingError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except OSError as exc:
            raise CommandError(str(exc), returncode=IO_ERROR_CODE) from exc

    def run(self, *args, **options):
        raise NotImplementedError

    def load_config(self, options):
        """Merged run configuration, echoed to stdout as YAML."""
        config = load_run_config(
            options.get('config'),
            seed=options.get('seed'),
            epochs=options.get('epochs'),
            batch_size=options.get('batch_size'),
            learning_rate=options.get('learning_rate'),
            test_fraction=options.get('test_fraction'),
            attention_mode=options.get('attention_mode'),
            out_dir=options.get('out_dir'),
        )
        self.stdout.write('Effective configuration:')
        self.stdout.write(config.to_yaml())
        return config

    def output_dir(self, out_dir):
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def write_report(self, out_dir, rep, cm):
        """report.txt, report.json and confusion.csv under ``out_dir``."""
        text = render_report(rep)
        payload = report_to_json(rep, cm)
        atomic_write(out_dir / 'report.txt',
                     lambda tmp: Path(tmp).write_text(text))
        atomic_write(out_dir / 'report.json',
                     lambda tmp: Path(tmp).write_bytes(payload))
        atomic_write(out_dir / 'confusion.csv',
                     lambda tmp: Path(tmp).write_text(render_confusion(cm)))
        return text
