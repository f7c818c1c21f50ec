"""
Django command to turn landmark recordings into feature rows.
"""
import numpy as np
from django.conf import settings

from core.exceptions import DataError
from core.management.base import PipelineCommand
from tapping.dataset import Dataset, write_feature_csv
from tapping.features import DEFAULT_WIDTH
from tapping.pipeline import DEFAULT_MAX_GAP_FRAMES, extract_many


class Command(PipelineCommand):
    """One feature row per recording; failing files are reported and
    skipped."""
    help = 'Extract feature vectors from landmark CSV recordings.'

    def add_arguments(self, parser):
        parser.add_argument('landmarks', nargs='+')
        parser.add_argument('--output', required=True)
        parser.add_argument('--max-gap-frames', type=int,
                            default=DEFAULT_MAX_GAP_FRAMES)
        parser.add_argument('--workers', type=int,
                            default=settings.EXTRACT_WORKERS)

    def run(self, *args, **options):
        results = extract_many(
            options['landmarks'],
            max_gap_frames=options['max_gap_frames'],
            width=DEFAULT_WIDTH,
            workers=options['workers'],
        )
        rows = []
        for path, vector, error in results:
            if error is None:
                rows.append(vector)
            else:
                self.stderr.write(self.style.ERROR(f'{error}'))
        if not rows:
            raise DataError('no recording produced a feature vector')

        write_feature_csv(Dataset(np.vstack(rows)), options['output'])
        self.stdout.write(self.style.SUCCESS(
            f'Extracted {len(rows)} of {len(results)} recordings to '
            f'{options["output"]}'
        ))
