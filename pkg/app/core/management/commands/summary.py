"""
Django command to print the layer table of the configured model.
"""
from core.management.base import PipelineCommand
from network.summary import render_summary


class Command(PipelineCommand):
    help = 'Print output shapes and parameter counts per layer.'

    def add_arguments(self, parser):
        self.add_config_arguments(parser)

    def run(self, *args, **options):
        config = self.load_config(options)
        self.stdout.write(render_summary(config.model_config()))
