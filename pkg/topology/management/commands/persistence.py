import json

from django.core.management.base import CommandError

from topology.cli import PhstabCommand, USAGE_ERROR, load_json, validated
from topology.reduction import EssentialMode, reduce
from topology.serializers import ComplexSerializer, diagram_to_json


class Command(PhstabCommand):
    help = 'Compute persistence diagrams of a filtered complex stored as JSON'

    def add_arguments(self, parser):
        parser.add_argument('input', help='Complex JSON: {"simplices": [{"v": [0, 1], "f": 11.0}, ...]}')
        parser.add_argument('--degree', type=int, default=0, help='Highest homology degree to report.')
        parser.add_argument('--essential', default='extended', help="'extended' or 'truncate:M'.")
        parser.add_argument('--cycles', action='store_true', help='Include representative cycles.')
        parser.add_argument('--output', '-o', default=None, help='Diagram JSON path (default: standard output).')

    def run(self, *args, **options):
        if options['degree'] < 0:
            raise CommandError('--degree must be non-negative.', returncode=USAGE_ERROR)
        complex_ = validated(ComplexSerializer, load_json(options['input']))
        mode = EssentialMode.parse(options['essential'])

        diagrams = reduce(complex_, options['degree'], want_cycles=options['cycles'], essential_mode=mode)
        payload = {'diagrams': [diagram_to_json(d) for d in diagrams]}
        self.write_output(json.dumps(payload, indent=2) + '\n', options['output'])

        if options['output']:
            pairs = sum(len(d) for d in diagrams)
            self.stdout.write(self.style.SUCCESS(
                f"Wrote {len(diagrams)} diagram(s) with {pairs} pairs to {options['output']}"
            ))
