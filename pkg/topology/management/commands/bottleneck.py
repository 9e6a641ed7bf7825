from django.core.management.base import CommandError

from topology.cli import PhstabCommand, USAGE_ERROR, format_number, load_json, validated
from topology.metrics import bottleneck
from topology.serializers import DiagramSerializer


class Command(PhstabCommand):
    help = 'Bottleneck distance between two persistence diagrams'

    def add_arguments(self, parser):
        parser.add_argument('first', help='Diagram JSON, or the output of the persistence command.')
        parser.add_argument('second')
        parser.add_argument('--degree', type=int, default=0,
                            help='Degree to compare when a file holds several diagrams.')

    def _points(self, path, degree):
        data = load_json(path)
        if isinstance(data, dict) and 'diagrams' in data:
            matches = [d for d in data['diagrams'] if isinstance(d, dict) and d.get('degree') == degree]
            if not matches:
                raise CommandError(f"{path} has no diagram of degree {degree}.", returncode=USAGE_ERROR)
            data = matches[0]
        return validated(DiagramSerializer, data)['points']

    def run(self, *args, **options):
        distance = bottleneck(
            self._points(options['first'], options['degree']),
            self._points(options['second'], options['degree']),
        )
        self.stdout.write(self.style.SUCCESS(format_number(distance)))
