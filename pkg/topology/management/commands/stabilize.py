from django.core.management.base import CommandError

from topology.cli import SmoothingCommand, USAGE_ERROR


class Command(SmoothingCommand):
    help = 'Estimate a stabilized summary (h * K)(a) by Monte-Carlo perturbation'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--bandwidth', type=float, default=None, help='Single kernel bandwidth.')

    def run(self, *args, **options):
        if (options['bandwidth'] is None) == (options['alphas'] is None):
            raise CommandError('Give exactly one of --bandwidth and --alphas.', returncode=USAGE_ERROR)
        grid = options['alphas'] if options['alphas'] is not None else repr(options['bandwidth'])
        return self.run_sweep(options, grid)
