from django.core.management.base import CommandError

from topology.cli import SmoothingCommand, USAGE_ERROR


class Command(SmoothingCommand):
    help = "Sweep a stabilized summary over a bandwidth grid 'start:stop:count' and write the CSV"

    def run(self, *args, **options):
        if options['alphas'] is None:
            raise CommandError('sweep needs --alphas start:stop:count.', returncode=USAGE_ERROR)
        return self.run_sweep(options, options['alphas'])
