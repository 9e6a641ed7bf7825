from django.conf import settings

from topology.cli import PhstabCommand
from topology.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from topology.stabilize import parse_grid


class Command(PhstabCommand):
    help = f"Run one of the reproducible experiments ({', '.join(EXPERIMENTS)})"

    def add_arguments(self, parser):
        parser.add_argument('name', help=f"One of: {', '.join(EXPERIMENTS)}")
        parser.add_argument('--trials', type=int, default=1000)
        parser.add_argument('--alphas', default=None, help="Bandwidth grid 'start:stop:count'.")
        parser.add_argument('--bandwidth', type=float, default=None,
                            help='Bandwidth for the torus and denoise experiments.')
        parser.add_argument('--n', type=int, default=None, help='Torus sample size or denoise cloud size.')
        parser.add_argument('--noise', type=float, default=0.0, help='Noise on torus function values.')
        parser.add_argument('--deltas', default=None, help="Denoise delta grid 'start:stop:count'.")
        parser.add_argument('--epsilons', default=None, help="Denoise epsilon grid 'start:stop:count'.")
        parser.add_argument('--max-scale', type=float, default=None,
                            help='Rips scale for denoise (default: 1.8, past the clean loop).')
        parser.add_argument('--out', default=None, help='Artifact directory (default: PHSTAB_OUTPUT_DIR).')
        self.add_seed_argument(parser)
        self.add_threads_argument(parser)

    def run(self, *args, **options):
        config = ExperimentConfig(
            name=options['name'],
            output_dir=options['out'] or settings.PHSTAB['OUTPUT_DIR'],
            trials=options['trials'],
            seed=self.seed(options),
            alphas=parse_grid(options['alphas']) if options['alphas'] else None,
            bandwidth=options['bandwidth'],
            n_jobs=self.threads(options),
            n=options['n'],
            noise=options['noise'],
            deltas=parse_grid(options['deltas']) if options['deltas'] else None,
            epsilons=parse_grid(options['epsilons']) if options['epsilons'] else None,
            max_scale=options['max_scale'],
        )
        result = run_experiment(config)
        for name in result.files:
            self.stdout.write(f"  {result.directory / name}")
        self.stdout.write(self.style.SUCCESS(f"Experiment {config.name} written to {result.directory}"))
