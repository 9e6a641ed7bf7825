"""
Shared plumbing for the phstab management commands.

Exit codes: 0 on success, 2 for usage and validation errors, 3 for
anything unexpected.
"""

import json
import logging
import math
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from .exceptions import TopologyError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
INTERNAL_ERROR = 3


def _reject_constant(name):
    raise ValueError(f"{name} is not a valid JSON number")


def parse_json(text: str, source: str = '<input>'):
    """json.loads that rejects NaN/Infinity and reports the error position."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise CommandError(f"{source}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}",
                           returncode=USAGE_ERROR)
    except ValueError as e:
        raise CommandError(f"{source}: {e}", returncode=USAGE_ERROR)


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise CommandError(f"Cannot read {path}: {e.strerror}", returncode=USAGE_ERROR)
    return parse_json(text, str(path))


def json_or_file(value: str):
    """Inline JSON, or the path of a JSON file."""
    stripped = value.strip()
    if stripped.startswith(('{', '[', '"')):
        return parse_json(stripped, 'argument')
    return load_json(value)


def load_vector(value: str) -> np.ndarray:
    """
    A parameter vector given inline as '10,11,12.5' or as a JSON file holding
    a list or {"a": [...]}.
    """
    if not Path(value).exists() and not value.strip().startswith(('[', '{')):
        try:
            vector = np.array([float(x) for x in value.split(',') if x.strip()])
        except ValueError:
            raise CommandError(f"Cannot read parameters from {value!r}.", returncode=USAGE_ERROR)
    else:
        data = json_or_file(value)
        if isinstance(data, dict):
            data = data.get('a')
        try:
            vector = np.asarray(data, dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise CommandError("Parameters must be a list of numbers.", returncode=USAGE_ERROR)
    if vector.size == 0 or not np.all(np.isfinite(vector)):
        raise CommandError("Parameters must be a non-empty list of finite numbers.", returncode=USAGE_ERROR)
    return vector


def functional_from_flag(value: str):
    """
    Short flag forms: 'vertex:4', 'simplex:0,8', 'region:second-quadrant',
    'max-persistence'; anything else is inline JSON or a JSON file.
    """
    value = value.strip()
    if value == 'max-persistence':
        return value
    kind, sep, arg = value.partition(':')
    if sep and kind in ('vertex', 'simplex', 'region'):
        try:
            if kind == 'vertex':
                return {'vertex': int(arg)}
            if kind == 'simplex':
                return {'simplex': [int(x) for x in arg.split(',')]}
        except ValueError:
            raise CommandError(f"Cannot parse functional {value!r}.", returncode=USAGE_ERROR)
        return {'region': arg}
    return json_or_file(value)


def validated(serializer_class, data, context=None):
    serializer = serializer_class(data=data, context=context or {})
    if not serializer.is_valid():
        raise CommandError(f"Invalid input: {json.dumps(serializer.errors)}", returncode=USAGE_ERROR)
    return serializer.validated_data


def format_number(value: float) -> str:
    return 'inf' if math.isinf(value) else format(value, settings.PHSTAB['CSV_FLOAT_FORMAT'])


class PhstabCommand(BaseCommand):
    """
    Base for phstab commands: subclasses implement `run`; domain and
    validation errors leave with exit code 2, anything else with 3.
    """

    def add_threads_argument(self, parser):
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker count for Monte-Carlo trials (default: PHSTAB_THREADS).')

    def add_seed_argument(self, parser):
        parser.add_argument('--seed', type=int, default=None,
                            help='Base seed (default: PHSTAB_DEFAULT_SEED).')

    def threads(self, options) -> int:
        threads = options.get('threads')
        if threads is None:
            threads = settings.PHSTAB['THREADS']
        if threads < 1:
            raise CommandError("--threads must be at least 1.", returncode=USAGE_ERROR)
        return threads

    def seed(self, options) -> int:
        seed = options.get('seed')
        return settings.PHSTAB['DEFAULT_SEED'] if seed is None else seed

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except CommandError:
            raise
        except (TopologyError, serializers.ValidationError) as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)
        except Exception as e:
            logger.exception("%s failed", self.__class__.__module__)
            raise CommandError(f"Internal error: {e}", returncode=INTERNAL_ERROR)

    def run(self, *args, **options):
        raise NotImplementedError('subclasses of PhstabCommand must provide a run() method')

    def write_output(self, text: str, path=None):
        if path:
            Path(path).write_text(text)
        else:
            self.stdout.write(text, ending='' if text.endswith('\n') else '\n')


class SmoothingCommand(PhstabCommand):
    """Arguments shared by `stabilize` and `sweep`."""

    def add_arguments(self, parser):
        parser.add_argument('--a', required=True, dest='a',
                            help="Parameter vector: '10,11,12.5' or a JSON file.")
        parser.add_argument('--summary', required=True,
                            help="Functional ('vertex:4', 'simplex:0,8', 'max-persistence', "
                                 "'region:second-quadrant') or a full summary config (JSON or file).")
        parser.add_argument('--computation', default='line-graph-lower-star')
        parser.add_argument('--degree', type=int, default=0)
        parser.add_argument('--essential', default='extended', help="'extended' or 'truncate:M'.")
        parser.add_argument('--dim', type=int, default=2, help='Point dimension for rips.')
        parser.add_argument('--max-scale', type=float, default=None)
        parser.add_argument('--cloud', default=None, help='Point-cloud JSON for density-threshold-rips.')
        parser.add_argument('--kernel', default='gaussian', help='triangular, epanechnikov or gaussian.')
        parser.add_argument('--alphas', default=None, help="Bandwidth grid 'start:stop:count'.")
        parser.add_argument('--trials', type=int, required=True)
        parser.add_argument('--out', default=None, help='CSV path (default: standard output).')
        self.add_seed_argument(parser)
        self.add_threads_argument(parser)

    def build_summary(self, options, arity: int):
        from .serializers import SummarySerializer

        data = functional_from_flag(options['summary'])
        if not (isinstance(data, dict) and 'computation' in data):
            data = {
                'computation': options['computation'],
                'functional': data,
                'degree': options['degree'],
                'essential': options['essential'],
                'dim': options['dim'],
            }
            if options['max_scale'] is not None:
                data['max_scale'] = options['max_scale']
            if options['cloud']:
                data['cloud'] = json_or_file(options['cloud'])
        return validated(SummarySerializer, data, context={'arity': arity})

    def run_sweep(self, options, alphas):
        from .stabilize import parse_grid, sweep, write_sweep_csv

        if options['trials'] < 1:
            raise CommandError("--trials must be at least 1.", returncode=USAGE_ERROR)
        a = load_vector(options['a'])
        summary = self.build_summary(options, len(a))
        alphas = parse_grid(alphas)
        rows = sweep(summary, a, options['kernel'], alphas, options['trials'], self.seed(options),
                     n_jobs=self.threads(options))

        float_format = settings.PHSTAB['CSV_FLOAT_FORMAT']
        if options['out']:
            with open(options['out'], 'w', newline='') as f:
                write_sweep_csv(f, rows, summary.summary_id, float_format)
            for row in rows:
                self.stdout.write(self.style.SUCCESS(
                    f"alpha={format_number(row.bandwidth)}: {format_number(row.mean)} "
                    f"+/- {format_number(row.stderr)} (M={row.trials})"
                ))
        else:
            write_sweep_csv(self.stdout, rows, summary.summary_id, float_format)
        return None
