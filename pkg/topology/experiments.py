"""
Reproducible experiment runs.

Each experiment writes its CSVs, SVG figures derived from those CSVs, and a
manifest.json with the configuration, seed and package versions needed to
regenerate the CSVs byte for byte.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from . import plots
from .builders import TorusSample, noisy_circle, rips, torus_mesh
from .complex import Simplex
from .exceptions import EMPTY_STATE_ERRORS, TopologyError
from .kernels import KernelSpec, lipschitz_bound, make_stream, sample
from .reduction import EssentialMode, reduce, zero_dim
from .stabilize import format_float, parse_grid, smooth, sweep, write_sweep_csv
from .summaries import (
    SECOND_QUADRANT,
    CurveDistance,
    DensityThresholdRips,
    LineGraphLowerStar,
    MaxPersistence,
    Quadrant,
    SimplexPersistence,
    SummarySpec,
    VertexPersistence,
    evaluate,
    longest_bar,
    max_persistence,
    sample_torus,
)

logger = logging.getLogger(__name__)

EXPERIMENTS = ('line1', 'line2', 'curve', 'torus', 'denoise')

LINE1_VALUES = (10, 11, 12.5, 13, 9.9, 20, 1)
LINE2_VALUES = (5, 1.1, 1, 1.05, 15)
CURVE_VERTICES = (
    (0, 0.1), (1, 1), (2, 0.12), (7, 5), (12, 0),
    (7, -5), (2, -0.12), (1, -1), (0, -0.1),
)

DEFAULT_ALPHAS = {
    'line1': '0.001:0.1:100',
    'line2': '0.001:0.1:100',
    'curve': '0.0001:0.01:100',
}

# Rips scale for the denoise cloud: past the death of a clean unit circle's loop
DENOISE_MAX_SCALE = 1.8

VERSIONED_PACKAGES = ('numpy', 'scipy', 'joblib', 'matplotlib', 'Django', 'djangorestframework')


@dataclass
class ExperimentConfig:
    name: str
    output_dir: Path
    trials: int = 1000
    seed: int = 0
    alphas: Optional[List[float]] = None
    bandwidth: Optional[float] = None
    n_jobs: int = 1
    # torus: sample size and noise on z; denoise: cloud size
    n: Optional[int] = None
    noise: float = 0.0
    deltas: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    max_scale: Optional[float] = None

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise TopologyError(f"Unknown experiment {self.name!r}; expected one of {', '.join(EXPERIMENTS)}.")
        if int(self.trials) < 1:
            raise TopologyError(f"trials must be at least 1, got {self.trials}.")
        for grid_name in ('alphas', 'deltas', 'epsilons'):
            grid = getattr(self, grid_name)
            if grid is not None and len(grid) == 0:
                raise TopologyError(f"The {grid_name} grid is empty.")
        self.output_dir = Path(self.output_dir)

    def as_json(self) -> dict:
        data = asdict(self)
        data['output_dir'] = str(self.output_dir)
        return data


@dataclass
class ExperimentResult:
    name: str
    directory: Path
    files: List[str] = field(default_factory=list)
    results: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SummarySum:
    """Pointwise sum of several summaries, evaluated on the same draws."""

    parts: Tuple[SummarySpec, ...]
    label: str = 'sum'

    @property
    def arity(self) -> int:
        return self.parts[0].arity

    def __call__(self, a) -> float:
        return sum(evaluate(part, a) for part in self.parts)


def package_versions() -> Dict[str, Optional[str]]:
    versions = {}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(config: ExperimentConfig, result: ExperimentResult, inputs: dict):
    manifest = {
        'experiment': config.name,
        'config': config.as_json(),
        'seed': config.seed,
        'inputs': inputs,
        'versions': package_versions(),
        'files': result.files,
        'results': result.results,
    }
    path = result.directory / 'manifest.json'
    with open(path, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, allow_nan=False, default=str)
    logger.info("Wrote %s", path)


def _sweep_to_csv(summary, a, config: ExperimentConfig, alphas, label: str, directory: Path) -> Path:
    rows = sweep(summary, a, 'gaussian', alphas, config.trials, config.seed, n_jobs=config.n_jobs)
    path = directory / f'{label}.csv'
    with open(path, 'w', newline='') as f:
        write_sweep_csv(f, rows, label)
    return path


def _run_sweeps(config: ExperimentConfig, result: ExperimentResult, a: np.ndarray,
                summaries: Dict[str, object], x_scale: float, title: str) -> Dict[str, Path]:
    alphas = config.alphas or parse_grid(DEFAULT_ALPHAS[config.name])
    paths = {}
    for label, summary in summaries.items():
        paths[label] = _sweep_to_csv(summary, a, config, alphas, label, result.directory)
        result.files.append(paths[label].name)
    svg = plots.plot_sweeps(paths, result.directory / f'{config.name}.svg', x_scale=x_scale, title=title)
    result.files.append(svg.name)
    result.results['point_values'] = {label: s(a) for label, s in summaries.items()}
    return paths


# ----------------------------------------------------------------------
# Line graph and curve experiments
# ----------------------------------------------------------------------

def _line_experiment(config: ExperimentConfig, result: ExperimentResult, values, vertices) -> dict:
    a = np.asarray(values, dtype=float)
    computation = LineGraphLowerStar(len(a))
    parts = {
        f'g{v + 1}': SummarySpec(computation, VertexPersistence(v), label=f'g{v + 1}')
        for v in vertices
    }
    summaries = dict(parts)
    summaries['sum'] = SummarySum(tuple(parts.values()))
    _run_sweeps(config, result, a, summaries, x_scale=1000, title=f'{config.name}: smoothed vertex persistence')
    return {'a': list(values), 'vertices': [v + 1 for v in vertices]}


def run_line1(config, result):
    return _line_experiment(config, result, LINE1_VALUES, (4, 0))


def run_line2(config, result):
    return _line_experiment(config, result, LINE2_VALUES, (1, 2, 3))


def run_curve(config, result):
    a = np.asarray(CURVE_VERTICES, dtype=float).reshape(-1)
    computation = CurveDistance(len(CURVE_VERTICES))
    summaries = {
        'g_1_9': SummarySpec(computation, SimplexPersistence(Simplex((0, 8))), degree=1, label='g_1_9'),
        'g_3_7': SummarySpec(computation, SimplexPersistence(Simplex((2, 6))), degree=1, label='g_3_7'),
    }
    _run_sweeps(config, result, a, summaries, x_scale=10000, title='curve: smoothed edge persistence')
    return {'vertices': [list(v) for v in CURVE_VERTICES]}


# ----------------------------------------------------------------------
# Torus experiment
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TorusTrial:
    """One perturbed evaluation of the region longest-bar summary, with the bar's details."""

    base: np.ndarray
    kernel: KernelSpec
    seed: int
    region: Quadrant = SECOND_QUADRANT

    def __call__(self, i: int) -> dict:
        a = self.base - sample(self.kernel, make_stream(self.seed, 0, i))
        record = {'trial': i, 'h': 0.0, 'bar_length': '', 'birth': '', 'death': '',
                  'creator_u': '', 'creator_v': ''}
        try:
            complex_ = torus_mesh(TorusSample.from_flat(a))
        except EMPTY_STATE_ERRORS as exc:
            logger.debug("Torus trial %d in the empty state: %s", i, exc)
            return record
        bar = longest_bar(zero_dim(complex_))
        if bar is None:
            return record
        u, v = complex_.uv[bar.creator[0]]
        record.update(
            h=bar.persistence if self.region(u, v) else 0.0,
            bar_length=bar.persistence,
            birth=bar.birth,
            death=bar.death,
            creator_u=float(u),
            creator_v=float(v),
        )
        return record


def run_torus(config: ExperimentConfig, result: ExperimentResult) -> dict:
    n = config.n or 1000
    bandwidth = config.bandwidth or 0.2
    base = sample_torus(n, config.seed, noise=config.noise)
    kernel = KernelSpec('gaussian', 3 * n, bandwidth)
    trial = TorusTrial(base.flat(), kernel, config.seed)
    if config.n_jobs == 1:
        records = [trial(i) for i in range(config.trials)]
    else:
        records = Parallel(n_jobs=config.n_jobs)(delayed(trial)(i) for i in range(config.trials))

    values = np.array([r['h'] for r in records])
    running = np.cumsum(values) / np.arange(1, len(values) + 1)
    header = ('trial', 'h', 'bar_length', 'birth', 'death', 'creator_u', 'creator_v', 'running_mean')
    rows = []
    for record, mean in zip(records, running):
        rows.append([
            record['trial'],
            format_float(record['h']),
            *(format_float(record[k]) if record[k] != '' else '' for k in header[2:7]),
            format_float(mean),
        ])
    trials_csv = result.directory / 'torus_trials.csv'
    _write_csv(trials_csv, header, rows)
    result.files.append(trials_csv.name)
    result.files.append(plots.plot_running_mean(trials_csv, result.directory / 'torus_running_mean.svg').name)
    result.files.append(plots.plot_bar_locations(trials_csv, result.directory / 'torus_bars.svg').name)

    zero_fraction = float(np.mean(values == 0))
    result.results.update(
        mean=float(values.mean()),
        stderr=float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else None,
        zero_fraction=zero_fraction,
    )
    if zero_fraction in (0.0, 1.0):
        logger.warning("Torus run never switched regions (zero fraction %.2f); the bandwidth may be too small.", zero_fraction)
    return {'n': n, 'noise': config.noise, 'bandwidth': bandwidth}


# ----------------------------------------------------------------------
# De-noising experiment
# ----------------------------------------------------------------------

def run_denoise(config: ExperimentConfig, result: ExperimentResult) -> dict:
    n = config.n or 150
    bandwidth = config.bandwidth or 0.02
    max_scale = config.max_scale or DENOISE_MAX_SCALE
    deltas = config.deltas or parse_grid('0.2:0.4:3')
    epsilons = config.epsilons or parse_grid('0.02:0.08:3')
    cloud = noisy_circle(n=n, seed=config.seed)
    truncation = EssentialMode.truncate(max_scale)
    summary = SummarySpec(
        DensityThresholdRips(cloud, max_scale),
        MaxPersistence(),
        degree=1,
        essential_mode=truncation,
        label='max-persistence',
    )
    unthresholded = max_persistence(reduce(rips(cloud, max_scale), 1, essential_mode=truncation)[1])

    kernel = KernelSpec('gaussian', 2, bandwidth)
    means = np.zeros((len(epsilons), len(deltas)))
    stderrs = np.zeros_like(means)
    raws = np.zeros_like(means)
    rows = []
    for row_index, epsilon in enumerate(epsilons):
        for col_index, delta in enumerate(deltas):
            a = (delta, epsilon)
            raws[row_index, col_index] = evaluate(summary, a)
            estimate = smooth(summary, a, kernel, config.trials, config.seed,
                              alpha_index=row_index * len(deltas) + col_index, n_jobs=config.n_jobs)
            means[row_index, col_index] = estimate.mean
            stderrs[row_index, col_index] = estimate.stderr
            rows.append([format_float(delta), format_float(epsilon), format_float(raws[row_index, col_index]),
                         format_float(estimate.mean), format_float(estimate.stderr),
                         estimate.trials, estimate.seed])
    empty_cells = int(np.count_nonzero(raws == 0))
    if empty_cells:
        logger.warning("%d of %d grid cells have zero raw persistence", empty_cells, len(rows))

    grid_csv = result.directory / 'denoise_grid.csv'
    _write_csv(grid_csv, ('delta', 'epsilon', 'raw', 'mean', 'stderr', 'trials', 'seed'), rows)
    result.files.append(grid_csv.name)
    result.files.append(plots.plot_heat_grid(grid_csv, result.directory / 'denoise_grid.svg').name)

    # finite-difference slopes between neighbouring grid cells; the margin
    # allows three standard errors on each of the two means in a difference
    noise = 6 * float(np.max(stderrs)) if np.all(np.isfinite(stderrs)) else math.inf
    slopes, margins = [0.0], [0.0]
    if len(deltas) > 1:
        slopes.append(float(np.max(np.abs(np.diff(means, axis=1)) / np.diff(deltas)[None, :])))
        margins.append(noise / float(np.min(np.diff(deltas))))
    if len(epsilons) > 1:
        slopes.append(float(np.max(np.abs(np.diff(means, axis=0)) / np.diff(epsilons)[:, None])))
        margins.append(noise / float(np.min(np.diff(epsilons))))
    bound = lipschitz_bound('cor-gaussian', M=max_scale, alpha=bandwidth)
    margin = max(margins)
    result.results.update(
        unthresholded_max_persistence=unthresholded,
        best_thresholded=float(raws.max()),
        best_smoothed=float(means.max()),
        empirical_lipschitz=max(slopes),
        lipschitz_bound=bound,
        lipschitz_margin=margin if math.isfinite(margin) else None,
        within_lipschitz_bound=bool(max(slopes) <= bound + margin),
    )
    if max(slopes) > bound + margin:
        logger.warning("Smoothed denoise surface is steeper (%.4g) than its Lipschitz bound %.4g", max(slopes), bound)
    return {'n': n, 'cloud': cloud.points.tolist(), 'deltas': list(deltas), 'epsilons': list(epsilons),
            'bandwidth': bandwidth, 'max_scale': max_scale}


RUNNERS = {
    'line1': run_line1,
    'line2': run_line2,
    'curve': run_curve,
    'torus': run_torus,
    'denoise': run_denoise,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    directory = config.output_dir / config.name
    directory.mkdir(parents=True, exist_ok=True)
    result = ExperimentResult(name=config.name, directory=directory)
    logger.info("Running experiment %s (M=%d, seed=%d) into %s", config.name, config.trials, config.seed, directory)
    inputs = RUNNERS[config.name](config, result)
    _write_manifest(config, result, inputs)
    result.files.append('manifest.json')
    return result
