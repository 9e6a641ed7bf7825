"""
SVG figures for experiment artifacts.

Every figure is drawn from CSV files already on disk, never from in-memory
results, so a plot can always be regenerated from the data it shows.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .stabilize import read_sweep_csv  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _save(fig, svg_path: PathLike):
    # fixed hash salt keeps the SVG ids stable between runs
    plt.rcParams['svg.hashsalt'] = 'phstab'
    fig.savefig(svg_path, format='svg', bbox_inches='tight', metadata={'Date': None})
    plt.close(fig)
    logger.debug("Wrote %s", svg_path)


def plot_sweeps(csv_paths: Dict[str, PathLike], svg_path: PathLike, x_scale: float = 1.0,
                title: str = '') -> Path:
    """Mean against bandwidth for each labelled sweep CSV, with +/- one stderr bands."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, path in csv_paths.items():
        with open(path, newline='') as f:
            rows = read_sweep_csv(f)
        x = np.array([r['alpha'] for r in rows]) * x_scale
        mean = np.array([r['mean'] for r in rows])
        stderr = np.array([r['stderr'] for r in rows])
        stderr = np.where(np.isfinite(stderr), stderr, 0.0)
        ax.plot(x, mean, label=label, linewidth=1.2)
        ax.fill_between(x, mean - stderr, mean + stderr, alpha=0.25)
    ax.set_xlabel('bandwidth' if x_scale == 1 else f'{x_scale:g} x bandwidth')
    ax.set_ylabel('smoothed value')
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    _save(fig, svg_path)
    return Path(svg_path)


def plot_running_mean(trials_csv: PathLike, svg_path: PathLike) -> Path:
    """Running average of per-trial values (torus experiment)."""
    with open(trials_csv, newline='') as f:
        rows = list(csv.DictReader(f))
    trial = np.array([int(r['trial']) for r in rows]) + 1
    running = np.array([float(r['running_mean']) for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(trial, running, linewidth=1.2)
    ax.set_xlabel('trials')
    ax.set_ylabel('running mean of h')
    _save(fig, svg_path)
    return Path(svg_path)


def plot_bar_locations(trials_csv: PathLike, svg_path: PathLike, limit: int = 100) -> Path:
    """Creator positions of the longest bars on the fundamental domain, sized by length."""
    with open(trials_csv, newline='') as f:
        rows = [r for r in csv.DictReader(f) if r['creator_u']][:limit]
    u = np.array([float(r['creator_u']) for r in rows])
    v = np.array([float(r['creator_v']) for r in rows])
    length = np.array([float(r['bar_length']) for r in rows])
    counted = np.array([float(r['h']) > 0 for r in rows], dtype=bool)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(u[counted], v[counted], s=20 * length[counted] + 2, c='tab:blue', label='counted')
    ax.scatter(u[~counted], v[~counted], s=20 * length[~counted] + 2, c='tab:gray', label='outside region')
    ax.axhline(0, color='k', linewidth=0.5)
    ax.axvline(0, color='k', linewidth=0.5)
    ax.set_xlim(-np.pi, np.pi)
    ax.set_ylim(-np.pi, np.pi)
    ax.set_xlabel('u')
    ax.set_ylabel('v')
    ax.legend(frameon=False, loc='upper right')
    _save(fig, svg_path)
    return Path(svg_path)


def _span(values):
    lo, hi = values[0], values[-1]
    pad = 0.5 * abs(lo) if lo == hi else 0.0
    return lo - pad, hi + pad


def plot_heat_grid(grid_csv: PathLike, svg_path: PathLike, column: str = 'mean') -> Path:
    """Heat map of one column of the (delta, epsilon) grid CSV."""
    with open(grid_csv, newline='') as f:
        rows = list(csv.DictReader(f))
    deltas = sorted({float(r['delta']) for r in rows})
    epsilons = sorted({float(r['epsilon']) for r in rows})
    grid = np.full((len(epsilons), len(deltas)), np.nan)
    for r in rows:
        grid[epsilons.index(float(r['epsilon'])), deltas.index(float(r['delta']))] = float(r[column])
    fig, ax = plt.subplots(figsize=(5, 4))
    image = ax.imshow(
        grid, origin='lower', aspect='auto',
        extent=(*_span(deltas), *_span(epsilons)),
    )
    fig.colorbar(image, ax=ax, label=column)
    ax.set_xlabel('delta')
    ax.set_ylabel('epsilon')
    _save(fig, svg_path)
    return Path(svg_path)
