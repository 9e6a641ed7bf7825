"""
Monte-Carlo estimation of stabilized summaries g = h * K_alpha.

g(a) is estimated by averaging h(a - eps_i) over M kernel draws. Trial i of
bandwidth index j always draws from stream (seed, j, i), and the values are
aggregated in trial order, so the estimate does not depend on how many
workers ran the trials.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed, cpu_count

from .exceptions import ArityError, TopologyError
from .kernels import FAMILIES, KernelSpec, make_stream, min_bandwidth, sample  # noqa: F401
from .summaries import SummarySpec

logger = logging.getLogger(__name__)

CSV_HEADER = ('alpha', 'summary_id', 'mean', 'stderr', 'trials', 'seed')


@dataclass(frozen=True)
class SmoothEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int
    bandwidth: float
    # per-trial values in trial order, kept only when asked for
    values: Optional[Tuple[float, ...]] = field(default=None, repr=False, compare=False)

    def as_row(self, summary_id: str) -> dict:
        return {
            'alpha': self.bandwidth,
            'summary_id': summary_id,
            'mean': self.mean,
            'stderr': self.stderr,
            'trials': self.trials,
            'seed': self.seed,
        }


def _run_trials(h: Callable, a: np.ndarray, kernel: KernelSpec, seed: int,
                alpha_index: int, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for offset, i in enumerate(range(start, stop)):
        eps = sample(kernel, make_stream(seed, alpha_index, i))
        out[offset] = h(a - eps)
    return out


def _chunks(trials: int, n_jobs: int) -> List[Tuple[int, int]]:
    count = max(1, min(trials, 4 * n_jobs))
    bounds = np.linspace(0, trials, count + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]


def smooth(summary: Callable, a: Sequence[float], kernel: KernelSpec, trials: int, seed: int,
           alpha_index: int = 0, n_jobs: int = 1, keep_values: bool = False) -> SmoothEstimate:
    """
    Estimate (h * K)(a) from `trials` draws of `kernel`.

    `summary` is a SummarySpec or any callable R^n -> R. The standard error
    uses the unbiased sample variance and is +inf for a single trial.
    """
    vector = np.asarray(a, dtype=float).reshape(-1)
    if kernel.dim != vector.shape[0]:
        raise ArityError(f"Kernel dimension {kernel.dim} does not match {vector.shape[0]} parameters.")
    if isinstance(summary, SummarySpec) and summary.arity != vector.shape[0]:
        raise ArityError(f"{summary.summary_id} expects {summary.arity} parameters, got {vector.shape[0]}.")
    trials = int(trials)
    if trials < 1:
        raise TopologyError(f"trials must be at least 1, got {trials}.")

    n_jobs = max(1, min(int(n_jobs), cpu_count()))
    chunks = _chunks(trials, n_jobs)
    if n_jobs == 1:
        parts = [_run_trials(summary, vector, kernel, seed, alpha_index, lo, hi) for lo, hi in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_run_trials)(summary, vector, kernel, seed, alpha_index, lo, hi) for lo, hi in chunks
        )
    values = np.concatenate(parts)

    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    logger.debug("smooth: alpha=%g M=%d mean=%.6g stderr=%.3g", kernel.bandwidth, trials, mean, stderr)
    return SmoothEstimate(
        mean=mean,
        stderr=stderr,
        trials=trials,
        seed=int(seed),
        bandwidth=kernel.bandwidth,
        values=tuple(values.tolist()) if keep_values else None,
    )


def sweep(summary: Callable, a: Sequence[float], family: str, alphas: Sequence[float], trials: int,
          seed: int, n_jobs: int = 1) -> List[SmoothEstimate]:
    """One smooth() per bandwidth; bandwidth j draws from streams (seed, j, *)."""
    alphas = [float(x) for x in alphas]
    if not alphas:
        raise TopologyError("The bandwidth list is empty.")
    dim = len(np.asarray(a, dtype=float).reshape(-1))
    logger.info("Sweep over %d bandwidths (%s, M=%d, seed=%d)", len(alphas), family, trials, seed)
    rows = [
        smooth(summary, a, KernelSpec(family, dim, alpha), trials, seed, alpha_index=j, n_jobs=n_jobs)
        for j, alpha in enumerate(alphas)
    ]
    logger.info("Sweep finished")
    return rows


def parse_grid(text: str) -> List[float]:
    """'start:stop:count' -> count evenly spaced values, both endpoints included; a bare number is one value."""
    parts = str(text).split(':')
    if len(parts) not in (1, 3):
        raise TopologyError(f"Grid must be 'start:stop:count' or a single number, got {text!r}.")
    try:
        numbers = [float(p) for p in parts[:2]] + [int(p) for p in parts[2:]]
    except ValueError:
        raise TopologyError(f"Grid must be 'start:stop:count' or a single number, got {text!r}.")
    if len(numbers) == 1:
        values = numbers
    else:
        start, stop, count = numbers
        if count < 1:
            raise TopologyError(f"Grid count must be at least 1, got {count}.")
        values = np.linspace(start, stop, count).tolist()
    if any(not (v > 0) or not math.isfinite(v) for v in values):
        raise TopologyError(f"Bandwidths must be positive and finite: {text!r}.")
    return values


def format_float(value: float, spec: str = '.17g') -> str:
    return format(float(value), spec)


def write_sweep_csv(stream, rows: Sequence[SmoothEstimate], summary_id: str, float_format: str = '.17g'):
    """Write sweep rows to an open text stream."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            format_float(row.bandwidth, float_format),
            summary_id,
            format_float(row.mean, float_format),
            format_float(row.stderr, float_format),
            row.trials,
            row.seed,
        ])


def read_sweep_csv(stream) -> List[dict]:
    """Rows of a sweep CSV with numeric columns parsed."""
    rows = []
    for record in csv.DictReader(stream):
        rows.append({
            'alpha': float(record['alpha']),
            'summary_id': record['summary_id'],
            'mean': float(record['mean']),
            'stderr': float(record['stderr']),
            'trials': int(record['trials']),
            'seed': int(record['seed']),
        })
    return rows
