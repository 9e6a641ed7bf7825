"""
Smoothing kernels: triangular, Epanechnikov and Gaussian.

Every kernel is isotropic with scalar bandwidth alpha and satisfies the
kernel axioms (unit mass, zero mean, finite second moment). Besides density
evaluation and exact sampling this module carries the closed-form Lipschitz
constants that make h * K_alpha provably stable.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import special, stats

from .exceptions import ArityError, KernelDomainError, UnboundedBandwidthError

logger = logging.getLogger(__name__)

FAMILIES = ('triangular', 'epanechnikov', 'gaussian')

ArrayLike = Union[float, Sequence[float], np.ndarray]


def unit_ball_volume(d: int) -> float:
    """Volume V_d of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """
    Counter-based generator for stream `key` of `seed`.

    The draws of a stream depend only on (seed, key), never on which worker
    consumes it or in what order.
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True)
class KernelSpec:
    family: str
    dim: int
    bandwidth: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise KernelDomainError(f"Unknown kernel family {self.family!r}; expected one of {', '.join(FAMILIES)}.")
        if self.dim < 1:
            raise KernelDomainError(f"Kernel dimension must be >= 1, got {self.dim}.")
        if not (self.bandwidth > 0) or not math.isfinite(self.bandwidth):
            raise KernelDomainError(f"Bandwidth must be positive and finite, got {self.bandwidth}.")

    @property
    def compact(self) -> bool:
        return self.family != 'gaussian'

    def with_bandwidth(self, bandwidth: float) -> 'KernelSpec':
        return KernelSpec(self.family, self.dim, float(bandwidth))

    def density(self, x: ArrayLike):
        return density(self, x)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        return sample(self, rng, size)


def _as_points(k: KernelSpec, x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if k.dim == 1 and arr.ndim == 1 and arr.shape[0] != 1:
        # a flat vector of 1-D points
        arr = arr.reshape(-1, 1)
    if arr.shape[-1] != k.dim:
        raise ArityError(f"Point has dimension {arr.shape[-1]}, kernel has dimension {k.dim}.")
    return arr


def density(k: KernelSpec, x: ArrayLike):
    """K_alpha(x); accepts one point of R^d or an (n, d) array of points."""
    points = _as_points(k, x)
    d, alpha = k.dim, k.bandwidth
    r = np.linalg.norm(points, axis=-1)
    if k.family == 'gaussian':
        values = np.exp(-(r ** 2) / (2 * alpha ** 2)) / (alpha ** d * (2 * math.pi) ** (d / 2))
    else:
        scale = alpha ** d * unit_ball_volume(d)
        if k.family == 'triangular':
            values = (d + 1) / scale * (1 - r / alpha)
        else:
            values = (d + 2) / (2 * scale) * (1 - (r / alpha) ** 2)
        values = np.where(r < alpha, values, 0.0)
    if points.ndim == 1:
        return float(values)
    return values


def _radial_fraction(k: KernelSpec, u: np.ndarray) -> np.ndarray:
    """Inverse CDF of |X|/alpha for the compact families."""
    d = k.dim
    if k.family == 'triangular':
        # |X|/alpha ~ Beta(d, 2)
        if d == 1:
            return 1 - np.sqrt(1 - u)
        return special.betaincinv(d, 2, u)
    # Epanechnikov: (|X|/alpha)^2 ~ Beta(d/2, 2)
    return np.sqrt(special.betaincinv(d / 2, 2, u))


def sample(k: KernelSpec, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """
    Exact draws from K_alpha: shape (d,) when size is None, else (size, d).

    Gaussian draws are alpha-scaled standard normals; compact families draw a
    radius by inverse CDF and a uniform direction.
    """
    n = 1 if size is None else int(size)
    d, alpha = k.dim, k.bandwidth
    if k.family == 'gaussian':
        draws = rng.standard_normal((n, d)) * alpha
    else:
        u = rng.random(n)
        directions = rng.standard_normal((n, d))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        # a zero normal vector has probability zero; fall back to the first axis
        directions = np.where(norms > 0, directions / np.where(norms > 0, norms, 1.0), np.eye(1, d))
        draws = directions * (alpha * _radial_fraction(k, u))[:, None]
    return draws[0] if size is None else draws


def second_moment(k: KernelSpec) -> float:
    """E|X|^2 under K_alpha."""
    d, a2 = k.dim, k.bandwidth ** 2
    if k.family == 'gaussian':
        return d * a2
    if k.family == 'triangular':
        return a2 * d * (d + 1) / ((d + 2) * (d + 3))
    return a2 * d / (d + 4)


def kernel_lipschitz(k: KernelSpec) -> float:
    """Lipschitz constant of the density K_alpha itself."""
    d, alpha = k.dim, k.bandwidth
    if k.family == 'triangular':
        return (d + 1) / (alpha ** (d + 1) * unit_ball_volume(d))
    if k.family == 'epanechnikov':
        return (d + 2) / (alpha ** (d + 1) * unit_ball_volume(d))
    # steepest slope of the Gaussian profile is at |x| = alpha
    return math.exp(-0.5) / (alpha ** (d + 1) * (2 * math.pi) ** (d / 2))


# ----------------------------------------------------------------------
# Lipschitz constants of h * K
# ----------------------------------------------------------------------

LIPSCHITZ_MODES = ('thm-1', 'thm-2', 'thm-3', 'cor-triangular', 'cor-epanechnikov', 'cor-gaussian')


def _positive(name: str, value: float):
    if value is None or not value > 0:
        raise KernelDomainError(f"{name} must be positive, got {value}.")


def _non_negative(name: str, value: float):
    if value is None or value < 0:
        raise KernelDomainError(f"{name} must be non-negative, got {value}.")


def lipschitz_bound(mode: str, M: float = None, alpha: float = None, d: int = None,
                    C: float = None, D: float = None) -> float:
    """
    Lipschitz constant of h * K from one of the stability results.

    thm-1: ||h||_1 = C and K D-Lipschitz -> CD.
    thm-2: |h| <= M near x, K D-Lipschitz supported in B_alpha -> 2 M D alpha^d V_d (local).
    thm-3: |h| <= M and the L1 modulus of K is D|t| -> MD.
    cor-triangular / cor-epanechnikov: 2M(d+1)/alpha and 2M(d+2)/alpha (local).
    cor-gaussian: sqrt(2/pi) M / alpha.
    """
    if mode == 'thm-1':
        _positive('C', C)
        _positive('D', D)
        return C * D
    if mode == 'thm-2':
        _non_negative('M', M)
        _positive('alpha', alpha)
        _positive('D', D)
        _positive('d', d)
        return 2 * M * D * alpha ** d * unit_ball_volume(d)
    if mode == 'thm-3':
        _non_negative('M', M)
        _positive('D', D)
        return M * D
    if mode in ('cor-triangular', 'cor-epanechnikov'):
        _non_negative('M', M)
        _positive('alpha', alpha)
        _positive('d', d)
        offset = 1 if mode == 'cor-triangular' else 2
        return 2 * M * (d + offset) / alpha
    if mode == 'cor-gaussian':
        _non_negative('M', M)
        _positive('alpha', alpha)
        return math.sqrt(2 / math.pi) * M / alpha
    raise KernelDomainError(f"Unknown Lipschitz mode {mode!r}; expected one of {', '.join(LIPSCHITZ_MODES)}.")


def smoothed_lipschitz(k: KernelSpec, M: float) -> float:
    """The family corollary constant for h * k when |h| <= M."""
    return lipschitz_bound(f"cor-{k.family}", M=M, alpha=k.bandwidth, d=k.dim)


def min_bandwidth(family: str, d: int, M_bound: float, target_lipschitz: float,
                  noise_level: float = 0.0) -> float:
    """
    Smallest bandwidth whose corollary constant is at most `target_lipschitz`,
    raised to `noise_level` when the estimated input noise is larger.
    """
    if family not in FAMILIES:
        raise KernelDomainError(f"Unknown kernel family {family!r}.")
    _non_negative('M_bound', M_bound)
    _non_negative('noise_level', noise_level)
    if target_lipschitz is None or target_lipschitz < 0:
        raise KernelDomainError(f"target_lipschitz must be non-negative, got {target_lipschitz}.")
    if target_lipschitz == 0:
        if M_bound == 0:
            return float(noise_level)
        raise UnboundedBandwidthError("A zero Lipschitz target needs an unbounded bandwidth.")
    # every corollary constant is c / alpha, so alpha = c / L
    constant = lipschitz_bound(f"cor-{family}", M=M_bound, alpha=1.0, d=d)
    return max(constant / target_lipschitz, float(noise_level))


# ----------------------------------------------------------------------
# L1 distances between kernels
# ----------------------------------------------------------------------

class MonteCarloResult(NamedTuple):
    estimate: float
    stderr: float
    samples: int


def l1_distance_mc(k1: KernelSpec, k2: KernelSpec, n_samples: int, seed: int) -> MonteCarloResult:
    """
    Monte-Carlo estimate of the L1 distance between two kernels.

    Points are drawn from the mixture (k1 + k2) / 2 and weighted by
    |k1 - k2| / mixture, so equal kernels give exactly zero.
    """
    if k1.dim != k2.dim:
        raise ArityError(f"Kernels live in different dimensions ({k1.dim} vs {k2.dim}).")
    if n_samples < 1:
        raise KernelDomainError("n_samples must be at least 1.")
    rng = make_stream(seed, 0)
    pick_first = rng.random(n_samples) < 0.5
    draws = np.where(pick_first[:, None], sample(k1, rng, n_samples), sample(k2, rng, n_samples))
    p1 = np.atleast_1d(density(k1, draws))
    p2 = np.atleast_1d(density(k2, draws))
    weights = np.abs(p1 - p2) / (0.5 * (p1 + p2))
    stderr = float(np.std(weights, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    return MonteCarloResult(float(np.mean(weights)), stderr, n_samples)


def gaussian_l1_modulus(t: ArrayLike, alpha: float) -> float:
    """Exact integral of |K_alpha(s + t) - K_alpha(s)| ds for the Gaussian kernel."""
    _positive('alpha', alpha)
    shift = float(np.linalg.norm(np.atleast_1d(np.asarray(t, dtype=float))))
    return float(2 * (2 * stats.norm.cdf(shift / (2 * alpha)) - 1))


def gaussian_l1_distance_1d(alpha1: float, alpha2: float) -> float:
    """Exact L1 distance between two centred 1-D Gaussian kernels."""
    _positive('alpha1', alpha1)
    _positive('alpha2', alpha2)
    if alpha1 == alpha2:
        return 0.0
    narrow, wide = sorted((alpha1, alpha2))
    # the densities cross at +/- x
    x = math.sqrt(2 * math.log(wide / narrow) * narrow ** 2 * wide ** 2 / (wide ** 2 - narrow ** 2))
    return float(4 * (stats.norm.cdf(x / narrow) - stats.norm.cdf(x / wide)))
