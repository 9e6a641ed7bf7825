"""
Unstable persistence summaries h = p o H.

A SummarySpec pairs a computation H (parameter vector -> filtered complex ->
diagram) with a functional p (diagram -> real). Parameter vectors on which H
is undefined (an empty thresholded cloud, a degenerate triangulation) land in
the empty state, which every functional maps to 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, Optional, Sequence

import numpy as np

from .builders import (
    PointCloud,
    TorusSample,
    curve_complex,
    density_threshold,
    line_graph_skeleton,
    lower_star,
    rips,
    torus_mesh,
)
from .complex import FilteredComplex, Simplex
from .exceptions import EMPTY_STATE_ERRORS, ArityError, EmptyInputError, TopologyError
from .reduction import EXTENDED, EssentialMode, PersistenceDiagram, PersistencePair, reduce, zero_dim

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Functionals on diagrams
# ----------------------------------------------------------------------

def _finite_persistence(pair: Optional[PersistencePair]) -> float:
    """Persistence of a pair, with missing and infinite pairs counting as 0."""
    if pair is None or not pair.is_finite:
        return 0.0
    return pair.persistence


def persistence_at_vertex(diagram: PersistenceDiagram, x: int) -> float:
    """Persistence of the component created by vertex x, else 0."""
    return _finite_persistence(diagram.pair_created_by(Simplex.from_sorted((int(x),))))


def persistence_at_simplex(diagram: PersistenceDiagram, simplex: Iterable[int]) -> float:
    """Persistence of the class created by `simplex`, else 0."""
    return _finite_persistence(diagram.pair_created_by(simplex))


def persistence_of_cycle(diagram: PersistenceDiagram, cycle: Iterable[Iterable[int]]) -> float:
    """Persistence of the pair whose stored representative is exactly `cycle`, else 0."""
    target = frozenset(s if isinstance(s, Simplex) else Simplex(s) for s in cycle)
    if not target:
        return 0.0
    for pair in diagram.pairs:
        if pair.cycle is not None and pair.cycle == target:
            return _finite_persistence(pair)
    return 0.0


def max_persistence(diagram: Optional[PersistenceDiagram]) -> float:
    """Largest finite persistence; 0 for an empty diagram or the empty state."""
    if diagram is None:
        return 0.0
    return max((_finite_persistence(p) for p in diagram.pairs), default=0.0)


def longest_bar(diagram: PersistenceDiagram) -> Optional[PersistencePair]:
    """Longest finite bar; ties go to the earliest birth, then the smallest creator."""
    finite = [p for p in diagram.pairs if p.is_finite]
    if not finite:
        return None
    return min(finite, key=lambda p: (-p.persistence, p.birth, p.creator))


def region_longest_bar(diagram: PersistenceDiagram, region: Callable[[int], bool]) -> float:
    """Length of the globally longest bar if its creator vertex lies in `region`, else 0."""
    bar = longest_bar(diagram)
    if bar is None or not region(bar.creator[0]):
        return 0.0
    return bar.persistence


@dataclass(frozen=True)
class Quadrant:
    """Open quadrant {sign_u * u > 0, sign_v * v > 0} of the fundamental domain."""

    sign_u: int
    sign_v: int

    def __call__(self, u: float, v: float) -> bool:
        return self.sign_u * u > 0 and self.sign_v * v > 0


SECOND_QUADRANT = Quadrant(-1, 1)
FOURTH_QUADRANT = Quadrant(1, -1)
second_quadrant = SECOND_QUADRANT
fourth_quadrant = FOURTH_QUADRANT
REGIONS = {
    'first-quadrant': Quadrant(1, 1),
    'second-quadrant': SECOND_QUADRANT,
    'third-quadrant': Quadrant(-1, -1),
    'fourth-quadrant': FOURTH_QUADRANT,
}


# Functionals carried by a SummarySpec. Each takes the diagram and the complex
# it came from (needed to locate vertices for region predicates).

@dataclass(frozen=True)
class VertexPersistence:
    vertex: int
    needs_cycles = False

    def __str__(self):
        return f"vertex:{self.vertex}"

    def __call__(self, diagram: PersistenceDiagram, complex_: FilteredComplex) -> float:
        return persistence_at_vertex(diagram, self.vertex)


@dataclass(frozen=True)
class SimplexPersistence:
    simplex: Simplex
    needs_cycles = False

    def __str__(self):
        return "simplex:" + "-".join(str(v) for v in self.simplex)

    def __call__(self, diagram, complex_) -> float:
        return persistence_at_simplex(diagram, self.simplex)


@dataclass(frozen=True)
class CyclePersistence:
    cycle: FrozenSet[Simplex]
    needs_cycles = True

    def __str__(self):
        return f"cycle:{len(self.cycle)}-simplices"

    def __call__(self, diagram, complex_) -> float:
        return persistence_of_cycle(diagram, self.cycle)


@dataclass(frozen=True)
class MaxPersistence:
    needs_cycles = False

    def __str__(self):
        return "max-persistence"

    def __call__(self, diagram, complex_) -> float:
        return max_persistence(diagram)


@dataclass(frozen=True)
class RegionLongestBar:
    region: Quadrant
    needs_cycles = False

    def __str__(self):
        return f"region:{self.region.sign_u:+d}{self.region.sign_v:+d}"

    def __call__(self, diagram, complex_) -> float:
        uv = getattr(complex_, 'uv', None)
        if uv is None:
            raise TopologyError("Region functionals need a complex with vertex positions (torus).")
        return region_longest_bar(diagram, lambda v: self.region(*uv[v]))


# ----------------------------------------------------------------------
# Computations H
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LineGraphLowerStar:
    n_vertices: int
    name = 'line-graph-lower-star'

    @property
    def arity(self) -> int:
        return self.n_vertices

    def build(self, a: np.ndarray) -> FilteredComplex:
        return lower_star(line_graph_skeleton(self.n_vertices), a)


@dataclass(frozen=True)
class CurveDistance:
    n_vertices: int
    max_degree: int = 1
    name = 'curve'

    @property
    def arity(self) -> int:
        return 2 * self.n_vertices

    def build(self, a: np.ndarray) -> FilteredComplex:
        return curve_complex(PointCloud.from_flat(a, 2), self.max_degree)


@dataclass(frozen=True)
class RipsOfCloud:
    n_points: int
    max_scale: float
    dim: int = 2
    max_degree: int = 1
    name = 'rips'

    @property
    def arity(self) -> int:
        return self.n_points * self.dim

    def build(self, a: np.ndarray) -> FilteredComplex:
        return rips(PointCloud.from_flat(a, self.dim), self.max_scale, self.max_degree)


@dataclass(frozen=True)
class TorusLowerStar:
    n_points: int
    name = 'torus'

    @property
    def arity(self) -> int:
        return 3 * self.n_points

    def build(self, a: np.ndarray) -> FilteredComplex:
        return torus_mesh(TorusSample.from_flat(a))


@dataclass(frozen=True, eq=False)
class DensityThresholdRips:
    """Fixed cloud; the parameters are (delta, epsilon) of the density threshold."""

    cloud: PointCloud
    max_scale: float
    max_degree: int = 1
    name = 'density-threshold-rips'
    arity = 2

    def build(self, a: np.ndarray) -> FilteredComplex:
        delta, epsilon = float(a[0]), float(a[1])
        kept = density_threshold(self.cloud, max(delta, 0.0), epsilon)
        if len(kept) == 0:
            raise EmptyInputError(f"No point survives the threshold (delta={delta}, epsilon={epsilon}).")
        return rips(kept, self.max_scale, self.max_degree)


@dataclass(frozen=True, eq=False)
class SummarySpec:
    """h = functional o computation, evaluated in homology degree `degree`."""

    computation: object
    functional: Callable
    degree: int = 0
    essential_mode: EssentialMode = EXTENDED
    label: str = ''

    @property
    def arity(self) -> int:
        return self.computation.arity

    @property
    def summary_id(self) -> str:
        return self.label or f"{self.computation.name}:{self.functional}"

    def diagram(self, a: Sequence[float]) -> Optional[PersistenceDiagram]:
        return compute_diagram(self, a)

    def __call__(self, a: Sequence[float]) -> float:
        return evaluate(self, a)


def _check_arity(summary: SummarySpec, a) -> np.ndarray:
    vector = np.asarray(a, dtype=float).reshape(-1)
    if vector.shape[0] != summary.arity:
        raise ArityError(
            f"{summary.computation.name} expects {summary.arity} parameters, got {vector.shape[0]}."
        )
    return vector


def _diagram_of(summary: SummarySpec, complex_: FilteredComplex) -> PersistenceDiagram:
    if summary.degree == 0 and not summary.functional.needs_cycles:
        return zero_dim(complex_, summary.essential_mode)
    diagrams = reduce(
        complex_,
        max_degree=summary.degree,
        want_cycles=summary.functional.needs_cycles,
        essential_mode=summary.essential_mode,
    )
    return diagrams[summary.degree]


def compute_diagram(summary: SummarySpec, a: Sequence[float]) -> Optional[PersistenceDiagram]:
    """H(a); None stands for the empty state."""
    vector = _check_arity(summary, a)
    try:
        return _diagram_of(summary, summary.computation.build(vector))
    except EMPTY_STATE_ERRORS as exc:
        logger.debug("Empty state for %s: %s", summary.summary_id, exc)
        return None


def evaluate(summary: SummarySpec, a: Sequence[float]) -> float:
    """
    h(a) = p(H(a)).

    Only an arity mismatch raises; pipeline failures give the empty state, 0.
    """
    vector = _check_arity(summary, a)
    try:
        complex_ = summary.computation.build(vector)
        diagram = _diagram_of(summary, complex_)
    except EMPTY_STATE_ERRORS as exc:
        logger.debug("Empty state for %s: %s", summary.summary_id, exc)
        return 0.0
    return float(summary.functional(diagram, complex_))


# ----------------------------------------------------------------------
# Built-in test function on the torus
# ----------------------------------------------------------------------

def torus_test_function(u, v):
    """f(u, v) = sin(u) sin(v) (1 - 0.9 * [u < 0 and v < 0])."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    damp = np.where((u < 0) & (v < 0), 0.1, 1.0)
    return np.sin(u) * np.sin(v) * damp


def sample_torus(n: int, seed: int, noise: float = 0.0) -> TorusSample:
    """
    n points (u, v) uniform on [-pi, pi)^2 with z = torus_test_function(u, v),
    plus Gaussian noise of standard deviation `noise` on z.
    """
    rng = np.random.default_rng(seed)
    uv = rng.uniform(-math.pi, math.pi, size=(n, 2))
    z = torus_test_function(uv[:, 0], uv[:, 1])
    if noise > 0:
        z = z + rng.normal(0.0, noise, size=n)
    return TorusSample(uv, z)
