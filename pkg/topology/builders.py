"""
Builders: parameter vectors -> filtered complexes.

Every builder returns a complex that passes `FilteredComplex.validate()` by
construction. Vertex ids are dense integers 0..N-1 in input order.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.spatial import Delaunay, distance

from .complex import FilteredComplex, Simplex
from .exceptions import (
    ArityError,
    DegeneracyError,
    EmptyInputError,
    InvalidMetricError,
    TooSmallError,
    TopologyError,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


# ----------------------------------------------------------------------
# Input types
# ----------------------------------------------------------------------

@dataclass
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1 and points.size == 0:
            points = points.reshape(0, 2)
        if points.ndim == 1:
            # a list of scalars is a cloud in R^1
            points = points.reshape(-1, 1)
        if points.ndim != 2:
            raise ArityError("Points must all have the same dimension.")
        if not np.all(np.isfinite(points)):
            raise TopologyError("Point coordinates must be finite.")
        self.points = points

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_flat(cls, values: Sequence[float], dim: int = 2) -> 'PointCloud':
        """(x1, y1, x2, y2, ...) -> cloud; the layout of curve parameter vectors."""
        arr = np.asarray(values, dtype=float)
        if arr.size % dim:
            raise ArityError(f"{arr.size} coordinates do not split into points of dimension {dim}.")
        return cls(arr.reshape(-1, dim))

    def flat(self) -> np.ndarray:
        return self.points.reshape(-1)


def wrap_angle(values: np.ndarray) -> np.ndarray:
    """Reduce angles into the fundamental domain [-pi, pi)."""
    return np.mod(np.asarray(values, dtype=float) + math.pi, TWO_PI) - math.pi


@dataclass
class TorusSample:
    """Sample (u_i, v_i, z_i) of a function on the flat torus [-pi, pi)^2."""

    uv: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        uv = np.asarray(self.uv, dtype=float).reshape(-1, 2)
        z = np.asarray(self.z, dtype=float).reshape(-1)
        if uv.shape[0] != z.shape[0]:
            raise ArityError(f"{uv.shape[0]} sample points but {z.shape[0]} function values.")
        if not (np.all(np.isfinite(uv)) and np.all(np.isfinite(z))):
            raise TopologyError("Torus sample must be finite.")
        self.uv = wrap_angle(uv)
        self.z = z

    def __len__(self):
        return self.z.shape[0]

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> 'TorusSample':
        """(u1, v1, z1, u2, v2, z2, ...) -> sample."""
        arr = np.asarray(values, dtype=float)
        if arr.size % 3:
            raise ArityError(f"{arr.size} values do not split into (u, v, z) triples.")
        arr = arr.reshape(-1, 3)
        return cls(arr[:, :2], arr[:, 2])

    def flat(self) -> np.ndarray:
        return np.column_stack([self.uv, self.z]).reshape(-1)


@dataclass
class Skeleton:
    """A simplicial complex without filtration values."""

    n_vertices: int
    simplices: List[Simplex] = field(default_factory=list)


class TorusComplex(FilteredComplex):
    """Lower-star complex on a torus triangulation; `uv` holds every vertex position."""

    def __init__(self, values=None, uv: Optional[np.ndarray] = None):
        super().__init__(values)
        self.uv = np.zeros((0, 2)) if uv is None else uv

    @classmethod
    def from_table(cls, table: Dict[Simplex, float], uv: np.ndarray) -> 'TorusComplex':
        complex_ = cls(uv=uv)
        complex_._values = table
        return complex_


# ----------------------------------------------------------------------
# Lower-star filtrations
# ----------------------------------------------------------------------

def lower_star(skeleton: Skeleton, vertex_values: Sequence[float]) -> FilteredComplex:
    """Each vertex gets its value; every other simplex the max over its vertices."""
    values = [float(v) for v in vertex_values]
    if len(values) != skeleton.n_vertices:
        raise ArityError(
            f"Skeleton has {skeleton.n_vertices} vertices but {len(values)} values were given."
        )
    if not all(math.isfinite(v) for v in values):
        raise TopologyError("Vertex values must be finite.")
    table: Dict[Simplex, float] = {}
    for simplex in skeleton.simplices:
        table[simplex] = max(values[v] for v in simplex)
    return FilteredComplex.from_trusted(table)


def line_graph_skeleton(n: int) -> Skeleton:
    """Path v0 - v1 - ... - v(n-1)."""
    if n < 1:
        raise EmptyInputError("A line graph needs at least one vertex.")
    simplices = [Simplex.from_sorted((i,)) for i in range(n)]
    simplices += [Simplex.from_sorted((i, i + 1)) for i in range(n - 1)]
    return Skeleton(n, simplices)


def full_skeleton(n: int, max_dim: int) -> Skeleton:
    """All simplices of dimension <= max_dim on n vertices."""
    if n < 1:
        raise EmptyInputError("A full complex needs at least one vertex.")
    simplices = []
    for size in range(1, max_dim + 2):
        simplices.extend(Simplex.from_sorted(s) for s in combinations(range(n), size))
    return Skeleton(n, simplices)


def line_graph(vertex_values: Sequence[float]) -> FilteredComplex:
    return lower_star(line_graph_skeleton(len(vertex_values)), vertex_values)


# ----------------------------------------------------------------------
# Distance-to-curve and Rips filtrations
# ----------------------------------------------------------------------

def _expand_cliques(n: int, dist: np.ndarray, edge_ok: np.ndarray, max_dim: int) -> Dict[Simplex, float]:
    """
    Flag complex of the graph `edge_ok` up to dimension max_dim, each simplex
    valued by its largest edge value.
    """
    table: Dict[Simplex, float] = {Simplex.from_sorted((i,)): 0.0 for i in range(n)}
    if max_dim < 1:
        return table
    upper = [{int(j) for j in np.flatnonzero(edge_ok[i, i + 1:]) + i + 1} for i in range(n)]

    def grow(simplex: tuple, value: float, candidates: set):
        table[Simplex.from_sorted(simplex)] = value
        if len(simplex) > max_dim:
            return
        for v in sorted(candidates):
            grown = max(value, max(dist[u, v] for u in simplex))
            grow(simplex + (v,), float(grown), candidates & upper[v])

    for i in range(n):
        for j in sorted(upper[i]):
            grow((i, j), float(dist[i, j]), upper[i] & upper[j])
    return table


def curve_complex(vertices, max_degree: int = 1) -> FilteredComplex:
    """
    Distance-to-curve filtration of the full complex on the curve's vertices.

    Vertices and consecutive edges (v_i, v_i+1) sit at 0, every other edge at
    the Euclidean distance of its endpoints, higher simplices at their
    largest edge. The curve is open: the last vertex is not joined to the first.
    """
    cloud = vertices if isinstance(vertices, PointCloud) else PointCloud(vertices)
    n = len(cloud)
    if n < 3:
        raise TooSmallError(f"A curve complex needs at least 3 vertices, got {n}.")
    dist = distance.squareform(distance.pdist(cloud.points))
    idx = np.arange(n - 1)
    dist[idx, idx + 1] = 0.0
    dist[idx + 1, idx] = 0.0
    edge_ok = np.ones((n, n), dtype=bool)
    table = _expand_cliques(n, dist, edge_ok, max_degree + 1)
    logger.debug("curve_complex: %d vertices, %d simplices", n, len(table))
    return FilteredComplex.from_trusted(table)


def check_metric(matrix: np.ndarray) -> np.ndarray:
    dist = np.asarray(matrix, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise InvalidMetricError("Distance matrix must be square.")
    if not np.all(np.isfinite(dist)):
        raise InvalidMetricError("Distances must be finite.")
    if not np.array_equal(dist, dist.T):
        raise InvalidMetricError("Distance matrix is not symmetric.")
    if np.any(dist < 0):
        raise InvalidMetricError("Distances must be non-negative.")
    if np.any(np.diag(dist) != 0):
        raise InvalidMetricError("Distance matrix must have a zero diagonal.")
    return dist


def rips(source: Union[PointCloud, np.ndarray], max_scale: float, max_degree: int = 1) -> FilteredComplex:
    """
    Rips filtration: vertices at 0, edges at their length when <= max_scale,
    higher simplices (up to dimension max_degree + 1) at their longest edge.

    `source` is a PointCloud or a distance matrix.
    """
    if max_scale < 0 or not math.isfinite(max_scale):
        raise TopologyError(f"max_scale must be finite and non-negative, got {max_scale}.")
    if isinstance(source, PointCloud):
        dist = distance.squareform(distance.pdist(source.points)) if len(source) else np.zeros((0, 0))
    else:
        dist = check_metric(source)
    n = dist.shape[0]
    edge_ok = dist <= max_scale
    table = _expand_cliques(n, dist, edge_ok, max_degree + 1) if n else {}
    logger.debug("rips: %d points, scale %.6g, %d simplices", n, max_scale, len(table))
    return FilteredComplex.from_trusted(table)


# ----------------------------------------------------------------------
# Periodic Delaunay triangulation of the flat torus
# ----------------------------------------------------------------------

_TILE_OFFSETS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]
_CENTRE_TILE = _TILE_OFFSETS.index((0, 0))


def _tie_break(n: int) -> np.ndarray:
    """Index-determined displacement that removes cocircular ties."""
    golden = math.pi * (3 - math.sqrt(5))
    angles = golden * np.arange(1, n + 1)
    radii = 1e-9 * TWO_PI * (1 + np.arange(n) / max(n, 1))
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def _canonical(corners) -> tuple:
    """
    Key of a periodic cell given as (id, ox, oy) corners: translate so each
    corner in turn has offset (0, 0) and keep the smallest sorted form.
    """
    forms = []
    for _, bx, by in corners:
        forms.append(tuple(sorted((i, ox - bx, oy - by) for i, ox, oy in corners)))
    return min(forms)


def periodic_delaunay(uv: np.ndarray) -> List[tuple]:
    """
    Triangles of the Delaunay triangulation of the flat torus, each as a
    canonical tuple of three (vertex id, tile x, tile y) corners.
    """
    n = uv.shape[0]
    points = wrap_angle(uv) + _tie_break(n)
    tiled = np.concatenate([points + TWO_PI * np.array(offset) for offset in _TILE_OFFSETS])
    try:
        triangulation = Delaunay(tiled)
    except Exception as exc:  # qhull raises its own error type
        raise DegeneracyError(f"Delaunay triangulation failed: {exc}") from exc

    cells = {}
    for simplex in triangulation.simplices:
        tiles = simplex // n
        if not np.any(tiles == _CENTRE_TILE):
            continue
        corners = [
            (int(p % n), *_TILE_OFFSETS[int(t)]) for p, t in zip(simplex, tiles)
        ]
        cells.setdefault(_canonical(corners), corners)
    return list(cells)


def _edges_of(triangle: tuple) -> List[tuple]:
    return [_canonical([triangle[a], triangle[b]]) for a, b in ((0, 1), (0, 2), (1, 2))]


def torus_mesh(sample: TorusSample) -> TorusComplex:
    """
    Lower-star filtration by z of the periodic Delaunay triangulation of the
    sample's (u, v) positions.

    The triangulation is computed on a 3x3 tiling of the fundamental domain
    and mapped back to it. When the result is not a simplicial complex
    (possible for very sparse samples, where two cells share the same vertex
    set) it is barycentrically subdivided; new vertices take the value of the
    cell they subdivide, which leaves the sublevel-set homology unchanged.
    """
    n = len(sample)
    if n < 4:
        raise TooSmallError(f"A torus mesh needs at least 4 points, got {n}.")
    triangles = periodic_delaunay(sample.uv)

    edge_count: Dict[tuple, int] = {}
    for tri in triangles:
        for edge in _edges_of(tri):
            edge_count[edge] = edge_count.get(edge, 0) + 1
    if len(triangles) != 2 * n or any(c != 2 for c in edge_count.values()):
        raise DegeneracyError(
            f"Periodic triangulation is not a closed surface ({n} vertices, "
            f"{len(edge_count)} edges, {len(triangles)} triangles)."
        )

    z = sample.z
    id_triangles = [tuple(sorted(c[0] for c in tri)) for tri in triangles]
    id_edges = [tuple(sorted(c[0] for c in edge)) for edge in edge_count]
    simplicial = (
        all(len(set(t)) == 3 for t in id_triangles)
        and len(set(id_triangles)) == len(id_triangles)
        and len(set(id_edges)) == len(id_edges)
    )
    if simplicial:
        table: Dict[Simplex, float] = {Simplex.from_sorted((i,)): float(z[i]) for i in range(n)}
        for t in id_edges + id_triangles:
            table[Simplex.from_sorted(t)] = float(max(z[i] for i in t))
        logger.debug("torus_mesh: %d vertices, %d triangles", n, len(id_triangles))
        return TorusComplex.from_table(table, sample.uv.copy())
    return _subdivided_torus(sample, triangles, list(edge_count))


def _subdivided_torus(sample: TorusSample, triangles: List[tuple], edges: List[tuple]) -> TorusComplex:
    n = len(sample)
    z, uv = sample.z, sample.uv
    if any(e[0][0] == e[1][0] for e in edges):
        raise DegeneracyError("Periodic triangulation has an edge from a point to its own translate.")

    def position(corners) -> np.ndarray:
        pts = [uv[i] + TWO_PI * np.array((ox, oy)) for i, ox, oy in corners]
        return wrap_angle(np.mean(pts, axis=0))

    values = list(map(float, z))
    positions = [uv[i] for i in range(n)]
    edge_ids = {}
    for edge in edges:
        edge_ids[edge] = len(values)
        values.append(max(values[c[0]] for c in edge))
        positions.append(position(edge))

    table: Dict[Simplex, float] = {}

    def put(*ids):
        simplex = Simplex(ids)
        table[simplex] = max(values[i] for i in simplex)

    for i in range(n):
        put(i)
    for edge, e in edge_ids.items():
        put(e)
        for corner in edge:
            put(corner[0], e)
    for tri in triangles:
        t = len(values)
        values.append(max(values[c[0]] for c in tri))
        positions.append(position(tri))
        put(t)
        for corner in tri:
            put(corner[0], t)
        for a, b in ((0, 1), (0, 2), (1, 2)):
            e = edge_ids[_canonical([tri[a], tri[b]])]
            put(e, t)
            put(tri[a][0], e, t)
            put(tri[b][0], e, t)
    logger.debug("torus_mesh: subdivided %d triangles into %d simplices", len(triangles), len(table))
    return TorusComplex.from_table(table, np.array(positions))


# ----------------------------------------------------------------------
# De-noising and synthetic clouds
# ----------------------------------------------------------------------

def density_threshold(points: PointCloud, delta: float, epsilon: float) -> PointCloud:
    """
    Keep the points y whose closed delta-ball holds at least a fraction
    epsilon of the cloud (y itself included).
    """
    if delta < 0:
        raise TopologyError(f"delta must be non-negative, got {delta}.")
    n = len(points)
    if n == 0:
        return PointCloud(np.zeros((0, points.dim)))
    dist = distance.squareform(distance.pdist(points.points))
    counts = np.count_nonzero(dist <= delta, axis=1)
    keep = counts / n >= epsilon
    logger.debug("density_threshold: kept %d of %d points (delta=%g, epsilon=%g)", int(keep.sum()), n, delta, epsilon)
    return PointCloud(points.points[keep])


def noisy_circle(n: int = 150, radius: float = 1.0, noise: float = 0.05, outliers: int = 3,
                 outlier_radius: float = 0.2, seed: int = 0) -> PointCloud:
    """
    n points from a circle with bounded radial noise, followed by `outliers`
    points spread evenly on a small interior circle.
    """
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, TWO_PI, n)
    radii = radius * (1 + rng.uniform(-noise, noise, n))
    ring = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    inner_angles = math.pi / 2 + TWO_PI * np.arange(outliers) / max(outliers, 1)
    inner = outlier_radius * radius * np.column_stack([np.cos(inner_angles), np.sin(inner_angles)])
    return PointCloud(np.concatenate([ring, inner]) if outliers else ring)
