"""
Bottleneck distance between persistence diagrams.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .exceptions import TopologyError
from .reduction import PersistenceDiagram

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


@dataclass
class AugmentedDiagram:
    """
    Off-diagonal points of a diagram, split by whether death is finite.

    The diagonal is implicit with infinite multiplicity, so points with
    birth == death are dropped on construction.
    """

    finite: List[Point] = field(default_factory=list)
    infinite: List[float] = field(default_factory=list)

    @classmethod
    def of(cls, diagram: Union['AugmentedDiagram', PersistenceDiagram, Iterable[Point]]) -> 'AugmentedDiagram':
        if isinstance(diagram, AugmentedDiagram):
            return diagram
        points = diagram.points() if isinstance(diagram, PersistenceDiagram) else diagram
        augmented = cls()
        for birth, death in points:
            birth = float(birth)
            death = math.inf if death is None else float(death)
            if math.isnan(birth) or math.isnan(death) or death < birth:
                raise TopologyError(f"Diagram point ({birth}, {death}) must satisfy birth <= death.")
            if math.isinf(death):
                augmented.infinite.append(birth)
            elif death > birth:
                augmented.finite.append((birth, death))
        return augmented


def _infinite_cost(births: List[float], others: List[float]) -> float:
    # sorted order is an optimal bottleneck matching on the line
    return max((abs(a - b) for a, b in zip(sorted(births), sorted(others))), default=0.0)


def _feasible(cost: np.ndarray, half: np.ndarray, half_other: np.ndarray, t: float) -> bool:
    """
    Is there a matching with every cost <= t?

    Left vertices are the points of D then diagonal copies of the points of
    D'; right vertices are the points of D' then diagonal copies of D.
    """
    n, m = cost.shape
    size = n + m
    adjacency = np.zeros((size, size), dtype=bool)
    adjacency[:n, :m] = cost <= t
    adjacency[np.arange(n), m + np.arange(n)] = half <= t
    adjacency[n + np.arange(m), np.arange(m)] = half_other <= t
    # diagonal to diagonal is free
    adjacency[n:, m:] = True
    matching = maximum_bipartite_matching(csr_matrix(adjacency), perm_type='column')
    return bool(np.all(matching >= 0))


def bottleneck(first, second) -> float:
    """
    W_inf distance between two diagrams.

    Finite points may be matched to each other or to the diagonal; points
    at infinity are matched only among themselves, and differing counts of
    them give +inf.
    """
    a, b = AugmentedDiagram.of(first), AugmentedDiagram.of(second)
    if len(a.infinite) != len(b.infinite):
        return math.inf
    at_infinity = _infinite_cost(a.infinite, b.infinite)
    if not a.finite and not b.finite:
        return at_infinity

    p = np.asarray(a.finite, dtype=float).reshape(-1, 2)
    q = np.asarray(b.finite, dtype=float).reshape(-1, 2)
    cost = np.maximum(
        np.abs(p[:, None, 0] - q[None, :, 0]),
        np.abs(p[:, None, 1] - q[None, :, 1]),
    )
    half = (p[:, 1] - p[:, 0]) / 2
    half_other = (q[:, 1] - q[:, 0]) / 2

    candidates = np.unique(np.concatenate([cost.ravel(), half, half_other]))
    lo, hi = 0, len(candidates) - 1
    # matching everything to the diagonal is feasible at the largest half-persistence
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(cost, half, half_other, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    finite_cost = float(candidates[lo])
    logger.debug("bottleneck: %d x %d points, %d candidates", len(p), len(q), len(candidates))
    return max(finite_cost, at_infinity)
