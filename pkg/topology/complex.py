"""
Filtered simplicial complexes.

A FilteredComplex stores a finite abstract simplicial complex K together with
an order-preserving function f: K -> R. Downstream code never looks at f
directly; it consumes `sorted_filtration()`, a total order on simplices that
refines the sublevel-set order so that every prefix is a subcomplex.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .exceptions import ComplexValidationError, InvalidSimplexError

logger = logging.getLogger(__name__)


class Simplex(tuple):
    """
    A simplex as its strictly increasing tuple of vertex ids.

    Being a tuple keeps simplices hashable and gives lexicographic comparison
    for free, which is the last key of the filtration order.
    """

    __slots__ = ()

    def __new__(cls, vertices: Iterable[int]):
        verts = tuple(sorted(vertices))
        if not verts:
            raise InvalidSimplexError("A simplex needs at least one vertex.")
        for v in verts:
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise InvalidSimplexError(f"Vertex ids must be non-negative integers, got {v!r}.")
        for a, b in zip(verts, verts[1:]):
            if a == b:
                raise InvalidSimplexError(f"Repeated vertex {a} in simplex {verts}.")
        return super().__new__(cls, verts)

    @classmethod
    def from_sorted(cls, vertices: Tuple[int, ...]) -> 'Simplex':
        """Wrap an already sorted, duplicate-free tuple without re-checking it."""
        return tuple.__new__(cls, vertices)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(self)

    @property
    def dimension(self) -> int:
        return len(self) - 1

    def facets(self) -> List['Simplex']:
        """Codimension-one faces (empty for a vertex)."""
        if len(self) == 1:
            return []
        return [Simplex.from_sorted(self[:i] + self[i + 1:]) for i in range(len(self))]

    def faces(self) -> Iterator['Simplex']:
        """All nonempty proper faces."""
        for size in range(1, len(self)):
            for face in combinations(self, size):
                yield Simplex.from_sorted(face)

    def __repr__(self):
        return f"Simplex({list(self)})"


@dataclass(frozen=True)
class MissingFace:
    face: Simplex
    simplex: Simplex

    def __str__(self):
        return f"face {list(self.face)} of {list(self.simplex)} is missing"


@dataclass(frozen=True)
class MonotonicityViolation:
    face: Simplex
    simplex: Simplex
    face_value: float
    value: float

    def __str__(self):
        return (
            f"f({list(self.face)}) = {self.face_value} > "
            f"f({list(self.simplex)}) = {self.value}"
        )


@dataclass
class ValidationReport:
    missing_faces: List[MissingFace] = field(default_factory=list)
    monotonicity: List[MonotonicityViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing_faces and not self.monotonicity

    @property
    def violations(self) -> list:
        return [*self.missing_faces, *self.monotonicity]


def filtration_key(simplex: Simplex, value: float):
    """Sort key: filtration value, then dimension, then vertex list."""
    return (value, len(simplex), simplex)


class FilteredComplex:
    """
    Finite abstract simplicial complex with real filtration values.

    Construction is single-writer through `add_simplex`; once built, a complex
    is treated as immutable and may be shared across workers.
    """

    def __init__(self, values: Optional[Mapping[Iterable[int], float]] = None):
        self._values: Dict[Simplex, float] = {}
        self._order: Optional[List[Simplex]] = None
        self._valid = False
        if values:
            for vertices, value in values.items():
                self.add_simplex(vertices, value)

    @classmethod
    def from_trusted(cls, values: Dict[Simplex, float]) -> 'FilteredComplex':
        """
        Build from a dict of Simplex -> float produced by a builder.

        The dict is adopted as-is; validation still runs lazily on first use
        of `sorted_filtration`.
        """
        complex_ = cls()
        complex_._values = values
        return complex_

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def add_simplex(self, vertices: Iterable[int], value: float) -> Simplex:
        """Store a simplex with the given value; re-adding replaces the value."""
        simplex = vertices if isinstance(vertices, Simplex) else Simplex(vertices)
        value = float(value)
        if not math.isfinite(value):
            raise InvalidSimplexError(f"Filtration value of {list(simplex)} must be finite, got {value}.")
        self._values[simplex] = value
        self._order = None
        self._valid = False
        return simplex

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    def __len__(self):
        return len(self._values)

    def __contains__(self, simplex):
        try:
            key = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
        except (InvalidSimplexError, TypeError):
            return False
        return key in self._values

    def __iter__(self):
        return iter(self._values)

    def __eq__(self, other):
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return self._values == other._values

    def __repr__(self):
        return f"FilteredComplex({len(self._values)} simplices, dim={self.dimension})"

    @property
    def simplices(self) -> List[Simplex]:
        return list(self._values)

    @property
    def values(self) -> Mapping[Simplex, float]:
        return MappingProxyType(self._values)

    def value(self, simplex: Iterable[int]) -> float:
        key = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
        return self._values[key]

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self._values), default=-1)

    def vertices(self) -> List[int]:
        return sorted(s[0] for s in self._values if len(s) == 1)

    def max_value(self) -> float:
        return max(self._values.values(), default=0.0)

    def min_value(self) -> float:
        return min(self._values.values(), default=0.0)

    def skeleton(self, dim: int) -> 'FilteredComplex':
        """Sub-complex of simplices of dimension <= dim."""
        return FilteredComplex.from_trusted(
            {s: v for s, v in self._values.items() if len(s) - 1 <= dim}
        )

    # ------------------------------------------------------------------
    # Validation and ordering
    # ------------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Report every missing face and every facet whose value exceeds its coface."""
        report = ValidationReport()
        values = self._values
        seen_missing = set()
        for simplex, value in values.items():
            if len(simplex) == 1:
                continue
            for face in simplex.faces():
                if face not in values and face not in seen_missing:
                    seen_missing.add(face)
                    report.missing_faces.append(MissingFace(face, simplex))
            for facet in simplex.facets():
                facet_value = values.get(facet)
                if facet_value is not None and facet_value > value:
                    report.monotonicity.append(
                        MonotonicityViolation(facet, simplex, facet_value, value)
                    )
        self._valid = report.ok
        return report

    def check(self) -> None:
        """Raise ComplexValidationError unless validate() is ok."""
        if self._valid:
            return
        report = self.validate()
        if not report.ok:
            raise ComplexValidationError(report.violations)

    def sorted_filtration(self) -> List[Simplex]:
        """
        Simplices ordered by (value, dimension, vertex list).

        Faces never come after their cofaces: a face has value <= and
        dimension < its coface, so every prefix is a subcomplex.
        """
        if self._order is None:
            self.check()
            values = self._values
            self._order = sorted(values, key=lambda s: (values[s], len(s), s))
            logger.debug("Sorted filtration of %d simplices", len(self._order))
        return list(self._order)
