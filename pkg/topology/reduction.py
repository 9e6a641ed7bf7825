"""
Persistence pairing by boundary-matrix reduction over Z/2.

`reduce` runs the standard column algorithm (with clearing) on the sorted
filtration and reports, for every pair, the creator (positive) simplex, the
killer (negative) simplex and optionally a representative cycle. `zero_dim`
is the union-find fast path for degree 0. Both pair the essential degree-0
class of each connected component with the component's maximum value
(extended persistence) or with a caller-supplied truncation value M.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence

from .complex import FilteredComplex, Simplex
from .exceptions import InvalidTruncationError, TopologyError

logger = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class EssentialMode:
    """How essential classes get a finite death: 'extended' (min-max) or 'truncate' at M."""

    kind: str = 'extended'
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ('extended', 'truncate'):
            raise TopologyError(f"Unknown essential mode: {self.kind}")
        if self.kind == 'truncate' and (self.value is None or not math.isfinite(self.value)):
            raise InvalidTruncationError("Truncation needs a finite value M.")

    @classmethod
    def extended(cls) -> 'EssentialMode':
        return cls('extended')

    @classmethod
    def truncate(cls, value: float) -> 'EssentialMode':
        return cls('truncate', float(value))

    @classmethod
    def parse(cls, text: str) -> 'EssentialMode':
        """Parse 'extended' or 'truncate:M' (as used by the CLI and config files)."""
        text = text.strip().lower()
        if text == 'extended':
            return cls.extended()
        if text.startswith('truncate'):
            _, _, raw = text.partition(':')
            try:
                return cls.truncate(float(raw))
            except ValueError:
                raise InvalidTruncationError(f"Truncation value must be a number, got {raw!r}.")
        raise TopologyError(f"Unknown essential mode: {text!r} (expected 'extended' or 'truncate:M')")

    @property
    def is_truncated(self) -> bool:
        return self.kind == 'truncate'

    def __str__(self):
        return 'extended' if self.kind == 'extended' else f"truncate:{self.value!r}"


EXTENDED = EssentialMode.extended()


@dataclass(frozen=True)
class PersistencePair:
    birth: float
    death: float
    degree: int
    creator: Simplex
    killer: Optional[Simplex] = None
    cycle: Optional[FrozenSet[Simplex]] = None
    essential: bool = False

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.death)


@dataclass
class PersistenceDiagram:
    """Multiset of pairs in one degree; zero-persistence pairs are kept."""

    degree: int
    pairs: List[PersistencePair] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def offdiagonal(self) -> List[PersistencePair]:
        return offdiagonal(self)

    def finite_pairs(self) -> List[PersistencePair]:
        return [p for p in self.pairs if p.is_finite]

    def points(self) -> List[tuple]:
        """(birth, death) of every pair, diagonal points included."""
        return [(p.birth, p.death) for p in self.pairs]

    def multiplicity(self, birth: float, death: float) -> int:
        return sum(1 for p in self.pairs if p.birth == birth and p.death == death)

    def pair_created_by(self, simplex) -> Optional[PersistencePair]:
        key = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
        for pair in self.pairs:
            if pair.creator == key:
                return pair
        return None


def offdiagonal(diagram: PersistenceDiagram) -> List[PersistencePair]:
    """Pairs with positive persistence, longest first, ties by (birth, creator)."""
    return sorted(
        (p for p in diagram.pairs if p.persistence > 0),
        key=lambda p: (-p.persistence, p.birth, p.creator),
    )


# ----------------------------------------------------------------------
# Degree 0 helpers
# ----------------------------------------------------------------------

class _UnionFind:
    """Union-find on vertex ids where the root is always the oldest vertex."""

    def __init__(self):
        self.parent: Dict[int, int] = {}
        self.rank: Dict[int, int] = {}
        self.top: Dict[int, float] = {}

    def add(self, v: int, position: int, value: float):
        self.parent[v] = v
        self.rank[v] = position
        self.top[v] = value

    def find(self, v: int) -> int:
        root = v
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def roots(self) -> List[int]:
        return [v for v, p in self.parent.items() if v == p]


def _check_truncation(complex_: FilteredComplex, mode: EssentialMode):
    if mode.is_truncated and len(complex_) and mode.value < complex_.max_value():
        raise InvalidTruncationError(
            f"Truncation value {mode.value} is below the largest filtration value {complex_.max_value()}."
        )


def _sweep_components(order: Sequence[Simplex], values) -> tuple:
    """
    Elder-rule sweep. Returns (finite pairs, union-find) where the union-find
    holds, per surviving root, the largest value seen in its component.
    """
    uf = _UnionFind()
    pairs = []
    for position, simplex in enumerate(order):
        value = values[simplex]
        if len(simplex) == 1:
            uf.add(simplex[0], position, value)
            continue
        root = uf.find(simplex[0])
        if len(simplex) == 2:
            other = uf.find(simplex[1])
            if other != root:
                # the root later in the filtration order is the younger component
                older, younger = (root, other) if uf.rank[root] < uf.rank[other] else (other, root)
                pairs.append(PersistencePair(
                    birth=values[Simplex.from_sorted((younger,))],
                    death=value,
                    degree=0,
                    creator=Simplex.from_sorted((younger,)),
                    killer=simplex,
                ))
                uf.parent[younger] = older
                root = older
        # values arrive in increasing order, so the latest simplex is the maximum
        uf.top[root] = value
    return pairs, uf


def _essential_zero_pairs(uf: _UnionFind, values, mode: EssentialMode) -> List[PersistencePair]:
    pairs = []
    for root in sorted(uf.roots(), key=lambda r: uf.rank[r]):
        creator = Simplex.from_sorted((root,))
        death = uf.top[root] if not mode.is_truncated else mode.value
        pairs.append(PersistencePair(
            birth=values[creator],
            death=death,
            degree=0,
            creator=creator,
            cycle=frozenset([creator]),
            essential=True,
        ))
    return pairs


def zero_dim(complex_: FilteredComplex, essential_mode: EssentialMode = EXTENDED) -> PersistenceDiagram:
    """
    Degree-0 diagram by union-find over the sorted filtration.

    An edge joining two components kills the younger one (later root in the
    filtration order); each surviving component is paired with its maximum
    filtration value, or with M when truncating.
    """
    _check_truncation(complex_, essential_mode)
    order = complex_.sorted_filtration()
    values = complex_.values
    pairs, uf = _sweep_components(order, values)
    pairs.extend(_essential_zero_pairs(uf, values, essential_mode))
    logger.debug("zero_dim: %d pairs from %d simplices", len(pairs), len(order))
    return PersistenceDiagram(degree=0, pairs=pairs)


# ----------------------------------------------------------------------
# Matrix reduction
# ----------------------------------------------------------------------

def reduce(
    complex_: FilteredComplex,
    max_degree: int,
    want_cycles: bool = False,
    essential_mode: EssentialMode = EXTENDED,
) -> List[PersistenceDiagram]:
    """
    Diagrams of degrees 0..max_degree by column reduction over Z/2.

    Columns are reduced from the top dimension down so that positive
    simplices found as pivots can be skipped (clearing). For a finite pair
    the representative cycle is the killer's reduced column; for an
    essential class it is the creator's accumulated column operations.
    """
    if max_degree < 0:
        raise TopologyError("max_degree must be non-negative.")
    _check_truncation(complex_, essential_mode)

    order = [s for s in complex_.sorted_filtration() if len(s) <= max_degree + 2]
    values = complex_.values
    index = {s: i for i, s in enumerate(order)}
    by_dim: Dict[int, List[int]] = {}
    for i, s in enumerate(order):
        by_dim.setdefault(len(s) - 1, []).append(i)

    diagrams = [PersistenceDiagram(degree=p) for p in range(max_degree + 1)]
    cleared = set()
    zero_columns: Dict[int, Optional[set]] = {}
    column_ops = 0

    for dim in range(max_degree + 1, 0, -1):
        pivot_of: Dict[int, int] = {}
        reduced: Dict[int, set] = {}
        history: Dict[int, set] = {}
        lows = set()
        for j in by_dim.get(dim, ()):
            if j in cleared:
                continue
            column = {index[f] for f in order[j].facets()}
            ops = {j} if want_cycles else None
            while column:
                low = max(column)
                k = pivot_of.get(low)
                if k is None:
                    break
                column ^= reduced[k]
                column_ops += 1
                if ops is not None:
                    ops ^= history[k]
            if column:
                low = max(column)
                pivot_of[low] = j
                reduced[j] = column
                if ops is not None:
                    history[j] = ops
                lows.add(low)
            elif dim <= max_degree:
                zero_columns[j] = ops

        for low, j in pivot_of.items():
            creator, killer = order[low], order[j]
            diagrams[dim - 1].pairs.append(PersistencePair(
                birth=values[creator],
                death=values[killer],
                degree=dim - 1,
                creator=creator,
                killer=killer,
                cycle=frozenset(order[i] for i in reduced[j]) if want_cycles else None,
            ))
        cleared = lows

        # essential classes of this dimension: zero columns that were not cleared
        if dim <= max_degree:
            death = essential_mode.value if essential_mode.is_truncated else INF
            for j in by_dim.get(dim, ()):
                if j in zero_columns:
                    ops = zero_columns[j]
                    diagrams[dim].pairs.append(PersistencePair(
                        birth=values[order[j]],
                        death=death,
                        degree=dim,
                        creator=order[j],
                        cycle=frozenset(order[i] for i in ops) if ops is not None else None,
                        essential=True,
                    ))

    # degree 0: every vertex is positive; unpaired ones get min-max (or truncated) deaths
    if by_dim.get(0):
        _, uf = _sweep_components(complex_.sorted_filtration(), values)
        paired = {pair.creator for pair in diagrams[0].pairs}
        essential = _essential_zero_pairs(uf, values, essential_mode)
        diagrams[0].pairs.extend(p for p in essential if p.creator not in paired)

    for diagram in diagrams:
        diagram.pairs.sort(key=lambda p: (index[p.creator], p.death))
    logger.debug(
        "reduce: %d simplices up to degree %d, %d column additions",
        len(order), max_degree, column_ops,
    )
    return diagrams
