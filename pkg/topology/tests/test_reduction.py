import math

import numpy as np
from django.test import SimpleTestCase

from topology.builders import PointCloud, curve_complex, full_skeleton, line_graph, lower_star, rips
from topology.complex import FilteredComplex, Simplex
from topology.exceptions import InvalidTruncationError, TopologyError
from topology.experiments import CURVE_VERTICES, LINE1_VALUES, LINE2_VALUES
from topology.reduction import EXTENDED, EssentialMode, reduce, zero_dim


def _rank_mod2(columns):
    pivots = {}
    rank = 0
    for column in columns:
        while column:
            top = column.bit_length() - 1
            if top not in pivots:
                pivots[top] = column
                rank += 1
                break
            column ^= pivots[top]
    return rank


def betti(simplices, degree):
    """Betti number of a simplicial complex over Z/2 by boundary ranks."""
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)

    def boundary_rank(p):
        if p == 0 or p not in by_dim:
            return 0
        index = {f: i for i, f in enumerate(by_dim.get(p - 1, []))}
        return _rank_mod2(sum(1 << index[f] for f in s.facets()) for s in by_dim[p])

    return len(by_dim.get(degree, [])) - boundary_rank(degree) - boundary_rank(degree + 1)


def alive(diagram, t):
    return sum(1 for p in diagram.pairs if p.birth <= t and (p.death > t or p.essential))


def boundary_is_zero(chain):
    counts = {}
    for s in chain:
        for f in s.facets():
            counts[f] = counts.get(f, 0) + 1
    return all(c % 2 == 0 for c in counts.values())


class EssentialModeTests(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(EssentialMode.parse('extended'), EXTENDED)
        self.assertEqual(EssentialMode.parse('truncate:2.5'), EssentialMode.truncate(2.5))
        self.assertEqual(str(EssentialMode.truncate(2.5)), 'truncate:2.5')

    def test_parse_rejects_garbage(self):
        with self.assertRaises(InvalidTruncationError):
            EssentialMode.parse('truncate:abc')
        with self.assertRaises(InvalidTruncationError):
            EssentialMode.parse('truncate:inf')
        with self.assertRaises(TopologyError):
            EssentialMode.parse('forever')


class LineGraphPersistenceTests(SimpleTestCase):
    def test_line1_degree_zero(self):
        diagram = zero_dim(line_graph(LINE1_VALUES))
        off = [(p.birth, p.death, tuple(p.creator)) for p in diagram.offdiagonal()]
        self.assertEqual(off, [(1.0, 20.0, (6,)), (9.9, 20.0, (4,)), (10.0, 13.0, (0,))])
        essential = [p for p in diagram.pairs if p.essential]
        self.assertEqual(len(essential), 1)
        self.assertEqual(essential[0].creator, (6,))
        # every vertex creates exactly one pair
        self.assertEqual(sorted(p.creator[0] for p in diagram.pairs), list(range(7)))

    def test_line1_killers(self):
        diagram = zero_dim(line_graph(LINE1_VALUES))
        self.assertEqual(diagram.pair_created_by((0,)).killer, (3, 4))
        self.assertEqual(diagram.pair_created_by((4,)).killer, (5, 6))

    def test_line2_degree_zero(self):
        diagram = zero_dim(line_graph(LINE2_VALUES))
        off = [(p.birth, p.death, tuple(p.creator)) for p in diagram.offdiagonal()]
        self.assertEqual(off, [(1.0, 15.0, (2,))])

    def test_swapping_the_two_minima_swaps_the_pairs(self):
        swapped = list(LINE1_VALUES)
        swapped[0], swapped[4] = swapped[4], swapped[0]
        diagram = zero_dim(line_graph(swapped))
        self.assertEqual(diagram.pair_created_by((4,)).persistence, 3.0)
        self.assertAlmostEqual(diagram.pair_created_by((0,)).persistence, 10.1)

    def test_truncation(self):
        diagram = zero_dim(line_graph(LINE2_VALUES), EssentialMode.truncate(100))
        self.assertEqual(diagram.pair_created_by((2,)).death, 100)
        with self.assertRaises(InvalidTruncationError):
            zero_dim(line_graph(LINE2_VALUES), EssentialMode.truncate(10))

    def test_union_find_matches_matrix_reduction(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            complex_ = line_graph(rng.normal(size=12))
            fast = zero_dim(complex_)
            slow = reduce(complex_, 0)[0]
            key = lambda p: (p.creator, p.birth, p.death)  # noqa: E731
            self.assertEqual(sorted(map(key, fast.pairs)), sorted(map(key, slow.pairs)))


class CurvePersistenceTests(SimpleTestCase):
    def setUp(self):
        self.complex = curve_complex(CURVE_VERTICES)

    def test_degree_one_pairs(self):
        diagram = reduce(self.complex, 1)[1]
        off = diagram.offdiagonal()
        self.assertEqual([tuple(p.creator) for p in off], [(0, 8), (2, 6)])
        self.assertAlmostEqual(off[0].birth, 0.2)
        self.assertAlmostEqual(off[0].death, 10.0)
        self.assertAlmostEqual(off[1].birth, 0.24)
        self.assertAlmostEqual(off[1].death, 2.0, places=3)

    def test_curve_has_no_essential_loop(self):
        diagram = reduce(self.complex, 1)[1]
        self.assertFalse(any(p.essential for p in diagram.pairs))

    def test_representative_cycles(self):
        diagram = reduce(self.complex, 1, want_cycles=True)[1]
        for pair in diagram.offdiagonal():
            self.assertIn(pair.creator, pair.cycle)
            self.assertTrue(boundary_is_zero(pair.cycle))
            self.assertTrue(all(len(s) == 2 for s in pair.cycle))


class ReductionTests(SimpleTestCase):
    def hollow_triangle(self):
        return FilteredComplex({
            (0,): 0, (1,): 0, (2,): 0,
            (0, 1): 1, (0, 2): 2, (1, 2): 3,
        })

    def test_essential_loop(self):
        dgm0, dgm1 = reduce(self.hollow_triangle(), 1, want_cycles=True)
        self.assertEqual(len(dgm1), 1)
        loop = dgm1.pairs[0]
        self.assertTrue(loop.essential)
        self.assertEqual(loop.birth, 3.0)
        self.assertTrue(math.isinf(loop.death))
        self.assertEqual(loop.cycle, frozenset(Simplex(s) for s in [(0, 1), (0, 2), (1, 2)]))
        self.assertEqual(sorted(dgm0.points()), [(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)])

    def test_essential_loop_truncated(self):
        dgm1 = reduce(self.hollow_triangle(), 1, essential_mode=EssentialMode.truncate(5))[1]
        self.assertEqual(dgm1.pairs[0].death, 5.0)

    def test_negative_degree(self):
        with self.assertRaises(TopologyError):
            reduce(self.hollow_triangle(), -1)

    def test_empty_complex(self):
        self.assertEqual([len(d) for d in reduce(FilteredComplex(), 1)], [0, 0])

    def test_rank_invariant_matches_homology_of_sublevel_sets(self):
        rng = np.random.default_rng(3)
        complexes = [lower_star(full_skeleton(6, 2), rng.normal(size=6)) for _ in range(3)]
        complexes += [rips(PointCloud(rng.uniform(size=(8, 2))), 0.6) for _ in range(3)]
        for complex_ in complexes:
            diagrams = reduce(complex_, 1)
            for t in sorted(set(complex_.values.values())):
                sublevel = [s for s, v in complex_.values.items() if v <= t]
                for degree in (0, 1):
                    self.assertEqual(alive(diagrams[degree], t), betti(sublevel, degree))

    def test_scale_and_shift_equivariance(self):
        values = np.array(LINE1_VALUES, dtype=float)
        base = reduce(line_graph(values), 0)[0]
        moved = reduce(line_graph(2.5 * values + 4), 0)[0]
        for p, q in zip(base.pairs, moved.pairs):
            self.assertEqual(p.creator, q.creator)
            self.assertAlmostEqual(2.5 * p.birth + 4, q.birth)
            self.assertAlmostEqual(2.5 * p.death + 4, q.death)
