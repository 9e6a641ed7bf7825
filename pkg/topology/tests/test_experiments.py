import csv
import json
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from topology.exceptions import TopologyError
from topology.experiments import (
    DENOISE_MAX_SCALE,
    LINE1_VALUES,
    ExperimentConfig,
    SummarySum,
    package_versions,
    run_experiment,
)
from topology.stabilize import read_sweep_csv
from topology.summaries import LineGraphLowerStar, SummarySpec, VertexPersistence

SLOW = os.environ.get('PHSTAB_SLOW_TESTS') == '1'


class ExperimentTestCase(SimpleTestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)

    def run_named(self, name, subdir='run', **kwargs):
        return run_experiment(ExperimentConfig(name=name, output_dir=self.dir / subdir, **kwargs))

    def read_csv(self, path):
        with open(path, newline='') as f:
            return list(csv.DictReader(f))


class ConfigTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(TopologyError):
            ExperimentConfig(name='line9', output_dir='x')
        with self.assertRaises(TopologyError):
            ExperimentConfig(name='line1', output_dir='x', trials=0)
        with self.assertRaises(TopologyError):
            ExperimentConfig(name='denoise', output_dir='x', deltas=[])

    def test_as_json(self):
        data = ExperimentConfig(name='line1', output_dir='out', alphas=[0.1]).as_json()
        self.assertEqual(data['output_dir'], 'out')
        self.assertEqual(data['alphas'], [0.1])
        json.dumps(data, allow_nan=False)

    def test_package_versions(self):
        versions = package_versions()
        self.assertIn('numpy', versions)
        self.assertIsNotNone(versions['numpy'])


class SummarySumTests(SimpleTestCase):
    def test_sum_of_vertex_persistences(self):
        computation = LineGraphLowerStar(7)
        total = SummarySum((SummarySpec(computation, VertexPersistence(4)),
                            SummarySpec(computation, VertexPersistence(0))))
        self.assertEqual(total.arity, 7)
        self.assertAlmostEqual(total(LINE1_VALUES), 13.1)


class LineExperimentTests(ExperimentTestCase):
    def test_line1_artifacts(self):
        result = self.run_named('line1', trials=4, alphas=[0.001, 0.002])
        self.assertEqual(result.directory, self.dir / 'run' / 'line1')
        self.assertEqual(result.files, ['g5.csv', 'g1.csv', 'sum.csv', 'line1.svg', 'manifest.json'])
        for name in result.files:
            self.assertTrue((result.directory / name).exists(), name)

        with open(result.directory / 'g5.csv', newline='') as f:
            rows = read_sweep_csv(f)
        self.assertEqual([r['alpha'] for r in rows], [0.001, 0.002])
        self.assertTrue(all(r['summary_id'] == 'g5' and r['trials'] == 4 for r in rows))
        self.assertAlmostEqual(rows[0]['mean'], 10.1, delta=0.01)

        manifest = json.loads((result.directory / 'manifest.json').read_text())
        self.assertEqual(manifest['experiment'], 'line1')
        self.assertEqual(manifest['seed'], 0)
        self.assertEqual(manifest['config']['trials'], 4)
        self.assertIn('numpy', manifest['versions'])
        points = manifest['results']['point_values']
        self.assertAlmostEqual(points['g5'], 10.1)
        self.assertEqual(points['g1'], 3.0)
        self.assertAlmostEqual(points['sum'], 13.1)

    def test_sum_is_the_sum_of_the_parts(self):
        result = self.run_named('line1', trials=6, alphas=[0.05])
        means = {}
        for label in ('g5', 'g1', 'sum'):
            with open(result.directory / f'{label}.csv', newline='') as f:
                means[label] = read_sweep_csv(f)[0]['mean']
        self.assertAlmostEqual(means['sum'], means['g5'] + means['g1'])

    def test_csvs_are_reproducible_and_independent_of_threads(self):
        first = self.run_named('line2', subdir='a', trials=5, alphas=[0.01, 0.05], seed=3)
        second = self.run_named('line2', subdir='b', trials=5, alphas=[0.01, 0.05], seed=3, n_jobs=2)
        for name in ('g2.csv', 'g3.csv', 'g4.csv', 'sum.csv'):
            self.assertEqual((first.directory / name).read_bytes(), (second.directory / name).read_bytes())

    def test_line2_point_values(self):
        result = self.run_named('line2', trials=2, alphas=[0.001])
        points = json.loads((result.directory / 'manifest.json').read_text())['results']['point_values']
        self.assertEqual(points, {'g2': 0.0, 'g3': 14.0, 'g4': 0.0, 'sum': 14.0})

    def test_curve(self):
        result = self.run_named('curve', trials=3, alphas=[0.0001])
        self.assertIn('g_1_9.csv', result.files)
        self.assertIn('curve.svg', result.files)
        with open(result.directory / 'g_1_9.csv', newline='') as f:
            self.assertAlmostEqual(read_sweep_csv(f)[0]['mean'], 9.8, delta=0.01)
        with open(result.directory / 'g_3_7.csv', newline='') as f:
            self.assertAlmostEqual(read_sweep_csv(f)[0]['mean'], 1.76, delta=0.01)


class TorusExperimentTests(ExperimentTestCase):
    def test_small_run(self):
        result = self.run_named('torus', trials=4, n=30, bandwidth=0.2, seed=1)
        self.assertEqual(result.files, ['torus_trials.csv', 'torus_running_mean.svg', 'torus_bars.svg',
                                        'manifest.json'])
        rows = self.read_csv(result.directory / 'torus_trials.csv')
        self.assertEqual([int(r['trial']) for r in rows], [0, 1, 2, 3])
        values = np.array([float(r['h']) for r in rows])
        self.assertAlmostEqual(float(rows[-1]['running_mean']), values.mean())
        for row in rows:
            if row['bar_length'] and float(row['h']) > 0:
                self.assertEqual(float(row['h']), float(row['bar_length']))
                self.assertLess(float(row['creator_u']), 0)
                self.assertGreater(float(row['creator_v']), 0)
        results = json.loads((result.directory / 'manifest.json').read_text())['results']
        self.assertAlmostEqual(results['mean'], values.mean())
        self.assertAlmostEqual(results['zero_fraction'], float(np.mean(values == 0)))

    def test_reproducible(self):
        first = self.run_named('torus', subdir='a', trials=3, n=20, seed=2)
        second = self.run_named('torus', subdir='b', trials=3, n=20, seed=2, n_jobs=2)
        self.assertEqual((first.directory / 'torus_trials.csv').read_bytes(),
                         (second.directory / 'torus_trials.csv').read_bytes())


class DenoiseExperimentTests(ExperimentTestCase):
    def test_small_grid(self):
        result = self.run_named('denoise', trials=2, n=20, deltas=[0.2, 0.3], epsilons=[0.05, 0.1], max_scale=1.0)
        self.assertEqual(result.files, ['denoise_grid.csv', 'denoise_grid.svg', 'manifest.json'])
        rows = self.read_csv(result.directory / 'denoise_grid.csv')
        self.assertEqual(len(rows), 4)
        self.assertEqual({(float(r['delta']), float(r['epsilon'])) for r in rows},
                         {(0.2, 0.05), (0.3, 0.05), (0.2, 0.1), (0.3, 0.1)})
        for row in rows:
            self.assertGreaterEqual(float(row['raw']), 0.0)
            self.assertLessEqual(float(row['mean']), 1.0)
        manifest = json.loads((result.directory / 'manifest.json').read_text())
        results = manifest['results']
        self.assertLessEqual(results['unthresholded_max_persistence'], 1.0)
        self.assertGreaterEqual(results['empirical_lipschitz'], 0.0)
        self.assertAlmostEqual(results['lipschitz_bound'], np.sqrt(2 / np.pi) / 0.02)
        self.assertLessEqual(results['empirical_lipschitz'], results['lipschitz_bound'])
        self.assertTrue(results['within_lipschitz_bound'])
        self.assertEqual(len(manifest['inputs']['cloud']), 23)

    def test_default_scale_reaches_past_the_clean_loop(self):
        result = self.run_named('denoise', trials=2, n=20, deltas=[0.3], epsilons=[0.05])
        manifest = json.loads((result.directory / 'manifest.json').read_text())
        self.assertEqual(manifest['inputs']['max_scale'], DENOISE_MAX_SCALE)
        self.assertGreater(DENOISE_MAX_SCALE, np.sqrt(3))
        self.assertAlmostEqual(manifest['results']['lipschitz_bound'], DENOISE_MAX_SCALE * np.sqrt(2 / np.pi) / 0.02)
        self.assertLessEqual(manifest['results']['best_thresholded'], DENOISE_MAX_SCALE)


@unittest.skipUnless(SLOW, 'set PHSTAB_SLOW_TESTS=1 to run full-size experiments')
class FullSizeExperimentTests(ExperimentTestCase):
    def test_line1_default_grid(self):
        result = self.run_named('line1', trials=1000)
        with open(result.directory / 'g5.csv', newline='') as f:
            rows = read_sweep_csv(f)
        self.assertEqual(len(rows), 100)
        self.assertAlmostEqual(rows[0]['mean'], 10.1, delta=0.01)
        # the smoothed summaries of the two competing minima sum to a smooth curve near 13.1
        with open(result.directory / 'sum.csv', newline='') as f:
            sums = [r['mean'] for r in read_sweep_csv(f)]
        self.assertTrue(all(abs(s - 13.1) < 0.5 for s in sums))

    def test_torus_default_size(self):
        result = self.run_named('torus', trials=200, bandwidth=0.2, seed=3)
        rows = self.read_csv(result.directory / 'torus_trials.csv')
        self.assertEqual(len(rows), 200)
        results = json.loads((result.directory / 'manifest.json').read_text())['results']
        self.assertGreaterEqual(results['zero_fraction'], 0.15)
        self.assertLessEqual(results['zero_fraction'], 0.85)
        self.assertGreaterEqual(float(rows[-1]['running_mean']), 0.5)
        self.assertLessEqual(float(rows[-1]['running_mean']), 1.9)
        # z is perturbed along with (u, v), so counted bars are longer than the unperturbed height gap
        counted = [float(r['h']) for r in rows if float(r['h']) > 0]
        self.assertTrue(counted)
        self.assertGreaterEqual(min(counted), 2.2)
        self.assertLessEqual(max(counted), 3.2)

    def test_denoise_default_grid(self):
        result = self.run_named('denoise', trials=20)
        rows = self.read_csv(result.directory / 'denoise_grid.csv')
        self.assertEqual(len(rows), 9)
        manifest = json.loads((result.directory / 'manifest.json').read_text())
        self.assertEqual(manifest['inputs']['n'], 150)
        results = manifest['results']
        self.assertGreaterEqual(results['best_thresholded'], 1.5 * results['unthresholded_max_persistence'])
        self.assertLessEqual(results['empirical_lipschitz'], results['lipschitz_bound'] + results['lipschitz_margin'])
