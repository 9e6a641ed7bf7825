import csv
import io
import json
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from topology.cli import INTERNAL_ERROR, USAGE_ERROR, functional_from_flag, load_vector, parse_json
from topology.experiments import CURVE_VERTICES, LINE1_VALUES

LINE1 = ','.join(str(v) for v in LINE1_VALUES)
HOLLOW_TRIANGLE = {
    'simplices': [
        {'v': [0], 'f': 0}, {'v': [1], 'f': 0}, {'v': [2], 'f': 0},
        {'v': [0, 1], 'f': 1}, {'v': [0, 2], 'f': 2}, {'v': [1, 2], 'f': 3},
    ]
}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write_json(self, name, data):
        path = self.dir / name
        path.write_text(json.dumps(data))
        return str(path)

    def call(self, *args, **options):
        out = io.StringIO()
        call_command(*args, stdout=out, stderr=io.StringIO(), no_color=True, **options)
        return out.getvalue()

    def assertExitCode(self, code, *args, **options):
        with self.assertRaises(CommandError) as cm:
            self.call(*args, **options)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class PersistenceCommandTests(CommandTestCase):
    def test_writes_diagrams_to_stdout(self):
        path = self.write_json('complex.json', HOLLOW_TRIANGLE)
        payload = json.loads(self.call('persistence', path, degree=1))
        dgm0, dgm1 = payload['diagrams']
        self.assertEqual(len(dgm0['pairs']), 3)
        self.assertIsNone(dgm1['pairs'][0]['death'])

    def test_writes_diagrams_to_a_file(self):
        path = self.write_json('complex.json', HOLLOW_TRIANGLE)
        output = self.dir / 'diagrams.json'
        message = self.call('persistence', path, degree=1, cycles=True, output=str(output))
        self.assertIn('Wrote 2 diagram(s)', message)
        loop = json.loads(output.read_text())['diagrams'][1]['pairs'][0]
        self.assertEqual(loop['cycle'], [[0, 1], [0, 2], [1, 2]])

    def test_invalid_complex(self):
        path = self.write_json('bad.json', {'simplices': [{'v': [0, 1], 'f': 1}]})
        error = self.assertExitCode(USAGE_ERROR, 'persistence', path)
        self.assertIn('missing', str(error))

    def test_malformed_json(self):
        path = self.dir / 'broken.json'
        path.write_text('{"simplices": [')
        error = self.assertExitCode(USAGE_ERROR, 'persistence', str(path))
        self.assertIn('line 1', str(error))

    def test_missing_file(self):
        self.assertExitCode(USAGE_ERROR, 'persistence', str(self.dir / 'nope.json'))

    def test_bad_truncation(self):
        path = self.write_json('complex.json', HOLLOW_TRIANGLE)
        self.assertExitCode(USAGE_ERROR, 'persistence', path, degree=1, essential='truncate:1')


class StabilizeCommandTests(CommandTestCase):
    def test_single_bandwidth_to_stdout(self):
        text = self.call('stabilize', a=LINE1, summary='vertex:4', bandwidth=0.001, trials=20, seed=1)
        rows = list(csv.DictReader(io.StringIO(text)))
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['summary_id'], 'line-graph-lower-star:vertex:4')
        self.assertAlmostEqual(float(rows[0]['mean']), 10.1, delta=0.01)
        self.assertEqual(rows[0]['trials'], '20')

    def test_is_reproducible(self):
        options = dict(a=LINE1, summary='vertex:0', bandwidth=0.5, trials=10, seed=2)
        self.assertEqual(self.call('stabilize', **options), self.call('stabilize', **options))

    def test_threads_do_not_change_the_csv(self):
        options = dict(a=LINE1, summary='vertex:4', alphas='0.1:0.5:3', trials=12, seed=2)
        self.assertEqual(self.call('stabilize', **options), self.call('stabilize', threads=2, **options))

    def test_zero_threads_is_rejected(self):
        error = self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', bandwidth=0.1, trials=5,
                                    threads=0)
        self.assertIn('--threads', str(error))
        self.assertExitCode(USAGE_ERROR, 'experiment', 'line1', trials=2, alphas='0.01', threads=0,
                            out=str(self.dir))

    def test_needs_exactly_one_bandwidth_source(self):
        self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', trials=5)
        self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', trials=5,
                            bandwidth=0.1, alphas='0.1:0.2:2')

    def test_arity_mismatch(self):
        summary = json.dumps({'computation': 'line-graph-lower-star', 'functional': {'vertex': 0}, 'n': 5})
        self.assertExitCode(USAGE_ERROR, 'stabilize', a='1,2,3', summary=summary, bandwidth=0.1, trials=5)

    def test_bad_kernel_and_trials(self):
        self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', bandwidth=0.1, trials=5,
                            kernel='box')
        self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', bandwidth=0.1, trials=0)
        self.assertExitCode(USAGE_ERROR, 'stabilize', a=LINE1, summary='vertex:4', bandwidth=-0.1, trials=5)

    def test_curve_summary_from_a_config_file(self):
        a = self.write_json('a.json', {'a': [x for v in CURVE_VERTICES for x in v]})
        summary = self.write_json('summary.json', {
            'computation': 'curve', 'functional': {'simplex': [0, 8]}, 'degree': 1, 'label': 'g_1_9',
        })
        text = self.call('stabilize', a=a, summary=summary, bandwidth=0.0001, trials=5)
        row = next(csv.DictReader(io.StringIO(text)))
        self.assertEqual(row['summary_id'], 'g_1_9')
        self.assertAlmostEqual(float(row['mean']), 9.8, delta=0.01)


class SweepCommandTests(CommandTestCase):
    def test_sweep_to_file(self):
        out = self.dir / 'g5.csv'
        message = self.call('sweep', a=LINE1, summary='vertex:4', alphas='0.001:0.003:3', trials=5, out=str(out))
        self.assertEqual(message.count('alpha='), 3)
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        np.testing.assert_allclose([float(r['alpha']) for r in rows], [0.001, 0.002, 0.003])

    def test_needs_alphas(self):
        self.assertExitCode(USAGE_ERROR, 'sweep', a=LINE1, summary='vertex:4', trials=5)

    def test_bad_grid(self):
        self.assertExitCode(USAGE_ERROR, 'sweep', a=LINE1, summary='vertex:4', trials=5, alphas='1:2')


class BottleneckCommandTests(CommandTestCase):
    def test_between_diagram_files(self):
        first = self.write_json('a.json', {'degree': 0, 'pairs': [{'birth': 0, 'death': 2}]})
        second = self.write_json('b.json', {'degree': 0, 'pairs': [{'birth': 0.5, 'death': 2.5}]})
        self.assertEqual(self.call('bottleneck', first, second).strip(), '0.5')

    def test_persistence_output_against_itself(self):
        complex_ = self.write_json('complex.json', HOLLOW_TRIANGLE)
        output = self.dir / 'diagrams.json'
        self.call('persistence', complex_, degree=1, output=str(output))
        self.assertEqual(self.call('bottleneck', str(output), str(output), degree=1).strip(), '0')

    def test_infinite(self):
        first = self.write_json('a.json', {'degree': 1, 'pairs': [{'birth': 0, 'death': None}]})
        second = self.write_json('b.json', {'degree': 1, 'pairs': []})
        self.assertEqual(self.call('bottleneck', first, second).strip(), 'inf')

    def test_missing_degree(self):
        complex_ = self.write_json('complex.json', HOLLOW_TRIANGLE)
        output = self.dir / 'diagrams.json'
        self.call('persistence', complex_, output=str(output))
        self.assertExitCode(USAGE_ERROR, 'bottleneck', str(output), str(output), degree=3)


class ExperimentCommandTests(CommandTestCase):
    def test_line2(self):
        text = self.call('experiment', 'line2', trials=3, alphas='0.01:0.02:2', out=str(self.dir))
        for name in ('g2.csv', 'g3.csv', 'g4.csv', 'sum.csv', 'line2.svg', 'manifest.json'):
            self.assertTrue((self.dir / 'line2' / name).exists(), name)
        self.assertIn('Experiment line2 written', text)

    def test_unknown_experiment(self):
        self.assertExitCode(USAGE_ERROR, 'experiment', 'line9', out=str(self.dir))


class CliHelperTests(SimpleTestCase):
    def test_parse_json_rejects_non_finite_constants(self):
        with self.assertRaises(CommandError):
            parse_json('[NaN]')
        self.assertEqual(parse_json('[1, 2]'), [1, 2])

    def test_load_vector(self):
        self.assertEqual(load_vector('1, 2.5,3').tolist(), [1.0, 2.5, 3.0])
        self.assertEqual(load_vector('[4, 5]').tolist(), [4.0, 5.0])
        self.assertEqual(load_vector('{"a": [6]}').tolist(), [6.0])
        with self.assertRaises(CommandError):
            load_vector('1,two')
        with self.assertRaises(CommandError):
            load_vector('[]')

    def test_functional_flags(self):
        self.assertEqual(functional_from_flag('vertex:4'), {'vertex': 4})
        self.assertEqual(functional_from_flag('simplex:0,8'), {'simplex': [0, 8]})
        self.assertEqual(functional_from_flag('region:second-quadrant'), {'region': 'second-quadrant'})
        self.assertEqual(functional_from_flag('max-persistence'), 'max-persistence')
        self.assertEqual(functional_from_flag('{"cycle": [[0, 1]]}'), {'cycle': [[0, 1]]})
        with self.assertRaises(CommandError):
            functional_from_flag('vertex:x')

    def test_exit_codes_are_distinct(self):
        self.assertNotEqual(USAGE_ERROR, INTERNAL_ERROR)
