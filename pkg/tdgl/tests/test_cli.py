''' Command line tests '''
# -*- coding: utf-8 -*-
# pylint: disable=missing-docstring
import io
import json
import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import TestCase, mock

from tdgl.cli import main
from tdgl.tests.sample_configs import RANDOM_LSHAPE, STEADY, document


class CliTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        patcher = mock.patch.dict(os.environ, {'TDGL_OUT': str(self.root / 'runs')})
        patcher.start()
        self.addCleanup(patcher.stop)

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, data, name='run.json'):
        path = self.root / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)

    def invoke(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main(['-q'] + list(argv))
        return code, stdout.getvalue(), stderr.getvalue()


class RunCommandTest(CliTestCase):
    ''' tdgl run '''

    def test_steady_state(self):
        code, out, _ = self.invoke('run', self.write_config(document(STEADY)))
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertEqual(summary['status'], 'completed')
        self.assertLess(summary['final_distance_to_initial'], 1e-12)
        self.assertTrue(summary['directory'].startswith(str(self.root / 'runs')))
        self.assertTrue((Path(summary['directory']) / 'manifest.json').is_file())

    def test_disabled_energy_prints_null(self):
        code, out, _ = self.invoke('run', self.write_config(document(STEADY, diagnostics={'energy': False})))
        self.assertEqual(code, 0)
        self.assertNotIn('NaN', out)
        self.assertIsNone(json.loads(out)['final_energy'])

    def test_invalid_config(self):
        code, out, err = self.invoke('run', self.write_config(document(STEADY, physics={'eta': -1.0})))
        self.assertEqual(code, 2)
        self.assertEqual(out, '')
        error = json.loads(err.strip().splitlines()[-1])
        self.assertEqual(error['error'], 'ConfigValidationError')
        self.assertEqual(error['violations'][0]['path'], 'physics.eta')

    def test_missing_config(self):
        code, _, err = self.invoke('run', str(self.root / 'absent.toml'))
        self.assertEqual(code, 3)
        self.assertIn('absent.toml', json.loads(err.strip().splitlines()[-1])['path'])

    def test_failed_run(self):
        data = document(RANDOM_LSHAPE, solver={'linear_maxiter': 1, 'linear_rtol': 1e-14})
        code, out, _ = self.invoke('run', self.write_config(data))
        self.assertEqual(code, 4)
        self.assertEqual(json.loads(out)['failure']['error'], 'NumericalFailure')


class DiagnoseCommandTest(CliTestCase):
    ''' tdgl diagnose '''

    def setUp(self):
        super().setUp()
        self.record = str(self.root / 'record')
        code, _, _ = self.invoke('run', self.write_config(document(RANDOM_LSHAPE)), '--out', self.record)
        self.assertEqual(code, 0)

    def test_energy(self):
        code, out, _ = self.invoke('diagnose', self.record, '--check', 'energy')
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertTrue(result['summary']['gronwall_holds'])
        csv_path = Path(self.record) / 'diagnostics' / 'energy.csv'
        self.assertEqual(result['csv'], str(csv_path))
        header = csv_path.read_text(encoding='utf-8').splitlines()[0]
        self.assertEqual(header, 'time,quantity,value,check,config_hash')

    def test_bound(self):
        out_path = str(self.root / 'bound.csv')
        code, out, _ = self.invoke('diagnose', self.record, '--check', 'bound', '--out', out_path)
        self.assertEqual(code, 0)
        self.assertLess(json.loads(out)['summary']['max_abs_psi'], 1.05)
        self.assertTrue(os.path.isfile(out_path))

    def test_stability_needs_other(self):
        code, _, err = self.invoke('diagnose', self.record, '--check', 'stability')
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(err.strip().splitlines()[-1])['error'], 'InvalidArgument')

    def test_stability_against_itself(self):
        code, out, _ = self.invoke('diagnose', self.record, '--check', 'stability', '--other', self.record)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['summary']['terminal'], 0.0)

    def test_corrupt_record(self):
        snapshot = Path(self.record) / 'snapshots' / 'psi_000002.npy'
        snapshot.write_bytes(b'not an array')
        code, _, err = self.invoke('diagnose', self.record, '--check', 'energy')
        self.assertEqual(code, 5)
        error = json.loads(err.strip().splitlines()[-1])
        self.assertEqual(error['error'], 'RecordError')
        self.assertIn('psi_000002.npy', error['path'])


class SweepAndEigsCommandTest(CliTestCase):
    ''' tdgl sweep and tdgl eigs '''

    def test_sweep(self):
        code, out, _ = self.invoke('sweep', self.write_config(document(STEADY)), '--axis', 'dt',
                                   '--values', '0.005', '0.0025')
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertEqual(len(result['rows']), 2)
        self.assertTrue((Path(result['directory']) / 'report.csv').is_file())
        self.assertEqual(Path(result['directory']).name, 'steady-sweep-dt')

    def test_eigs(self):
        data = document(STEADY, domain={'kind': 'box', 'counts': [3, 3, 3]})
        code, out, _ = self.invoke('eigs', self.write_config(data), '-N', '4')
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertEqual(result['N'], 4)
        self.assertEqual(len(result['eigenvalues']), 4)
        self.assertTrue(os.path.isfile(result['path']))
        self.assertTrue(result['path'].endswith('steady-basis-4.bin'))

    def test_unknown_axis(self):
        with redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as caught:
            main(['sweep', self.write_config(document(STEADY)), '--axis', 'kappa', '--values', '1'])
        self.assertEqual(caught.exception.code, 2)
