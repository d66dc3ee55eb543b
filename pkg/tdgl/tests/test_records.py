''' Run record tests '''
# -*- coding: utf-8 -*-
# pylint: disable=missing-docstring
import json
import os
import tempfile
from pathlib import Path
from unittest import TestCase

from numpy.testing import assert_array_equal

from tdgl import dynamics
from tdgl.exceptions import RecordError
from tdgl.records import MANIFEST, SERIES, load_record, run_directory, vtk_text, write_record
from tdgl.tests.sample_configs import RANDOM_LSHAPE, STEADY, config
from tdgl.utils import git_blob_hash, sha256_hex


class HashTest(TestCase):
    ''' Content hashes '''

    def test_git_blob_hash(self):
        self.assertEqual(git_blob_hash(b''), 'e69de29bb2d1d6434b8b29ae775ad8c2e48c5391')
        self.assertEqual(git_blob_hash(b'hello\n'), 'ce013625030ba8dba906f756967f9e9ca394464a')

    def test_sha256(self):
        self.assertEqual(sha256_hex('abc'), sha256_hex(b'abc'))
        self.assertEqual(sha256_hex(b'abc')[:8], 'ba7816bf')


class RecordFilesTest(TestCase):
    ''' Writing and reading run directories '''

    @classmethod
    def setUpClass(cls):
        cls.record = dynamics.run(config(RANDOM_LSHAPE, output={'every': 2, 'vtk': True}))

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.directory = write_record(self.record, root=self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_directory_name(self):
        self.assertEqual(self.directory, run_directory(self.record, self.tmp.name))
        self.assertEqual(self.directory.name, 'random-lshape-%s' % self.record.config_hash[:12])
        self.assertTrue((self.directory / SERIES).is_file())

    def test_manifest(self):
        manifest = json.loads((self.directory / MANIFEST).read_text(encoding='utf-8'))
        self.assertEqual(manifest['config_hash'], self.record.config_hash)
        self.assertEqual(manifest['status'], 'completed')
        self.assertEqual([entry['step'] for entry in manifest['snapshots']], [0, 2, 4])
        payload = (self.directory / SERIES).read_bytes()
        self.assertEqual(manifest['files'][SERIES]['sha256'], sha256_hex(payload))
        self.assertEqual(manifest['files'][SERIES]['git_blob'], git_blob_hash(payload))

    def test_load(self):
        loaded = load_record(self.directory)
        self.assertEqual(loaded.config, self.record.config)
        self.assertEqual(loaded.series['step'], self.record.series['step'])
        self.assertEqual(len(loaded.snapshots), 3)
        for original, again in zip(self.record.snapshots, loaded.snapshots):
            assert_array_equal(again.psi, original.psi)
            assert_array_equal(again.A, original.A)
        self.assertEqual(loaded.directory, str(self.directory))

    def test_identical_runs_identical_files(self):
        again = dynamics.run(config(RANDOM_LSHAPE, output={'every': 2, 'vtk': True}))
        with tempfile.TemporaryDirectory() as other:
            second = write_record(again, root=other)
            first_manifest = json.loads((self.directory / MANIFEST).read_text(encoding='utf-8'))
            second_manifest = json.loads((second / MANIFEST).read_text(encoding='utf-8'))
        self.assertEqual(first_manifest['content_hash'], second_manifest['content_hash'])

    def test_vtk_snapshots(self):
        text = (self.directory / 'snapshots' / 'state_000000.vtk').read_text(encoding='ascii')
        lines = text.splitlines()
        self.assertEqual(lines[0], '# vtk DataFile Version 3.0')
        self.assertIn('DATASET STRUCTURED_POINTS', lines)
        self.assertIn('DIMENSIONS 5 5 3', lines)
        self.assertIn('CELL_DATA 32', lines)
        self.assertIn('VECTORS A double', lines)

    def test_missing_snapshot(self):
        os.remove(self.directory / 'snapshots' / 'A_000002.npy')
        with self.assertRaises(RecordError) as caught:
            load_record(self.directory)
        self.assertIn('A_000002.npy', str(caught.exception))
        self.assertEqual(caught.exception.exit_code, 5)

    def test_corrupt_snapshot(self):
        path = self.directory / 'snapshots' / 'psi_000004.npy'
        path.write_bytes(path.read_bytes()[:-8])
        with self.assertRaises(RecordError) as caught:
            load_record(self.directory)
        self.assertIn('corrupt', str(caught.exception))
        self.assertEqual(caught.exception.path, str(path))

    def test_missing_manifest(self):
        with self.assertRaises(RecordError):
            load_record(Path(self.tmp.name) / 'nowhere')


class VtkTest(TestCase):
    ''' Legacy VTK export '''

    def test_outside_cells_are_marked(self):
        record = dynamics.run(config(STEADY))
        grid = record.grid
        text = vtk_text(grid, record.snapshots[0].psi, record.snapshots[0].A)
        lines = text.splitlines()
        start = lines.index('SCALARS inside int 1') + 2
        self.assertEqual(lines[start:start + grid.n_cells_full], ['1'] * grid.n_cells_full)
