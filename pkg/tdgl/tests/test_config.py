''' Simulation document tests '''
# -*- coding: utf-8 -*-
# pylint: disable=missing-docstring
import json
import os
import tempfile
from unittest import TestCase, mock

from tdgl.config import config_from_dict, config_hash, parse_config, serialize_config
from tdgl.exceptions import ConfigValidationError
from tdgl.settings import CONFIG_DEFAULTS, get_config
from tdgl.tests.sample_configs import RANDOM_LSHAPE, STEADY, config, document

TOML_DOCUMENT = '''
name = "from-toml"
mode = "grid"

[domain]
kind = "lshape"
counts = [4, 4, 2]

[physics]
eta = 2.0
T_final = 0.05

[time]
dt = 0.01
scheme = "picard"
picard_max = 4
'''


class DefaultsTest(TestCase):
    ''' Documented defaults '''

    def test_minimal_document(self):
        parsed = config_from_dict({'domain': {'kind': 'box'}})
        self.assertEqual(parsed.mode, 'grid')
        self.assertEqual(parsed.domain.counts, (8, 8, 8))
        self.assertEqual(parsed.physics.eta, 1.0)
        self.assertEqual(parsed.time.dt, 1e-3)
        self.assertEqual(parsed.time.scheme, 'lagged')
        self.assertEqual(parsed.galerkin.N, 16)
        self.assertTrue(parsed.applied.is_zero)

    def test_solver_section_maps_onto_settings(self):
        parsed = config(STEADY, solver={'linear_rtol': 1e-6})
        settings = parsed.settings()
        self.assertEqual(settings['LINEAR_RTOL'], 1e-6)
        self.assertEqual(settings['EIGEN_SHIFT'], CONFIG_DEFAULTS['EIGEN_SHIFT'])

    @mock.patch.dict(os.environ, {'TDGL_OUT': '/tmp/elsewhere'})
    def test_output_root_from_environment(self):
        self.assertEqual(get_config()['OUTPUT_ROOT'], '/tmp/elsewhere')

    def test_output_root_default(self):
        with mock.patch.dict(os.environ):
            os.environ.pop('TDGL_OUT', None)
            self.assertEqual(get_config()['OUTPUT_ROOT'], 'tdgl-runs')


class ViolationTest(TestCase):
    ''' Every problem is reported with its path '''

    def assertViolation(self, data, path):
        with self.assertRaises(ConfigValidationError) as caught:
            config_from_dict(data)
        paths = [item['path'] for item in caught.exception.violations]
        self.assertIn(path, paths)
        return caught.exception

    def test_negative_eta(self):
        error = self.assertViolation(document(STEADY, physics={'eta': -1.0}), 'physics.eta')
        self.assertEqual(error.exit_code, 2)
        self.assertEqual(error.to_dict()['error'], 'ConfigValidationError')

    def test_unknown_key(self):
        self.assertViolation(document(STEADY, colour='blue'), '<root>')
        self.assertViolation(document(STEADY, time={'dt': 0.005, 'stepper': 'rk4'}), 'time')

    def test_missing_domain(self):
        self.assertViolation({'name': 'nothing'}, '<root>')

    def test_violations_are_collected(self):
        data = document(STEADY, physics={'eta': -1.0, 'kappa': 0.0}, mode='spectral')
        with self.assertRaises(ConfigValidationError) as caught:
            config_from_dict(data)
        paths = sorted(item['path'] for item in caught.exception.violations)
        self.assertEqual(paths, ['mode', 'physics.eta', 'physics.kappa'])

    def test_step_longer_than_interval(self):
        self.assertViolation(document(STEADY, time={'dt': 0.5}), 'time.dt')

    def test_odd_lshape_counts(self):
        self.assertViolation(document(RANDOM_LSHAPE, domain={'kind': 'lshape', 'counts': [5, 4, 2]}), 'domain')

    def test_manufactured_needs_box(self):
        self.assertViolation(document(RANDOM_LSHAPE, initial={'kind': 'manufactured'}), 'initial.kind')

    def test_manufactured_needs_zero_field(self):
        data = document(STEADY, initial={'kind': 'manufactured'}, applied={'value': [0.0, 0.0, 1.0]})
        self.assertViolation(data, 'applied')

    def test_manufactured_gradient_range(self):
        data = document(STEADY, domain={'kind': 'box', 'counts': [4, 4, 4]},
                        initial={'kind': 'manufactured', 'manufactured_gradient': -0.5})
        self.assertViolation(data, 'initial.manufactured_gradient')

    def test_manufactured_gradient_needs_preset(self):
        data = document(STEADY, initial={'kind': 'steady', 'manufactured_gradient': 0.5})
        self.assertViolation(data, 'initial.manufactured_gradient')

    def test_divergent_applied_field(self):
        data = document(STEADY, applied={'kind': 'expression', 'expressions': ['x', '0', '0']})
        self.assertViolation(data, 'applied')

    def test_missing_initial_file(self):
        self.assertViolation(document(STEADY, initial={'kind': 'file', 'path': '/nonexistent/state.npz'}),
                             'initial.path')

    def test_not_an_object(self):
        with self.assertRaises(ConfigValidationError):
            config_from_dict(['domain'])


class ParseTest(TestCase):
    ''' TOML and JSON documents '''

    def test_toml_text(self):
        parsed = parse_config(TOML_DOCUMENT)
        self.assertEqual(parsed.name, 'from-toml')
        self.assertEqual(parsed.domain.kind, 'lshape')
        self.assertEqual(parsed.physics.eta, 2.0)
        self.assertEqual(parsed.time.max_iterations, 4)

    def test_serialized_document_parses_back(self):
        parsed = config(RANDOM_LSHAPE)
        again = parse_config(serialize_config(parsed))
        self.assertEqual(again, parsed)
        self.assertEqual(config_hash(again), config_hash(parsed))

    def test_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            toml_path = os.path.join(tmp, 'run.toml')
            json_path = os.path.join(tmp, 'run.json')
            with open(toml_path, 'w', encoding='utf-8') as handle:
                handle.write(TOML_DOCUMENT)
            with open(json_path, 'w', encoding='utf-8') as handle:
                json.dump(document(STEADY), handle)
            self.assertEqual(parse_config(toml_path).name, 'from-toml')
            self.assertEqual(parse_config(json_path), config(STEADY))

    def test_undecodable_text(self):
        with self.assertRaises(ConfigValidationError) as caught:
            parse_config('[domain\nkind = ')
        self.assertEqual(caught.exception.violations[0]['path'], '<document>')


class HashTest(TestCase):
    ''' Configuration hashes '''

    def test_stable(self):
        self.assertEqual(config_hash(config(STEADY)), config_hash(config(STEADY)))
        self.assertEqual(len(config_hash(config(STEADY))), 64)

    def test_changes_with_physics(self):
        self.assertNotEqual(config_hash(config(STEADY)), config_hash(config(STEADY, physics__eta=2.0)))

    def test_key_order_is_irrelevant(self):
        reordered = dict(reversed(list(document(STEADY).items())))
        self.assertEqual(config_hash(config_from_dict(reordered)), config_hash(config(STEADY)))
