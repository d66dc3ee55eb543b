''' Batch experiment tests '''
# -*- coding: utf-8 -*-
# pylint: disable=missing-docstring
import json
import math
import os
import tempfile
from unittest import TestCase

from numpy.testing import assert_allclose

from tdgl import sweeps
from tdgl.exceptions import InvalidArgument
from tdgl.tests.sample_configs import COUPLED_BOX, RANDOM_LSHAPE, STEADY, config


class OrderTest(TestCase):
    ''' Observed convergence orders '''

    def test_second_order(self):
        orders = sweeps.observed_orders([0.2, 0.1, 0.05], [0.04, 0.01, 0.0025])
        assert_allclose(orders, [2.0, 2.0])

    def test_degenerate_pairs(self):
        orders = sweeps.observed_orders([0.2, 0.1, 0.1], [0.0, 0.01, 0.01])
        self.assertTrue(all(math.isnan(order) for order in orders))


class TimestepSweepTest(TestCase):
    ''' Runs at several time steps '''

    def test_rows(self):
        report = sweeps.run_sweep(config(RANDOM_LSHAPE), 'dt', [0.01, 0.005])
        self.assertEqual([row['dt'] for row in report.rows], [0.01, 0.005])
        self.assertTrue(all(row['status'] == 'completed' for row in report.rows))
        self.assertTrue(all(row['gronwall_holds'] for row in report.rows))
        self.assertEqual(len(report.summary['lyapunov_ratios']), 1)

    def test_parallel_matches_serial(self):
        serial = sweeps.timestep_sweep(config(STEADY), [0.005, 0.0025])
        parallel = sweeps.timestep_sweep(config(STEADY), [0.005, 0.0025], workers=2)
        self.assertEqual(serial.rows, parallel.rows)

    def test_report_files(self):
        report = sweeps.timestep_sweep(config(STEADY), [0.005])
        with tempfile.TemporaryDirectory() as tmp:
            report.write(tmp)
            with open(os.path.join(tmp, 'report.json'), encoding='utf-8') as handle:
                self.assertEqual(json.load(handle)['axis'], 'dt')
            with open(os.path.join(tmp, 'report.csv'), encoding='utf-8') as handle:
                header = handle.readline().strip().split(',')
        self.assertIn('overshoot', header)
        self.assertEqual(header, sorted(header))


class GalerkinSweepTest(TestCase):
    ''' Truncated bases against the full grid run '''

    def test_full_basis_reaches_grid(self):
        report = sweeps.run_sweep(config(COUPLED_BOX), 'N', [4, 'full'])
        self.assertEqual(report.rows[-1]['N'], 54)
        self.assertLess(report.rows[-1]['distance_to_full'], 1e-8)
        self.assertTrue(report.summary['monotone'])
        self.assertIn('uniform_bound_holds', report.summary)


class PerturbationSweepTest(TestCase):
    ''' Growth of perturbations of the initial data '''

    def test_linear_response(self):
        report = sweeps.run_sweep(config(RANDOM_LSHAPE), 'delta', [1e-4, 1e-3])
        self.assertEqual(len(report.rows), 2)
        self.assertTrue(all(math.isfinite(row['growth_rate']) for row in report.rows))
        assert_allclose(report.summary['linear_scaling'], [1.0], rtol=0.05)


class GaugeSweepTest(TestCase):
    ''' Lorentz against zero-potential runs '''

    def test_rows(self):
        report = sweeps.run_sweep(config(COUPLED_BOX), 'gauge', [3])
        self.assertEqual(report.rows[0]['cells'], 3)
        self.assertTrue(math.isfinite(report.rows[0]['curl_distance']))
        self.assertEqual(report.summary['shrink_factors'], [])


class InvalidSweepTest(TestCase):

    def test_unknown_axis(self):
        with self.assertRaises(InvalidArgument):
            sweeps.run_sweep(config(STEADY), 'kappa', [1.0])

    def test_no_values(self):
        with self.assertRaises(InvalidArgument):
            sweeps.run_sweep(config(STEADY), 'dt', [])

    def test_unknown_scaling(self):
        with self.assertRaises(InvalidArgument):
            sweeps.refinement_sweep(config(STEADY), [4], dt_scaling='cubic')
