'''
Batch experiment drivers.

Each sweep derives a family of configurations from one base configuration,
runs them (concurrently with a process pool when ``workers > 1``; runs share
no mutable state) and condenses the records into a SweepReport.
'''
# -*- coding: utf-8 -*-
import csv
import dataclasses
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tdgl import diagnostics, dynamics
from tdgl.config import config_from_dict
from tdgl.exceptions import InvalidArgument
from tdgl.galerkin import GalerkinBasis, assemble_M, eigenbasis_M

logger = logging.getLogger(__name__)

AXES = ('h', 'dt', 'N', 'delta', 'gauge')


@dataclass
class SweepReport:
    axis: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def as_dict(self):
        return {'axis': self.axis, 'rows': self.rows, 'summary': self.summary}

    def csv_text(self):
        columns = sorted({key for row in self.rows for key in row})
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in self.rows:
            writer.writerow({key: (repr(value) if isinstance(value, float) else value) for key, value in row.items()})
        return buffer.getvalue()

    def write(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / 'report.json').write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True) + '\n',
                                               encoding='utf-8')
        (directory / 'report.csv').write_text(self.csv_text(), encoding='utf-8')
        return directory


def _execute(payload):
    config_data, basis = payload
    record = dynamics.run(config_from_dict(config_data), basis)
    record.__dict__.pop('grid', None)
    return record


def run_many(configs, workers=1, bases=None):
    payloads = [(config.to_dict(), basis) for config, basis in zip(configs, bases or [None] * len(configs))]
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_execute, payloads))
    return [_execute(payload) for payload in payloads]


def observed_orders(steps, errors):
    ''' log(e_k / e_{k+1}) / log(s_k / s_{k+1}) for successive pairs '''
    orders = []
    for (s0, e0), (s1, e1) in zip(zip(steps, errors), zip(steps[1:], errors[1:])):
        if e0 > 0 and e1 > 0 and s0 != s1:
            orders.append(math.log(e0 / e1) / math.log(s0 / s1))
        else:
            orders.append(math.nan)
    return orders


def _variant(config, suffix, **sections):
    return dataclasses.replace(config, name='%s-%s' % (config.name, suffix), **sections)


def _refined(config, cells, dt_scaling):
    base = config.domain.counts[0]
    counts = tuple(int(round(n * cells / base)) for n in config.domain.counts)
    factor = {'quadratic': 2, 'linear': 1, 'fixed': 0}[dt_scaling]
    dt = config.time.dt * (base / cells) ** factor
    return _variant(config, 'n%d' % cells, domain=dataclasses.replace(config.domain, counts=counts),
                    time=dataclasses.replace(config.time, dt=dt))


def _final_errors(record):
    error_psi, error_A = record.series['error_psi'][-1], record.series['error_A'][-1]
    return error_psi, error_A, math.sqrt(error_psi ** 2 + error_A ** 2)


def refinement_sweep(config, cells, dt_scaling='quadratic', workers=1):
    ''' Runs at ``cells`` cells along x (other axes scaled alike), dt scaled with h^2 by default '''
    if dt_scaling not in ('quadratic', 'linear', 'fixed'):
        raise InvalidArgument('unknown dt scaling %r' % dt_scaling)
    configs = [_refined(config, int(n), dt_scaling) for n in cells]
    records = run_many(configs, workers)
    report = SweepReport('h')
    manufactured = config.initial.kind == 'manufactured'
    for variant, record in zip(configs, records):
        row = {'counts': 'x'.join(map(str, variant.domain.counts)), 'h': record.grid.spacing[0],
               'dt': variant.time.dt, 'status': record.status,
               'max_abs_psi': diagnostics.bound_monitor(record).max_abs,
               'final_energy': record.series['energy'][-1]}
        if manufactured:
            row['error_psi'], row['error_A'], row['error'] = _final_errors(record)
        report.rows.append(row)
    if manufactured:
        orders = observed_orders([row['h'] for row in report.rows], [row['error'] for row in report.rows])
        report.summary = {'observed_orders': orders, 'min_order': min(orders) if orders else math.nan}
    return report


def timestep_sweep(config, dts, workers=1):
    configs = [_variant(config, 'dt%g' % dt, time=dataclasses.replace(config.time, dt=float(dt))) for dt in dts]
    records = run_many(configs, workers)
    report = SweepReport('dt')
    for variant, record in zip(configs, records):
        bound = diagnostics.bound_monitor(record)
        row = {'dt': variant.time.dt, 'status': record.status, 'overshoot': bound.max_abs - 1.0,
               'max_excess': float(bound.excess.max()),
               'lyapunov_max_positive': diagnostics.lyapunov_residual(record).max_positive,
               'gronwall_holds': diagnostics.gronwall_envelope(record).holds}
        if config.initial.kind == 'manufactured':
            row['error_psi'], row['error_A'], row['error'] = _final_errors(record)
        report.rows.append(row)
    ratios = [a['lyapunov_max_positive'] / b['lyapunov_max_positive']
              if b['lyapunov_max_positive'] > 0 else math.inf for a, b in zip(report.rows, report.rows[1:])]
    report.summary = {'lyapunov_ratios': ratios,
                      'overshoots': [row['overshoot'] for row in report.rows]}
    return report


def _sub_basis(basis, n):
    return GalerkinBasis(basis.operator, basis.eigenvalues[:n], basis.vectors[:, :n],
                         basis.orthonormality_error, basis.residual)


def galerkin_sweep(config, sizes, workers=1, cap_factor=1.1):
    '''
    Galerkin runs for every N in ``sizes`` against the full grid run, with the
    monitored norms checked against one cap derived from the full run.
    '''
    grid = config.build_grid()
    sizes = [grid.n_faces if n in ('full', 0) else int(n) for n in sizes]
    operator = assemble_M(grid, True)
    basis = eigenbasis_M(operator, max(sizes), settings=config.settings())
    grid_config = _variant(config, 'full', mode='grid')
    configs = [grid_config] + [_variant(config, 'N%d' % n, mode='galerkin',
                                        galerkin=dataclasses.replace(config.galerkin, N=n)) for n in sizes]
    bases = [None] + [_sub_basis(basis, n) for n in sizes]
    records = run_many(configs, workers, bases)
    reference, runs = records[0], records[1:]

    vol = grid.cell_volume
    final = reference.snapshots[-1]
    cap_h1 = cap_factor * max(reference.series['psi_h1'])
    cap_m = cap_factor * max(reference.series['A_m_norm'])
    report = SweepReport('N')
    for n, record in zip(sizes, runs):
        last = record.snapshots[-1]
        distance = math.sqrt(vol * (np.sum(np.abs(last.psi - final.psi) ** 2) + np.sum((last.A - final.A) ** 2)))
        report.rows.append({'N': n, 'status': record.status, 'distance_to_full': distance,
                            'max_psi_h1': max(record.series['psi_h1']),
                            'max_A_m_norm': max(record.series['A_m_norm'])})
    distances = [row['distance_to_full'] for row in report.rows]
    report.summary = {
        'monotone': all(b <= a for a, b in zip(distances, distances[1:])),
        'cap_psi_h1': cap_h1,
        'cap_A_m_norm': cap_m,
        'uniform_bound_holds': all(row['max_psi_h1'] <= cap_h1 and row['max_A_m_norm'] <= cap_m
                                   for row in report.rows),
    }
    return report


def perturbation_sweep(config, deltas, workers=1):
    ''' Base run against runs whose psi0 carries a random perturbation of size delta '''
    base = _variant(config, 'base', initial=dataclasses.replace(config.initial, perturbation=0.0))
    configs = [base] + [_variant(config, 'delta%g' % delta,
                                 initial=dataclasses.replace(config.initial, perturbation=float(delta)))
                        for delta in deltas]
    records = run_many(configs, workers)
    report = SweepReport('delta')
    for delta, record in zip(deltas, records[1:]):
        delta_series = diagnostics.stability_compare(records[0], record)
        report.rows.append({'delta': float(delta), 'growth_rate': delta_series.growth_rate,
                            'initial_quantity': float(delta_series.quantity[0]),
                            'terminal_quantity': delta_series.terminal,
                            'terminal_psi_norm': float(delta_series.psi_norm[-1])})
    rates = [row['growth_rate'] for row in report.rows]
    finite = [rate for rate in rates if math.isfinite(rate)]
    spread = (max(finite) - min(finite)) / abs(max(finite, key=abs)) if finite and max(finite, key=abs) else 0.0
    scaling = [(a['terminal_psi_norm'] / b['terminal_psi_norm']) / (a['delta'] / b['delta'])
               for a, b in zip(report.rows, report.rows[1:]) if b['terminal_psi_norm'] > 0]
    report.summary = {'growth_rate_spread': spread, 'linear_scaling': scaling}
    return report


def gauge_sweep(config, cells, workers=1):
    ''' Lorentz and zero-potential runs at every resolution, compared through their observables '''
    configs = []
    for n in cells:
        refined = _refined(config, int(n), 'fixed')
        configs += [dataclasses.replace(refined, mode='grid'),
                    _variant(refined, 'zero', mode='zero_potential')]
    records = run_many(configs, workers)
    report = SweepReport('gauge')
    for n, lorentz, zero in zip(cells, records[::2], records[1::2]):
        distance = diagnostics.gauge_compare(lorentz, zero)
        report.rows.append({'cells': int(n), 'psi_distance': float(distance.psi_distance[-1]),
                            'curl_distance': float(distance.curl_distance[-1])})
    shrink = [{'psi': a['psi_distance'] / b['psi_distance'] if b['psi_distance'] else math.inf,
               'curl': a['curl_distance'] / b['curl_distance'] if b['curl_distance'] else math.inf}
              for a, b in zip(report.rows, report.rows[1:])]
    report.summary = {'shrink_factors': shrink}
    return report


def run_sweep(config, axis, values, workers=1, dt_scaling='quadratic'):
    if axis not in AXES:
        raise InvalidArgument('unknown sweep axis %r' % axis)
    if not values:
        raise InvalidArgument('sweep needs at least one value')
    logger.info('sweeping %s over %s', axis, values)
    if axis == 'h':
        return refinement_sweep(config, values, dt_scaling, workers)
    if axis == 'dt':
        return timestep_sweep(config, values, workers)
    if axis == 'N':
        return galerkin_sweep(config, values, workers)
    if axis == 'delta':
        return perturbation_sweep(config, values, workers)
    return gauge_sweep(config, values, workers)
