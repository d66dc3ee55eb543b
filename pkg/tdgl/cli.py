'''
Command line front end: ``tdgl run | sweep | diagnose | eigs``.

stdout carries one JSON document per invocation, logs go to stderr, and
every failure exits nonzero with a JSON error object on stderr.
'''
# -*- coding: utf-8 -*-
import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from tdgl import __version__, diagnostics, dynamics, sweeps
from tdgl.base.fields import VectorPotentialField
from tdgl.config import parse_config
from tdgl.exceptions import InvalidArgument, TDGLError
from tdgl.galerkin import assemble_M, eigenbasis_M
from tdgl.records import load_record, write_record
from tdgl.settings import get_config

logger = logging.getLogger(__name__)

IO_EXIT_CODE = 3
CHECKS = ('energy', 'bound', 'weak', 'stability', 'ratio', 'gauge')


def _number(text):
    if text == 'full':
        return text
    try:
        return int(text)
    except ValueError:
        return float(text)


def build_parser():
    parser = argparse.ArgumentParser(prog='tdgl', description='Lorentz-gauge TDGL simulator on voxel domains.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='log at DEBUG level')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='log warnings and errors only')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    run = commands.add_parser('run', help='run one simulation and store its record')
    run.add_argument('config', metavar='CONFIG', help='TOML or JSON simulation document')
    run.add_argument('--out', metavar='DIR', help='record directory (default: under the output root)')

    sweep = commands.add_parser('sweep', help='run a family of simulations derived from one config')
    sweep.add_argument('config', metavar='CONFIG')
    sweep.add_argument('--axis', required=True, choices=sweeps.AXES)
    sweep.add_argument('--values', required=True, nargs='+', type=_number, metavar='VALUE',
                       help='cells along x (h, gauge), time steps (dt), basis sizes or "full" (N), '
                            'perturbations (delta)')
    sweep.add_argument('--workers', type=int, default=1, metavar='N', help='parallel processes')
    sweep.add_argument('--dt-scaling', default='quadratic', choices=('quadratic', 'linear', 'fixed'),
                       help='dt scaling of the h sweep')
    sweep.add_argument('--out', metavar='DIR', help='report directory')

    diagnose = commands.add_parser('diagnose', help='replay a diagnostic on stored records')
    diagnose.add_argument('record', metavar='RECORD_DIR')
    diagnose.add_argument('--check', required=True, choices=CHECKS)
    diagnose.add_argument('--other', metavar='RECORD_DIR', help='second record for stability and gauge checks')
    diagnose.add_argument('--out', metavar='FILE', help='CSV output (default: RECORD_DIR/diagnostics/CHECK.csv)')

    eigs = commands.add_parser('eigs', help='compute and store a Galerkin basis')
    eigs.add_argument('config', metavar='CONFIG')
    eigs.add_argument('-N', type=int, required=True, dest='N', help='number of eigenpairs')
    eigs.add_argument('--method', default='auto', choices=('auto', 'iterative', 'dense'))
    eigs.add_argument('--out', metavar='FILE', help='basis file (default: OUTPUT_ROOT/NAME-basis-N.bin)')
    return parser


def configure_logging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def cmd_run(args):
    config = parse_config(args.config)
    record = dynamics.run(config)
    directory = write_record(record, directory=args.out)
    summary = {
        'directory': str(directory),
        'status': record.status,
        'config_hash': record.config_hash,
        'steps': record.solver_stats.get('steps', 0),
        'final_time': record.snapshots[-1].time,
        'final_energy': record.series['energy'][-1],
        'final_distance_to_initial': record.final_distance_to_initial(),
        'warnings': record.warnings,
        'failure': record.failure,
    }
    return summary, 0 if record.status == 'completed' else 4


def cmd_sweep(args):
    config = parse_config(args.config)
    report = sweeps.run_sweep(config, args.axis, args.values, args.workers, args.dt_scaling)
    out = Path(args.out) if args.out else Path(get_config()['OUTPUT_ROOT']) / ('%s-sweep-%s' % (config.name, args.axis))
    report.write(out)
    return dict(report.as_dict(), directory=str(out)), 0


def _rows_energy(record):
    rows = [{'time': t, 'quantity': 'energy', 'value': e}
            for t, e in zip(record.column('time'), record.column('energy'))]
    lyapunov = diagnostics.lyapunov_residual(record)
    rows += [{'time': t, 'quantity': 'lyapunov_residual', 'value': r}
             for t, r in zip(lyapunov.times, lyapunov.residual)]
    gronwall = diagnostics.gronwall_envelope(record)
    rows += [{'time': t, 'quantity': 'gronwall_envelope', 'value': v}
             for t, v in zip(gronwall.times, gronwall.envelope)]
    balance = diagnostics.order_parameter_balance(record)
    rows += [{'time': t, 'quantity': 'order_parameter_balance', 'value': r}
             for t, r in zip(balance.times, balance.residual)]
    summary = {'lyapunov_max_positive': lyapunov.max_positive, 'gronwall_holds': gronwall.holds,
               'gronwall_worst_margin': gronwall.worst_margin}
    return rows, summary


def _rows_bound(record):
    report = diagnostics.bound_monitor(record)
    rows = [{'time': t, 'quantity': 'max_abs_psi', 'value': m} for t, m in zip(report.times, report.max_abs_series)]
    rows += [{'time': t, 'quantity': 'excess', 'value': e} for t, e in zip(report.times, report.excess)]
    return rows, {'max_abs_psi': report.max_abs, 'max_excess': float(report.excess.max())}


def _rows_weak(record):
    times, residuals = diagnostics.weak_residual_series(record)
    rows = [{'time': t, 'quantity': 'weak_residual_psi', 'value': r[0]} for t, r in zip(times, residuals)]
    rows += [{'time': t, 'quantity': 'weak_residual_A', 'value': r[1]} for t, r in zip(times, residuals)]
    return rows, {'max_weak_residual_psi': float(residuals[:, 0].max()),
                  'max_weak_residual_A': float(residuals[:, 1].max())}


def _rows_ratio(record):
    rows = []
    for snapshot in record.snapshots:
        field = VectorPotentialField(record.grid, snapshot.A)
        if not np.any(field.values):
            continue
        rows.append({'time': snapshot.time, 'quantity': 'norm_ratio', 'value': diagnostics.norm_ratio(field)})
        rows.append({'time': snapshot.time, 'quantity': 'embedding_ratio',
                     'value': diagnostics.embedding_ratio(field)})
    if not rows:
        raise InvalidArgument('every stored magnetic potential is zero; the norm ratio is undefined')
    return rows, {'max_norm_ratio': max(row['value'] for row in rows if row['quantity'] == 'norm_ratio')}


def _rows_stability(record, other):
    delta = diagnostics.stability_compare(record, other)
    rows = [{'time': t, 'quantity': 'stability_quantity', 'value': q} for t, q in zip(delta.times, delta.quantity)]
    return rows, {'growth_rate': delta.growth_rate, 'terminal': delta.terminal}


def _rows_gauge(record, other):
    lorentz, zero = (record, other) if other.config.mode == 'zero_potential' else (other, record)
    distance = diagnostics.gauge_compare(lorentz, zero)
    rows = [{'time': t, 'quantity': 'psi_modulus_distance', 'value': d}
            for t, d in zip(distance.times, distance.psi_distance)]
    rows += [{'time': t, 'quantity': 'curl_distance', 'value': d}
             for t, d in zip(distance.times, distance.curl_distance)]
    return rows, {'final_psi_distance': float(distance.psi_distance[-1]),
                  'final_curl_distance': float(distance.curl_distance[-1])}


def _write_rows(path, rows, check, record):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=('time', 'quantity', 'value', 'check', 'config_hash'),
                                lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(dict(row, time=repr(float(row['time'])), value=repr(float(row['value'])),
                                 check=check, config_hash=record.config_hash))


def cmd_diagnose(args):
    record = load_record(args.record)
    if args.check in ('stability', 'gauge'):
        if not args.other:
            raise InvalidArgument('--check %s needs --other RECORD_DIR' % args.check)
        rows, summary = {'stability': _rows_stability, 'gauge': _rows_gauge}[args.check](
            record, load_record(args.other))
    else:
        rows, summary = {'energy': _rows_energy, 'bound': _rows_bound, 'weak': _rows_weak,
                         'ratio': _rows_ratio}[args.check](record)
    out = Path(args.out) if args.out else Path(args.record) / 'diagnostics' / ('%s.csv' % args.check)
    _write_rows(out, rows, args.check, record)
    return {'check': args.check, 'csv': str(out), 'rows': len(rows), 'summary': summary}, 0


def cmd_eigs(args):
    config = parse_config(args.config)
    grid = config.build_grid()
    operator = assemble_M(grid, config.galerkin.H_zero_bc)
    basis = eigenbasis_M(operator, args.N, args.method, config.settings())
    out = Path(args.out) if args.out else Path(get_config()['OUTPUT_ROOT']) / (
        '%s-basis-%d.bin' % (config.name, args.N))
    out.parent.mkdir(parents=True, exist_ok=True)
    basis.save(out)
    return dict(basis.header(), path=str(out), eigenvalues=[float(v) for v in basis.eigenvalues]), 0


COMMANDS = {'run': cmd_run, 'sweep': cmd_sweep, 'diagnose': cmd_diagnose, 'eigs': cmd_eigs}


def _json_safe(value):
    ''' NaN and infinities become null '''
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    return value


def _fail(payload):
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + '\n')
    return payload['exit_code']


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        result, code = COMMANDS[args.command](args)
    except TDGLError as error:
        logger.debug('command %s failed', args.command, exc_info=True)
        return _fail(error.to_dict())
    except OSError as error:
        return _fail({'error': type(error).__name__, 'message': str(error), 'exit_code': IO_EXIT_CODE,
                      'path': error.filename})
    sys.stdout.write(json.dumps(_json_safe(result), sort_keys=True, default=str, allow_nan=False) + '\n')
    return code
