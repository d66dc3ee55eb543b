'''
Run records and their on-disk artifacts.

A run directory holds ``series.csv`` (one row per time step), ``snapshots/``
with ``.npy`` arrays of psi and A (plus optional VTK files) and
``manifest.json`` with the configuration, solver statistics and content
hashes of every other file. Nothing time-dependent is written into the
hashed files, so identical runs produce identical hashes.
'''
# -*- coding: utf-8 -*-
import csv
import functools
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from tdgl import __version__
from tdgl.base.fields import OrderParameterField, VectorPotentialField
from tdgl.config import config_from_dict, config_hash
from tdgl.exceptions import InvalidArgument, RecordError
from tdgl.settings import get_config
from tdgl.utils import canonical_json, git_blob_hash, sha256_hex

logger = logging.getLogger(__name__)

SERIES_COLUMNS = (
    'step', 'time', 'energy', 'kinetic', 'condensation', 'field', 'gauge',
    'max_abs_psi', 'excess', 'psi_l2', 'psi_l4_4', 'psi_h1', 'A_l2', 'A_m_norm', 'div_A_sq',
    'dpsi_dt_sq', 'dA_dt_sq', 'picard_iterations', 'picard_distance', 'error_psi', 'error_A',
)
MANIFEST = 'manifest.json'
SERIES = 'series.csv'
SNAPSHOT_DIR = 'snapshots'


@dataclass(eq=False)
class Snapshot:
    step: int
    time: float
    psi: np.ndarray
    A: np.ndarray
    coefficients: Optional[np.ndarray] = None


@dataclass(eq=False)
class RunRecord:
    config: object
    config_hash: str
    series: dict = field(default_factory=lambda: {column: [] for column in SERIES_COLUMNS})
    snapshots: list = field(default_factory=list)
    solver_stats: dict = field(default_factory=dict)
    status: str = 'running'
    failure: Optional[dict] = None
    warnings: list = field(default_factory=list)
    directory: Optional[str] = None

    @classmethod
    def start(cls, config):
        return cls(config, config_hash(config))

    @functools.cached_property
    def grid(self):
        return self.config.build_grid()

    @property
    def times(self):
        return np.array([snapshot.time for snapshot in self.snapshots])

    def append_row(self, row):
        for column in SERIES_COLUMNS:
            self.series[column].append(row.get(column, math.nan))

    def column(self, name):
        if name not in self.series:
            raise InvalidArgument('record has no series column %r' % name)
        return np.asarray(self.series[name], dtype=float)

    def psi(self, index):
        return OrderParameterField(self.grid, self.snapshots[index].psi)

    def potential(self, index):
        return VectorPotentialField(self.grid, self.snapshots[index].A)

    def final_distance_to_initial(self):
        ''' L2 distance of the last snapshot to the first '''
        first, last = self.snapshots[0], self.snapshots[-1]
        vol = self.grid.cell_volume
        return float(np.sqrt(vol * (np.sum(np.abs(last.psi - first.psi) ** 2) + np.sum((last.A - first.A) ** 2))))

    def digest(self):
        ''' Hash of the series text and every snapshot payload '''
        parts = [_series_text(self.series).encode('utf-8')]
        for snapshot in self.snapshots:
            parts.append(_npy_bytes(snapshot.psi))
            parts.append(_npy_bytes(snapshot.A))
            if snapshot.coefficients is not None:
                parts.append(_npy_bytes(snapshot.coefficients))
        return sha256_hex(b''.join(parts))


def _format(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def _series_text(series):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SERIES_COLUMNS)
    for row in zip(*(series[column] for column in SERIES_COLUMNS)):
        writer.writerow([_format(value) for value in row])
    return buffer.getvalue()


def _npy_bytes(array):
    buffer = io.BytesIO()
    np.save(buffer, np.ascontiguousarray(array), allow_pickle=False)
    return buffer.getvalue()


def vtk_text(grid, psi_values, A_values, title='tdgl state'):
    ''' Legacy ASCII STRUCTURED_POINTS file with psi and A at cell centres '''
    full = np.zeros(grid.n_cells_full, dtype=complex)
    full[grid.cell_index] = psi_values
    vectors = np.zeros((grid.n_cells_full, 3))
    vectors[grid.cell_index] = grid.face_to_center(A_values)
    inside = np.zeros(grid.n_cells_full, dtype=int)
    inside[grid.cell_index] = 1

    lines = [
        '# vtk DataFile Version 3.0',
        title,
        'ASCII',
        'DATASET STRUCTURED_POINTS',
        'DIMENSIONS %d %d %d' % tuple(n + 1 for n in grid.shape),
        'ORIGIN 0 0 0',
        'SPACING %r %r %r' % tuple(float(h) for h in grid.spacing),
        'CELL_DATA %d' % grid.n_cells_full,
    ]
    for name, values in (('psi_re', full.real), ('psi_im', full.imag), ('psi_abs', np.abs(full))):
        lines += ['SCALARS %s double 1' % name, 'LOOKUP_TABLE default']
        lines += [repr(float(value)) for value in values]
    lines += ['SCALARS inside int 1', 'LOOKUP_TABLE default'] + [str(value) for value in inside]
    lines.append('VECTORS A double')
    lines += ['%r %r %r' % tuple(float(v) for v in row) for row in vectors]
    return '\n'.join(lines) + '\n'


def run_directory(record, root=None):
    root = Path(root or get_config()['OUTPUT_ROOT'])
    return root / ('%s-%s' % (record.config.name, record.config_hash[:12]))


def _write(path, payload, hashes, directory):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    hashes[path.relative_to(directory).as_posix()] = {'sha256': sha256_hex(payload), 'git_blob': git_blob_hash(payload)}


def write_record(record, root=None, directory=None):
    directory = Path(directory) if directory else run_directory(record, root)
    directory.mkdir(parents=True, exist_ok=True)
    hashes = {}
    grid = record.grid

    _write(directory / SERIES, _series_text(record.series).encode('utf-8'), hashes, directory)
    entries = []
    for snapshot in record.snapshots:
        stem = '%06d' % snapshot.step
        entry = {'step': snapshot.step, 'time': snapshot.time,
                 'psi': '%s/psi_%s.npy' % (SNAPSHOT_DIR, stem), 'A': '%s/A_%s.npy' % (SNAPSHOT_DIR, stem)}
        _write(directory / entry['psi'], _npy_bytes(snapshot.psi), hashes, directory)
        _write(directory / entry['A'], _npy_bytes(snapshot.A), hashes, directory)
        if snapshot.coefficients is not None:
            entry['coefficients'] = '%s/coefficients_%s.npy' % (SNAPSHOT_DIR, stem)
            _write(directory / entry['coefficients'], _npy_bytes(snapshot.coefficients), hashes, directory)
        if record.config.output.vtk:
            entry['vtk'] = '%s/state_%s.vtk' % (SNAPSHOT_DIR, stem)
            text = vtk_text(grid, snapshot.psi, snapshot.A, 'tdgl %s t=%r' % (record.config.name, snapshot.time))
            _write(directory / entry['vtk'], text.encode('ascii'), hashes, directory)
        entries.append(entry)

    manifest = {
        'tdgl_version': __version__,
        'config': record.config.to_dict(),
        'config_hash': record.config_hash,
        'status': record.status,
        'failure': record.failure,
        'warnings': record.warnings,
        'solver_stats': record.solver_stats,
        'snapshots': entries,
        'files': hashes,
        'content_hash': sha256_hex(canonical_json(hashes)),
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    record.directory = str(directory)
    logger.info('wrote run record to %s', directory)
    return directory


def _read_verified(directory, relative, hashes):
    path = directory / relative
    if not path.is_file():
        raise RecordError('missing file %s' % relative, path)
    payload = path.read_bytes()
    expected = hashes.get(relative)
    if expected is not None and sha256_hex(payload) != expected['sha256']:
        raise RecordError('corrupt file %s (hash mismatch)' % relative, path)
    return payload


def _read_series(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != SERIES_COLUMNS:
        raise RecordError('series.csv has an unexpected header')
    series = {column: [] for column in SERIES_COLUMNS}
    for row in rows[1:]:
        for column, value in zip(SERIES_COLUMNS, row):
            series[column].append(int(value) if column in ('step', 'picard_iterations') else float(value))
    return series


def _read_array(directory, relative, hashes):
    payload = _read_verified(directory, relative, hashes)
    try:
        return np.load(io.BytesIO(payload), allow_pickle=False)
    except ValueError as error:
        raise RecordError('corrupt snapshot %s: %s' % (relative, error), directory / relative) from error


def load_record(directory):
    directory = Path(directory)
    manifest_path = directory / MANIFEST
    if not manifest_path.is_file():
        raise RecordError('missing %s in %s' % (MANIFEST, directory), manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding='utf-8'))
        config = config_from_dict(manifest['config'])
        hashes = manifest['files']
    except (ValueError, KeyError) as error:
        raise RecordError('unreadable manifest in %s: %s' % (directory, error), manifest_path) from error

    series = _read_series(_read_verified(directory, SERIES, hashes).decode('utf-8'))
    snapshots = []
    for entry in manifest['snapshots']:
        coefficients = None
        if 'coefficients' in entry:
            coefficients = _read_array(directory, entry['coefficients'], hashes)
        snapshots.append(Snapshot(entry['step'], entry['time'], _read_array(directory, entry['psi'], hashes),
                                  _read_array(directory, entry['A'], hashes), coefficients))

    record = RunRecord(config, manifest['config_hash'], series, snapshots, manifest['solver_stats'],
                       manifest['status'], manifest['failure'], manifest['warnings'], directory=str(directory))
    grid = record.grid
    for snapshot in snapshots:
        if snapshot.psi.shape != (grid.n_cells,) or snapshot.A.shape != (grid.n_faces,):
            raise RecordError('snapshot at step %d does not match the recorded domain' % snapshot.step, directory)
    return record
