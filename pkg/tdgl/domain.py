'''
Voxelized computational domains.

Cells are addressed lexicographically with x running fastest (Fortran order)
everywhere: masks, descriptors, flattened fields and file payloads.
'''
# -*- coding: utf-8 -*-
import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from tdgl.exceptions import InvalidArgument
from tdgl.utils import canonical_json, run_length_decode, run_length_encode, sha256_hex

logger = logging.getLogger(__name__)

AXES = ('x', 'y', 'z')


@dataclass(frozen=True, eq=False)
class VoxelDomain:
    ''' Axis aligned voxelization of a polyhedron inside the box [0, L]^3 '''
    cell_counts: tuple
    spacing: tuple
    mask: np.ndarray
    lengths: tuple
    kind: str = 'mask'

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != tuple(self.cell_counts):
            raise InvalidArgument('mask shape %s does not match cell counts %s' % (mask.shape, self.cell_counts))
        if not mask.any():
            raise InvalidArgument('domain mask has no inside cell')
        _, components = ndimage.label(mask)
        if components != 1:
            raise InvalidArgument('domain mask is not face-connected (%d components)' % components)
        mask.flags.writeable = False
        object.__setattr__(self, 'mask', mask)

    @property
    def bbox(self):
        return tuple((0.0, length) for length in self.lengths)

    @property
    def n_inside(self):
        return int(self.mask.sum())

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def volume(self):
        return self.n_inside * self.cell_volume

    def to_descriptor(self):
        return {
            'kind': self.kind,
            'cell_counts': [int(n) for n in self.cell_counts],
            'lengths': [float(length) for length in self.lengths],
            'mask_rle': run_length_encode(self.mask.ravel(order='F')),
        }

    def to_json(self):
        return canonical_json(self.to_descriptor())

    def digest(self):
        return sha256_hex(self.to_json())

    def __eq__(self, other):
        if not isinstance(other, VoxelDomain):
            return NotImplemented
        return (tuple(self.cell_counts) == tuple(other.cell_counts)
                and tuple(self.lengths) == tuple(other.lengths)
                and np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash(self.digest())


@dataclass(frozen=True, eq=False)
class BoundaryData:
    '''
    Boundary faces with outward normals, and re-entrant grid edges.

    ``faces`` rows are (axis, i, j, k) indices into the face array of that axis,
    ``reentrant_edges`` rows are (axis, i, j, k) indices into the edge array of
    that axis. Both are sorted by axis, then in Fortran order.
    '''
    faces: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    reentrant_edges: np.ndarray

    @property
    def boundary_faces(self):
        return [(tuple(int(v) for v in face), tuple(int(v) for v in normal))
                for face, normal in zip(self.faces, self.normals)]

    def area_vector_sum(self):
        return (self.normals * self.areas[:, None]).sum(axis=0)


def face_shape(cell_counts, axis):
    shape = list(cell_counts)
    shape[axis] += 1
    return tuple(shape)


def edge_shape(cell_counts, axis):
    shape = [n + 1 for n in cell_counts]
    shape[axis] -= 1
    return tuple(shape)


def face_cell_flags(mask, axis):
    ''' Inside flags of the cells below and above every face normal to ``axis`` '''
    pad = [(0, 0)] * 3
    pad[axis] = (1, 1)
    padded = np.pad(mask, pad)
    lower = [slice(None)] * 3
    upper = [slice(None)] * 3
    lower[axis] = slice(None, -1)
    upper[axis] = slice(1, None)
    return padded[tuple(lower)], padded[tuple(upper)]


def edge_cell_counts(mask, axis):
    ''' Number of inside cells among the four cells around every edge parallel to ``axis`` '''
    others = [d for d in range(3) if d != axis]
    pad = [(0, 0)] * 3
    for d in others:
        pad[d] = (1, 1)
    padded = np.pad(mask.astype(np.int8), pad)
    count = np.zeros(edge_shape(mask.shape, axis), dtype=np.int8)
    for first in (slice(None, -1), slice(1, None)):
        for second in (slice(None, -1), slice(1, None)):
            index = [slice(None)] * 3
            index[others[0]] = first
            index[others[1]] = second
            count += padded[tuple(index)]
    return count


def _fortran_indices(flags):
    ''' (i, j, k) rows of the true entries of ``flags`` in Fortran order '''
    flat = np.flatnonzero(flags.ravel(order='F'))
    return np.stack(np.unravel_index(flat, flags.shape, order='F'), axis=1)


def _check_box(cell_counts, lengths):
    if len(cell_counts) != 3 or len(lengths) != 3:
        raise InvalidArgument('cell counts and lengths must be triples')
    counts = tuple(int(n) for n in cell_counts)
    if any(n != c for n, c in zip(counts, cell_counts)):
        raise InvalidArgument('cell counts must be integers: %s' % (cell_counts,))
    if any(n < 2 for n in counts):
        raise InvalidArgument('every cell count must be at least 2: %s' % (counts,))
    lengths = tuple(float(length) for length in lengths)
    if any(not np.isfinite(length) or length <= 0 for length in lengths):
        raise InvalidArgument('every length must be positive: %s' % (lengths,))
    spacing = tuple(length / n for length, n in zip(lengths, counts))
    return counts, lengths, spacing


def _axis_index(axis):
    if isinstance(axis, str):
        if axis not in AXES:
            raise InvalidArgument('unknown axis %r' % axis)
        return AXES.index(axis)
    if axis not in (0, 1, 2):
        raise InvalidArgument('unknown axis %r' % (axis,))
    return int(axis)


def build_box_domain(cell_counts, lengths):
    counts, lengths, spacing = _check_box(cell_counts, lengths)
    return VoxelDomain(counts, spacing, np.ones(counts, dtype=bool), lengths, kind='box')


def build_lshape_domain(cell_counts, lengths, removed_quadrant=('x', 'y')):
    ''' Box minus the prism where both ``removed_quadrant`` coordinates exceed half the box '''
    counts, lengths, spacing = _check_box(cell_counts, lengths)
    first, second = (_axis_index(axis) for axis in removed_quadrant)
    if first == second:
        raise InvalidArgument('removed quadrant needs two distinct axes')
    if counts[first] % 2 or counts[second] % 2:
        raise InvalidArgument('L-shape needs even counts along the removed quadrant: %s' % (counts,))
    mask = np.ones(counts, dtype=bool)
    index = [slice(None)] * 3
    index[first] = slice(counts[first] // 2, None)
    index[second] = slice(counts[second] // 2, None)
    mask[tuple(index)] = False
    return VoxelDomain(counts, spacing, mask, lengths, kind='lshape')


def build_fichera_domain(cell_counts, lengths):
    counts, lengths, spacing = _check_box(cell_counts, lengths)
    if any(n % 2 for n in counts):
        raise InvalidArgument('Fichera corner needs even counts: %s' % (counts,))
    mask = np.ones(counts, dtype=bool)
    mask[counts[0] // 2:, counts[1] // 2:, counts[2] // 2:] = False
    return VoxelDomain(counts, spacing, mask, lengths, kind='fichera')


def domain_from_mask(mask, lengths):
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise InvalidArgument('mask must be three dimensional')
    counts, lengths, spacing = _check_box(mask.shape, lengths)
    return VoxelDomain(counts, spacing, mask, lengths, kind='mask')


def domain_from_descriptor(descriptor):
    if isinstance(descriptor, str):
        descriptor = json.loads(descriptor)
    try:
        counts = tuple(int(n) for n in descriptor['cell_counts'])
        lengths = descriptor['lengths']
        flags = run_length_decode(descriptor['mask_rle'])
    except (KeyError, TypeError, ValueError) as error:
        raise InvalidArgument('malformed domain descriptor: %s' % error) from error
    if flags.size != int(np.prod(counts)):
        raise InvalidArgument('descriptor mask has %d entries, expected %d' % (flags.size, np.prod(counts)))
    counts, lengths, spacing = _check_box(counts, lengths)
    mask = flags.reshape(counts, order='F')
    return VoxelDomain(counts, spacing, mask, lengths, kind=descriptor.get('kind', 'mask'))


def classify_boundary(domain):
    faces, normals, areas = [], [], []
    for axis in range(3):
        lower, upper = face_cell_flags(domain.mask, axis)
        area = domain.cell_volume / domain.spacing[axis]
        for flags, sign in ((lower & ~upper, 1), (upper & ~lower, -1)):
            rows = _fortran_indices(flags)
            faces.append(np.column_stack([np.full(len(rows), axis), rows]))
            normal = np.zeros((len(rows), 3), dtype=int)
            normal[:, axis] = sign
            normals.append(normal)
            areas.append(np.full(len(rows), area))

    faces = np.concatenate(faces).astype(int)
    normals = np.concatenate(normals)
    areas = np.concatenate(areas)
    order = np.lexsort((faces[:, 1], faces[:, 2], faces[:, 3], faces[:, 0]))

    edges = []
    for axis in range(3):
        rows = _fortran_indices(edge_cell_counts(domain.mask, axis) == 3)
        edges.append(np.column_stack([np.full(len(rows), axis), rows]))
    edges = np.concatenate(edges).astype(int).reshape(-1, 4)

    logger.debug('classified %d boundary faces and %d re-entrant edges', len(faces), len(edges))
    return BoundaryData(faces[order], normals[order], areas[order], edges)
