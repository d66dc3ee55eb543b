'''
Staggered (MAC) grid operators.

psi lives at cell centres, A component-wise on faces, curls on edges. All
operators are assembled once per domain as scipy sparse matrices from
Kronecker products of 1D difference matrices on the full bounding box, then
restricted to the inside cells, the interior faces (degrees of freedom of A)
and the interior edges.

Identities that hold exactly by construction:

* ``div == -grad.T`` (summation by parts, face and cell volumes coincide),
* ``curl @ grad == 0`` on interior edges.
'''
# -*- coding: utf-8 -*-
import functools
import logging

import numpy as np
import scipy.sparse as sp

from tdgl.base.fields import CenterField, EdgeField, FaceField, OrderParameterField
from tdgl.domain import edge_cell_counts, edge_shape, face_cell_flags, face_shape
from tdgl.exceptions import InvalidArgument

logger = logging.getLogger(__name__)

CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def _diff_to_nodes(n, h):
    ''' (n+1) x n centred difference from cell values to the n+1 nodes, zero past either end '''
    return sp.diags([np.ones(n), -np.ones(n)], [0, -1], shape=(n + 1, n), format='csr') / h


def _diff_to_centers(n, h):
    return (-_diff_to_nodes(n, h).T).tocsr()


def _mean_to_nodes(n):
    return sp.diags([np.full(n, 0.5), np.full(n, 0.5)], [0, -1], shape=(n + 1, n), format='csr')


def _mean_to_centers(n):
    return _mean_to_nodes(n).T.tocsr()


def _along(axis, op, shape):
    ''' Apply the 1D operator ``op`` along ``axis`` of a Fortran-ordered array of ``shape`` '''
    factors = [sp.identity(n, format='csr') for n in shape]
    factors[axis] = op
    return sp.kron(factors[2], sp.kron(factors[1], factors[0]), format='csr')


def _selector(index, size):
    rows = np.arange(len(index))
    return sp.csr_matrix((np.ones(len(index)), (rows, index)), shape=(len(index), size))


def _points(shape, offsets, spacing):
    index = np.indices(shape).reshape(3, -1, order='F').T
    return (index + np.asarray(offsets)) * np.asarray(spacing)


class StaggeredGrid:
    ''' Index maps and sparse operators of one voxel domain '''

    def __init__(self, domain):
        self.domain = domain
        self.shape = tuple(domain.cell_counts)
        self.spacing = tuple(domain.spacing)
        self.cell_volume = domain.cell_volume
        self.face_shapes = tuple(face_shape(self.shape, axis) for axis in range(3))
        self.edge_shapes = tuple(edge_shape(self.shape, axis) for axis in range(3))

        self.n_cells_full = int(np.prod(self.shape))
        self.cell_index = np.flatnonzero(domain.mask.ravel(order='F'))
        self.n_cells = len(self.cell_index)

        self._build_faces()
        self._build_edges()
        self._build_operators()
        logger.debug('grid %s: %d cells, %d faces, %d interior and %d boundary edges',
                     self.shape, self.n_cells, self.n_faces, self.n_interior_edges, self.n_boundary_edges)

    def _build_faces(self):
        self.face_index = []
        self.boundary_face_masks = []
        for axis in range(3):
            lower, upper = face_cell_flags(self.domain.mask, axis)
            self.face_index.append(np.flatnonzero((lower & upper).ravel(order='F')))
            self.boundary_face_masks.append(lower ^ upper)
        sizes = [len(index) for index in self.face_index]
        self.face_offsets = np.concatenate(([0], np.cumsum(sizes)))
        self.n_faces = int(self.face_offsets[-1])
        self.face_axis = np.repeat(np.arange(3), sizes)

        full_offsets = np.concatenate(([0], np.cumsum([np.prod(shape) for shape in self.face_shapes])))
        self.n_faces_full = int(full_offsets[-1])
        self._face_global = np.concatenate([index + offset for index, offset in zip(self.face_index, full_offsets)])

    def _build_edges(self):
        self.edge_counts = tuple(edge_cell_counts(self.domain.mask, axis) for axis in range(3))
        counts = np.concatenate([count.ravel(order='F') for count in self.edge_counts])
        self.n_edges_full = len(counts)
        self.interior_edges = np.flatnonzero(counts == 4)
        self.boundary_edges = np.flatnonzero((counts > 0) & (counts < 4))
        self.n_interior_edges = len(self.interior_edges)
        self.n_boundary_edges = len(self.boundary_edges)
        self.edge_weights = counts * (self.cell_volume / 4.0)

    def _build_operators(self):
        cells = _selector(self.cell_index, self.n_cells_full)
        faces = _selector(self._face_global, self.n_faces_full)

        grad_blocks, mean_blocks, div_blocks = [], [], []
        for axis in range(3):
            n, h = self.shape[axis], self.spacing[axis]
            grad_blocks.append([_along(axis, _diff_to_nodes(n, h), self.shape)])
            mean_blocks.append([_along(axis, _mean_to_nodes(n), self.shape)])
            div_blocks.append(_along(axis, _diff_to_centers(n, h), self.face_shapes[axis]))

        curl_blocks = [[None] * 3 for _ in range(3)]
        for a, b, c in CYCLIC:
            curl_blocks[a][c] = _along(b, _diff_to_nodes(self.shape[b], self.spacing[b]), self.face_shapes[c])
            curl_blocks[a][b] = -_along(c, _diff_to_nodes(self.shape[c], self.spacing[c]), self.face_shapes[b])

        self.box_divergence = sp.bmat([div_blocks], format='csr')
        self.grad = (faces @ sp.bmat(grad_blocks, format='csr') @ cells.T).tocsr()
        self.avg = (faces @ sp.bmat(mean_blocks, format='csr') @ cells.T).tocsr()
        self.div = (cells @ self.box_divergence @ faces.T).tocsr()
        self.curl_all = (sp.bmat(curl_blocks, format='csr') @ faces.T).tocsr()
        self.curl = self.curl_all[self.interior_edges].tocsr()
        self.curl_boundary = self.curl_all[self.boundary_edges].tocsr()
        self.curl_curl = (self.curl.T @ self.curl).tocsr()
        self.grad_div = (self.div.T @ self.div).tocsr()

        self.center_average = []
        for axis in range(3):
            to_centers = _along(axis, _mean_to_centers(self.shape[axis]), self.face_shapes[axis])
            picks = _selector(self.face_index[axis], int(np.prod(self.face_shapes[axis])))
            self.center_average.append((cells @ to_centers @ picks.T).tocsr())

    # index helpers

    def face_slice(self, axis):
        return slice(self.face_offsets[axis], self.face_offsets[axis + 1])

    def scatter_faces(self, values, axis):
        full = np.zeros(int(np.prod(self.face_shapes[axis])), dtype=np.asarray(values).dtype)
        full[self.face_index[axis]] = values[self.face_slice(axis)]
        return full.reshape(self.face_shapes[axis], order='F')

    def cell_points(self):
        return _points(self.shape, (0.5, 0.5, 0.5), self.spacing)[self.cell_index]

    def full_face_points(self, axis):
        offsets = [0.5, 0.5, 0.5]
        offsets[axis] = 0.0
        return _points(self.face_shapes[axis], offsets, self.spacing)

    def face_points(self, axis):
        ''' Points of the interior faces normal to ``axis`` '''
        return self.full_face_points(axis)[self.face_index[axis]]

    def edge_points(self, axis):
        offsets = [0.0, 0.0, 0.0]
        offsets[axis] = 0.5
        return _points(self.edge_shapes[axis], offsets, self.spacing)

    def sample_faces(self, function):
        ''' Face degrees of freedom of a vector function ``function(x, y, z) -> (fx, fy, fz)`` '''
        values = []
        for axis in range(3):
            points = self.face_points(axis)
            if len(points):
                values.append(np.asarray(function(points[:, 0], points[:, 1], points[:, 2])[axis], dtype=float))
            else:
                values.append(np.zeros(0))
        return np.concatenate(values)

    def face_to_center(self, values):
        ''' (n_cells, 3) cell-centred interpolation of a face field '''
        return np.column_stack([self.center_average[axis] @ values[self.face_slice(axis)] for axis in range(3)])

    # covariant operators

    def covariant_matrix(self, A_values, kappa):
        ''' K(A) = (i/kappa) grad + diag(A) avg, faces x cells '''
        return ((1j / kappa) * self.grad + sp.diags(A_values) @ self.avg).tocsr()

    def covariant_laplacian_matrix(self, A_values, kappa):
        K = self.covariant_matrix(A_values, kappa)
        return (K.conj().T @ K).tocsr()


@functools.lru_cache(maxsize=16)
def grid_for(domain):
    return StaggeredGrid(domain)


def _grid_of(*fields):
    grid = fields[0].grid
    for other in fields[1:]:
        if other.grid is not grid and other.grid.domain != grid.domain:
            raise InvalidArgument('fields live on different domains')
    return grid


def grad_center_to_face(f):
    grid = f.grid
    return FaceField(grid, grid.grad @ f.values)


def div_face_to_center(A):
    grid = A.grid
    return CenterField(grid, grid.div @ A.values)


def applied_edge_values(grid, H):
    return H.edge_samples(grid).values


def curl_face_to_edge(A, H):
    ''' Curl on interior edges, edge-aligned H on boundary edges, zero outside '''
    grid = A.grid
    values = np.zeros(grid.n_edges_full)
    values[grid.interior_edges] = grid.curl @ A.values
    if not H.is_zero:
        values[grid.boundary_edges] = applied_edge_values(grid, H)[grid.boundary_edges]
    return EdgeField.from_values(grid, values)


def curlcurl_minus_graddiv(A, H):
    grid = A.grid
    result = grid.curl_curl @ A.values + grid.grad_div @ A.values
    if not H.is_zero:
        result = result + grid.curl_boundary.T @ applied_edge_values(grid, H)[grid.boundary_edges]
    return FaceField(grid, result)


def applied_source(grid, H):
    '''
    Face data of curl H once boundary edges carry H.

    The boundary-edge part of curl H cancels against the inserted boundary
    curl of curlcurl_minus_graddiv, leaving the interior-edge transpose curl.
    '''
    if H.is_zero:
        return np.zeros(grid.n_faces)
    return grid.curl.T @ applied_edge_values(grid, H)[grid.interior_edges]


def covariant_grad(psi, A, kappa):
    grid = _grid_of(psi, A)
    return FaceField(grid, grid.covariant_matrix(A.values, kappa) @ psi.values)


def covariant_laplacian(psi, A, kappa):
    grid = _grid_of(psi, A)
    return OrderParameterField(grid, grid.covariant_laplacian_matrix(A.values, kappa) @ psi.values)


def supercurrent_values(grid, psi_values, A_values, kappa):
    ''' Re[conj(avg psi) (i/kappa grad + A) psi] on faces '''
    return np.real(np.conj(grid.avg @ psi_values) * (grid.covariant_matrix(A_values, kappa) @ psi_values))


def supercurrent(psi, A, kappa):
    grid = _grid_of(psi, A)
    return FaceField(grid, supercurrent_values(grid, psi.values, A.values, kappa))


def _weights(u):
    grid = u.grid
    if u.kind == 'edge':
        return grid.edge_weights
    size = grid.n_cells if u.kind == 'center' else grid.n_faces
    return np.full(size, grid.cell_volume)


def inner_product(u, v, kind=None):
    ''' Volume weighted pairing, conjugate-linear in ``v`` '''
    if u.kind != v.kind or (kind is not None and kind != u.kind):
        raise InvalidArgument('layout mismatch: %s vs %s (requested %s)' % (u.kind, v.kind, kind))
    _grid_of(u, v)
    return complex(np.sum(_weights(u) * u.values * np.conj(v.values)))


def norm(u):
    return float(np.sqrt(np.sum(_weights(u) * np.abs(u.values) ** 2)))
