'''
Spectral Galerkin machinery for the vector potential.

The operator M is the face-space form (u, v) + (curl u, curl v) + (div u, div v).
Its eigenvectors, orthonormal in the diagonal face mass, span the spaces X_N
used by the Galerkin runs, and the projection onto X_N is orthogonal in the
M inner product.
'''
# -*- coding: utf-8 -*-
import json
import logging
import struct
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from tdgl.base.fields import VectorPotentialField
from tdgl.exceptions import InvalidArgument, NumericalFailure, RecordError
from tdgl.operators import StaggeredGrid
from tdgl.settings import get_config

logger = logging.getLogger(__name__)

BASIS_MAGIC = b'TDGLBAS1'


@dataclass(frozen=True, eq=False)
class CurlDivOperator:
    '''
    ``stiffness`` is the symmetric matrix with u.T @ stiffness @ v = (Mu, v),
    ``mass`` the diagonal face-volume weights.
    '''
    grid: StaggeredGrid
    stiffness: sp.csr_matrix
    mass: np.ndarray
    H_zero_bc: bool = True

    @property
    def ndof(self):
        return self.grid.n_faces

    def apply(self, u):
        ''' Face field whose L2 pairing with any v equals (Mu, v) '''
        return VectorPotentialField(self.grid, (self.stiffness @ u.values) / self.mass)

    def form(self, u, v):
        return float(u.values @ (self.stiffness @ v.values))

    def energy_norm(self, u):
        return float(np.sqrt(max(self.form(u, u), 0.0)))

    def rayleigh_quotient(self, u):
        return self.form(u, u) / float(np.sum(self.mass * u.values ** 2))

    def normalized(self):
        ''' Mass-symmetric scaling D^-1/2 K D^-1/2 whose spectrum is the one of M '''
        scale = sp.diags(1.0 / np.sqrt(self.mass))
        matrix = (scale @ self.stiffness @ scale).tocsr()
        return ((matrix + matrix.T) * 0.5).tocsr()


def assemble_M(domain, H_zero_bc=True):
    '''
    With ``H_zero_bc`` the boundary-edge curls are pinned to the (zero)
    applied field and drop out of the curl form; otherwise boundary edges enter
    with their dual-volume weights.
    '''
    grid = domain if isinstance(domain, StaggeredGrid) else StaggeredGrid(domain)
    vol = grid.cell_volume
    identity = sp.identity(grid.n_faces, format='csr')
    if H_zero_bc:
        curl_form = grid.curl_curl
    else:
        edges = np.concatenate([grid.interior_edges, grid.boundary_edges])
        weights = sp.diags(grid.edge_weights[edges] / vol)
        curl = grid.curl_all[edges]
        curl_form = curl.T @ weights @ curl
    stiffness = (vol * (identity + curl_form + grid.grad_div)).tocsr()
    return CurlDivOperator(grid, stiffness, np.full(grid.n_faces, vol), bool(H_zero_bc))


@dataclass(frozen=True, eq=False)
class GalerkinBasis:
    operator: CurlDivOperator
    eigenvalues: np.ndarray
    vectors: np.ndarray
    orthonormality_error: float
    residual: float

    @property
    def grid(self):
        return self.operator.grid

    @property
    def N(self):
        return len(self.eigenvalues)

    @property
    def modes(self):
        return [self.mode(i) for i in range(self.N)]

    def mode(self, index):
        return VectorPotentialField(self.grid, self.vectors[:, index])

    def reconstruct(self, coefficients):
        return VectorPotentialField(self.grid, self.vectors @ np.asarray(coefficients, dtype=float))

    def coefficients_of(self, values):
        ''' Mass pairings (values, a_i) for a face vector '''
        return self.vectors.T @ (self.operator.mass * values)

    def header(self):
        return {
            'domain_digest': self.grid.domain.digest(),
            'N': self.N,
            'ndof': int(self.vectors.shape[0]),
            'H_zero_bc': self.operator.H_zero_bc,
            'orthonormality_error': self.orthonormality_error,
            'residual': self.residual,
        }

    def save(self, path):
        header = json.dumps(self.header(), sort_keys=True).encode('utf-8')
        with open(path, 'wb') as handle:
            handle.write(BASIS_MAGIC)
            handle.write(struct.pack('<I', len(header)))
            handle.write(header)
            handle.write(np.ascontiguousarray(self.eigenvalues, dtype='<f8').tobytes())
            handle.write(np.ascontiguousarray(self.vectors.T, dtype='<f8').tobytes())
        logger.info('saved %d basis vectors to %s', self.N, path)

    @classmethod
    def load(cls, path, domain):
        with open(path, 'rb') as handle:
            payload = handle.read()
        if payload[:len(BASIS_MAGIC)] != BASIS_MAGIC:
            raise RecordError('%s is not a basis container' % path, path)
        start = len(BASIS_MAGIC) + 4
        (length,) = struct.unpack('<I', payload[len(BASIS_MAGIC):start])
        header = json.loads(payload[start:start + length].decode('utf-8'))
        if header['domain_digest'] != domain.digest():
            raise InvalidArgument('basis in %s was computed on a different domain' % path)
        n, ndof = header['N'], header['ndof']
        data = np.frombuffer(payload[start + length:], dtype='<f8')
        if data.size != n * (ndof + 1):
            raise RecordError('basis payload in %s is truncated' % path, path)
        operator = assemble_M(domain, header['H_zero_bc'])
        vectors = data[n:].reshape(n, ndof).T.astype(float)
        return cls(operator, data[:n].astype(float), vectors, header['orthonormality_error'], header['residual'])


def dense_eigenpairs(op):
    ''' Full spectrum of M from a dense symmetric eigensolve, mass-orthonormal vectors '''
    values, vectors = scipy.linalg.eigh(op.normalized().toarray())
    return values, vectors / np.sqrt(op.mass)[:, None]


def _fix_signs(vectors):
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    return vectors * np.where(signs == 0, 1.0, signs)


def eigenbasis_M(op, N, method='auto', settings=None):
    '''
    The N smallest eigenpairs of M.

    ``method`` is ``iterative`` (shift-invert Lanczos just below the
    coercivity floor), ``dense`` or ``auto``; ``auto`` falls back to the dense
    solver when N is too close to the number of degrees of freedom for Lanczos.
    '''
    config = get_config(settings)
    ndof = op.ndof
    if int(N) != N or not 1 <= N <= ndof:
        raise InvalidArgument('N must lie in [1, %d], got %r' % (ndof, N))
    N = int(N)
    if method not in ('auto', 'iterative', 'dense'):
        raise InvalidArgument('unknown eigen method %r' % method)
    if method == 'auto':
        method = 'dense' if N >= ndof - 1 else 'iterative'
    if method == 'iterative' and N >= ndof - 1:
        raise InvalidArgument('iterative eigensolver needs N < %d' % (ndof - 1))
    if method == 'dense' and ndof > config['DENSE_EIGEN_LIMIT']:
        logger.warning('dense eigensolve on %d degrees of freedom', ndof)

    matrix = op.normalized()
    if method == 'dense':
        values, vectors = scipy.linalg.eigh(matrix.toarray(), subset_by_index=[0, N - 1])
    else:
        start = np.random.default_rng(0).standard_normal(ndof)
        try:
            values, vectors = spla.eigsh(matrix, k=N, sigma=config['EIGEN_SHIFT'], which='LM', v0=start,
                                         tol=config['EIGEN_TOL'], maxiter=config['EIGEN_MAXITER'])
        except spla.ArpackNoConvergence as error:
            residual = _residual(matrix, error.eigenvalues, error.eigenvectors) if len(error.eigenvalues) else None
            raise NumericalFailure('eigensolver returned %d of %d eigenpairs' % (len(error.eigenvalues), N),
                                   residual=residual) from error
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
        vectors, _ = np.linalg.qr(vectors)

    vectors = _fix_signs(vectors)
    residual = _residual(matrix, values, vectors)
    if residual > config['EIGEN_RESIDUAL_TOL']:
        raise NumericalFailure('eigenpair residual %.3e exceeds %.1e' % (residual, config['EIGEN_RESIDUAL_TOL']),
                               residual=residual)
    orthonormality = float(np.abs(vectors.T @ vectors - np.eye(N)).max())
    logger.info('computed %d eigenpairs of M (%s): lambda in [%.6g, %.6g], residual %.2e',
                N, method, values[0], values[-1], residual)
    return GalerkinBasis(op, values, vectors / np.sqrt(op.mass)[:, None], orthonormality, residual)


def _residual(matrix, values, vectors):
    ''' Largest relative eigen-residual |Sv - lambda v| / lambda '''
    defect = matrix @ vectors - vectors * values
    return float((np.linalg.norm(defect, axis=0) / np.abs(values)).max())


@dataclass(frozen=True, eq=False)
class Projection:
    coefficients: np.ndarray
    field: VectorPotentialField


def project_onto_XN(A0, basis):
    ''' M-orthogonal projection: c_i = (M A0, a_i) / lambda_i '''
    if A0.grid.domain != basis.grid.domain:
        raise InvalidArgument('field and basis live on different domains')
    pairing = basis.vectors.T @ (basis.operator.stiffness @ A0.values)
    coefficients = pairing / basis.eigenvalues
    return Projection(coefficients, basis.reconstruct(coefficients))
