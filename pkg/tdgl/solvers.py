''' Preconditioned Krylov solves used by the time steppers '''
# -*- coding: utf-8 -*-
import inspect
import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from tdgl.exceptions import NumericalFailure

logger = logging.getLogger(__name__)

# scipy renamed ``tol`` to ``rtol`` in 1.12
_TOL_KEYWORD = 'rtol' if 'rtol' in inspect.signature(spla.cg).parameters else 'tol'


class SolveCounter:
    ''' Iteration counts accumulated over every solve of one kind '''

    def __init__(self):
        self.solves = 0
        self.iterations = 0
        self.max_residual = 0.0

    def as_dict(self):
        return {'solves': self.solves, 'iterations': self.iterations, 'max_residual': self.max_residual}


def jacobi(matrix):
    diagonal = matrix.diagonal()
    diagonal = np.where(np.abs(diagonal) > 0, diagonal, 1.0)
    return sp.diags(1.0 / diagonal)


def _solve(method, name, matrix, rhs, x0, rtol, maxiter, counter):
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)

    iterations = [0]

    def callback(_):
        iterations[0] += 1

    options = {_TOL_KEYWORD: rtol, 'atol': 0.0, 'maxiter': maxiter, 'M': jacobi(matrix), 'callback': callback}
    solution, info = method(matrix, rhs, x0=x0, **options)
    residual = float(np.linalg.norm(rhs - matrix @ solution) / rhs_norm)
    if counter is not None:
        counter.solves += 1
        counter.iterations += iterations[0]
        counter.max_residual = max(counter.max_residual, residual)
    if info != 0 or not np.all(np.isfinite(solution)):
        raise NumericalFailure('%s did not converge (info=%s, relative residual %.3e after %d iterations)'
                               % (name, info, residual, iterations[0]), residual=residual, iterations=iterations[0])
    logger.debug('%s converged in %d iterations, relative residual %.3e', name, iterations[0], residual)
    return solution


def solve_spd(matrix, rhs, x0=None, rtol=1e-10, maxiter=5000, counter=None):
    ''' Conjugate gradients with Jacobi preconditioning '''
    return _solve(spla.cg, 'cg', matrix, rhs, x0, rtol, maxiter, counter)


def solve_general(matrix, rhs, x0=None, rtol=1e-10, maxiter=5000, counter=None):
    ''' BiCGSTAB with Jacobi preconditioning, for the complex non-Hermitian psi systems '''
    return _solve(spla.bicgstab, 'bicgstab', matrix, rhs, x0, rtol, maxiter, counter)
