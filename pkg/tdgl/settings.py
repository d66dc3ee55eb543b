''' tdgl settings file '''
# -*- coding: utf-8 -*-
import copy
import os

OUTPUT_ROOT_ENV = 'TDGL_OUT'

CONFIG_DEFAULTS = {
    'LINEAR_RTOL': 1e-10,
    'LINEAR_MAXITER': 5000,
    'BOUND_TOL': 1e-12,
    'EIGEN_SHIFT': 0.999,
    'EIGEN_TOL': 1e-12,
    'EIGEN_MAXITER': 20000,
    'EIGEN_RESIDUAL_TOL': 1e-8,
    'DENSE_EIGEN_LIMIT': 3000,
    'OUTPUT_ROOT': 'tdgl-runs',
}

# Keys of the ``solver`` section of a simulation document.
SOLVER_KEYS = {
    'linear_rtol': 'LINEAR_RTOL',
    'linear_maxiter': 'LINEAR_MAXITER',
    'bound_tol': 'BOUND_TOL',
    'eigen_shift': 'EIGEN_SHIFT',
    'eigen_tol': 'EIGEN_TOL',
    'eigen_maxiter': 'EIGEN_MAXITER',
}

SIMULATION_DEFAULTS = {
    'mode': 'grid',
    'name': 'run',
    'domain': {
        'kind': 'box',
        'counts': [8, 8, 8],
        'lengths': [1.0, 1.0, 1.0],
        'removed_quadrant': ['x', 'y'],
        'mask': None,
    },
    'physics': {
        'eta': 1.0,
        'kappa': 1.0,
        'T_final': 1.0,
    },
    'applied': {
        'kind': 'uniform',
        'value': [0.0, 0.0, 0.0],
        'expressions': ['0', '0', '0'],
        'divergence_free': True,
    },
    'time': {
        'dt': 1e-3,
        'picard_max': 1,
        'picard_tol': 1e-10,
        'scheme': 'lagged',
    },
    'initial': {
        'kind': 'random',
        'seed': 0,
        'value': [1.0, 0.0],
        'path': None,
        'perturbation': 0.0,
        'perturbation_seed': 1,
        'potential': 'zero',
        'potential_amplitude': 1.0,
        'manufactured_gradient': 0.0,
    },
    'output': {
        'every': 1,
        'vtk': False,
    },
    'diagnostics': {
        'energy': True,
        'bound': True,
        'weak': False,
    },
    'galerkin': {
        'N': 16,
        'H_zero_bc': True,
    },
    'solver': {},
}


def get_config(user_config=None):
    config = CONFIG_DEFAULTS.copy()
    config.update(user_config or {})

    output_root = os.environ.get(OUTPUT_ROOT_ENV)
    if output_root:
        config['OUTPUT_ROOT'] = output_root

    return config


def simulation_defaults():
    return copy.deepcopy(SIMULATION_DEFAULTS)
