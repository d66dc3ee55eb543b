''' Initial data and analytic test fields sampled on a grid '''
# -*- coding: utf-8 -*-
import logging

import numpy as np

from tdgl.base.fields import OrderParameterField, VectorPotentialField
from tdgl.exceptions import InvalidArgument
from tdgl.solvers import solve_spd

logger = logging.getLogger(__name__)


def random_order_parameter(grid, seed):
    ''' Uniform random modulus in [0, 1) and uniform random phase '''
    rng = np.random.default_rng(seed)
    modulus = rng.random(grid.n_cells)
    phase = rng.random(grid.n_cells) * 2.0 * np.pi
    return OrderParameterField(grid, modulus * np.exp(1j * phase))


def perturbation(grid, size, seed):
    ''' Random complex field with modulus at most ``size`` '''
    if size == 0:
        return np.zeros(grid.n_cells, dtype=complex)
    return size * random_order_parameter(grid, seed).values


def cosine_gradient_field(grid, axis=0, amplitude=1.0):
    ''' A = amplitude * grad cos(pi x_axis / L_axis), normal component vanishes on the box '''
    length = grid.domain.lengths[axis]
    wave = np.pi / length

    def function(x, y, z):
        coordinate = (x, y, z)[axis]
        components = [np.zeros_like(x) for _ in range(3)]
        components[axis] = -amplitude * wave * np.sin(wave * coordinate)
        return components

    return VectorPotentialField(grid, grid.sample_faces(function))


def band_limited_field(grid, seed=0, modes=2):
    '''
    Smooth random field built from low trigonometric modes that individually
    satisfy A.n = 0 on the box.
    '''
    rng = np.random.default_rng(seed)
    lengths = grid.domain.lengths
    terms = []
    for axis in range(3):
        for l in range(1, modes + 1):
            for m in range(modes + 1):
                for n in range(modes + 1):
                    weight = rng.standard_normal() / (1.0 + l * l + m * m + n * n)
                    terms.append((axis, (l, m, n), weight))

    def function(x, y, z):
        coordinates = (x, y, z)
        components = [np.zeros_like(x) for _ in range(3)]
        for axis, (l, m, n), weight in terms:
            others = [d for d in range(3) if d != axis]
            value = np.sin(l * np.pi * coordinates[axis] / lengths[axis])
            value = value * np.cos(m * np.pi * coordinates[others[0]] / lengths[others[0]])
            value = value * np.cos(n * np.pi * coordinates[others[1]] / lengths[others[1]])
            components[axis] = components[axis] + weight * value
        return components

    return VectorPotentialField(grid, grid.sample_faces(function))


def _corner_polar(points, axes, centre):
    u = points[:, axes[0]] - centre[0]
    v = points[:, axes[1]] - centre[1]
    # angle swept from the positive ``second`` half-axis bordering the removed quadrant
    return np.hypot(u, v), np.mod(np.arctan2(v, u) - 0.5 * np.pi, 2.0 * np.pi)


def corner_singular_field(grid, axes=(0, 1), support=None, settings=None):
    '''
    Cut-off gradient of the corner singular function r^{2/3} cos(2 theta / 3)
    around the re-entrant edge of an L-shape.

    theta is measured from the removed quadrant so that the function satisfies
    the Neumann condition on both faces of the corner. Inside ``support``
    (default: half the shorter side) the sampled function is replaced by its
    discrete harmonic extension, whose discrete gradient has zero curl and
    divergence. That gradient is multiplied by 1 - (r / support)^{2/3}: the
    gradient energy lost at the edge equals the energy the cutoff adds, so
    |grad A|^2 grows like h^{-2/3} while the curl, divergence and L2 norms
    stay bounded.
    '''
    first, second = axes
    lengths = grid.domain.lengths
    if support is None:
        support = 0.5 * min(lengths[first], lengths[second])
    if support <= 0:
        raise InvalidArgument('corner field support must be positive, got %r' % (support,))
    centre = (0.5 * lengths[first], 0.5 * lengths[second])
    radius, theta = _corner_polar(grid.cell_points(), axes, centre)
    if np.any(theta[radius > 0] > 1.5 * np.pi + 1e-12):
        raise InvalidArgument('corner singular field needs the L-shape removed in the given axes')
    potential = radius ** (2.0 / 3.0) * np.cos(2.0 * theta / 3.0)

    inside = np.flatnonzero(radius < support)
    fixed = np.flatnonzero(radius >= support)
    if len(inside) and len(fixed):
        laplacian = (-(grid.div @ grid.grad)).tocsr()
        rhs = -(laplacian[inside][:, fixed] @ potential[fixed])
        config = settings or {}
        potential[inside] = solve_spd(laplacian[inside][:, inside], rhs, rtol=config.get('LINEAR_RTOL', 1e-10),
                                      maxiter=config.get('LINEAR_MAXITER', 20000))

    cutoff = np.concatenate([
        1.0 - np.clip(_corner_polar(grid.face_points(axis), axes, centre)[0] / support, 0.0, 1.0) ** (2.0 / 3.0)
        for axis in range(3)])
    return VectorPotentialField(grid, cutoff * (grid.grad @ potential))


def initial_state_fields(spec, grid, manufactured=None):
    '''
    psi0 and A0 for an ``initial`` config section.

    Returns (psi0, A0, warnings).
    '''
    warnings = []
    kind = spec['kind']
    if kind == 'random':
        psi = random_order_parameter(grid, spec['seed']).values
    elif kind == 'uniform':
        real, imag = spec['value']
        psi = np.full(grid.n_cells, complex(real, imag))
    elif kind == 'steady':
        psi = np.ones(grid.n_cells, dtype=complex)
    elif kind == 'zero':
        psi = np.zeros(grid.n_cells, dtype=complex)
    elif kind == 'manufactured':
        psi = manufactured.psi_values(grid, 0.0)
    elif kind == 'file':
        psi = _load_initial(spec['path'], grid, 'psi')
    else:
        raise InvalidArgument('unknown initial data kind %r' % kind)
    psi = psi + perturbation(grid, spec['perturbation'], spec['perturbation_seed'])

    potential = spec['potential']
    if kind == 'manufactured':
        A = manufactured.potential_values(grid, 0.0)
    elif potential == 'zero':
        A = np.zeros(grid.n_faces)
    elif potential == 'cosine_gradient':
        A = cosine_gradient_field(grid, 0, spec['potential_amplitude']).values
    elif potential == 'file':
        A = _load_initial(spec['path'], grid, 'A')
    else:
        raise InvalidArgument('unknown initial potential %r' % potential)

    peak = float(np.abs(psi).max())
    if peak > 1.0 + 1e-12:
        message = 'initial |psi| reaches %.6g > 1' % peak
        logger.warning(message)
        warnings.append(message)
    return OrderParameterField(grid, psi), VectorPotentialField(grid, A), warnings


def _load_initial(path, grid, key):
    try:
        with np.load(path) as data:
            values = data[key]
    except (OSError, KeyError, ValueError) as error:
        raise InvalidArgument('cannot read %r from initial data file %s: %s' % (key, path, error)) from error
    expected = grid.n_cells if key == 'psi' else grid.n_faces
    if values.shape == grid.shape and key == 'psi':
        values = values.ravel(order='F')[grid.cell_index]
    if values.shape != (expected,):
        raise InvalidArgument('initial %s in %s has shape %s, expected (%d,)' % (key, path, values.shape, expected))
    return values
