'''
Discrete fields on the staggered grid.

Centre fields hold one value per inside cell, face fields one value per
interior face (the degrees of freedom of A; boundary-normal faces carry the
strong condition A.n = 0 implicitly), edge fields full component arrays.
'''
# -*- coding: utf-8 -*-
from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy

from tdgl.exceptions import InvalidArgument

COORDINATES = sympy.symbols('x y z', real=True)


def _check_vector(values, size, name):
    values = np.asarray(values)
    if values.shape != (size,):
        raise InvalidArgument('%s expects %d values, got shape %s' % (name, size, values.shape))
    if not np.all(np.isfinite(values)):
        raise InvalidArgument('%s holds non-finite values' % name)
    return values


@dataclass(frozen=True, eq=False)
class CenterField:
    grid: object
    values: np.ndarray
    kind = 'center'

    def __post_init__(self):
        object.__setattr__(self, 'values', _check_vector(self.values, self.grid.n_cells, type(self).__name__))

    @property
    def domain(self):
        return self.grid.domain

    def with_values(self, values):
        return type(self)(self.grid, values)


class OrderParameterField(CenterField):

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=complex))
        super().__post_init__()

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n_cells, value, dtype=complex))


@dataclass(frozen=True, eq=False)
class FaceField:
    grid: object
    values: np.ndarray
    kind = 'face'

    def __post_init__(self):
        object.__setattr__(self, 'values', _check_vector(self.values, self.grid.n_faces, type(self).__name__))

    @property
    def domain(self):
        return self.grid.domain

    def component(self, axis):
        ''' Full face array of one component, zero on non-degree-of-freedom faces '''
        return self.grid.scatter_faces(self.values, axis)

    @property
    def x(self):
        return self.component(0)

    @property
    def y(self):
        return self.component(1)

    @property
    def z(self):
        return self.component(2)

    def with_values(self, values):
        return type(self)(self.grid, values)


class VectorPotentialField(FaceField):

    def __post_init__(self):
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise InvalidArgument('vector potential must be real')
        object.__setattr__(self, 'values', values.astype(float))
        super().__post_init__()

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_faces))


@dataclass(frozen=True, eq=False)
class EdgeField:
    ''' Component arrays on every grid edge of the bounding box '''
    grid: object
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    kind = 'edge'

    def __post_init__(self):
        for axis, values in enumerate((self.x, self.y, self.z)):
            if values.shape != self.grid.edge_shapes[axis]:
                raise InvalidArgument('edge component %d has shape %s' % (axis, values.shape))
            if not np.all(np.isfinite(values)):
                raise InvalidArgument('edge field holds non-finite values')

    @property
    def domain(self):
        return self.grid.domain

    @property
    def values(self):
        return np.concatenate([component.ravel(order='F') for component in (self.x, self.y, self.z)])

    @classmethod
    def from_values(cls, grid, values):
        parts = np.split(np.asarray(values), np.cumsum([np.prod(shape) for shape in grid.edge_shapes])[:-1])
        return cls(grid, *(part.reshape(shape, order='F') for part, shape in zip(parts, grid.edge_shapes)))


def _as_array(value, shape):
    return np.broadcast_to(np.asarray(value, dtype=float), shape)


@dataclass(frozen=True)
class AppliedField:
    '''
    External magnetic field H.

    ``function(x, y, z)`` returns the three components evaluated on arrays of
    coordinates.
    '''
    function: Callable
    divergence_free: bool = True
    description: str = 'H = 0'
    uniform_value: tuple = None

    @classmethod
    def uniform(cls, vector, divergence_free=True):
        vector = tuple(float(v) for v in vector)
        if len(vector) != 3:
            raise InvalidArgument('uniform applied field needs three components')

        def function(x, y, z):
            return tuple(np.full(np.shape(x), v) for v in vector)

        return cls(function, divergence_free, 'H = (%g, %g, %g)' % vector, vector)

    @classmethod
    def zero(cls):
        return cls.uniform((0.0, 0.0, 0.0))

    @classmethod
    def from_expressions(cls, expressions, divergence_free=True):
        if len(expressions) != 3:
            raise InvalidArgument('applied field needs three expressions')
        names = dict(zip(('x', 'y', 'z'), COORDINATES))
        try:
            parsed = [sympy.sympify(expression, locals=names) for expression in expressions]
        except (sympy.SympifyError, TypeError) as error:
            raise InvalidArgument('cannot parse applied field expression: %s' % error) from error
        unknown = set().union(*(expr.free_symbols for expr in parsed)) - set(COORDINATES)
        if unknown:
            raise InvalidArgument('applied field uses unknown symbols %s' % sorted(map(str, unknown)))
        compiled = [sympy.lambdify(COORDINATES, expr, 'numpy') for expr in parsed]

        def function(x, y, z):
            return tuple(_as_array(component(x, y, z), np.shape(x)) for component in compiled)

        return cls(function, divergence_free, 'H = (%s, %s, %s)' % tuple(str(expr) for expr in parsed))

    @property
    def is_zero(self):
        return self.uniform_value is not None and not any(self.uniform_value)

    def component(self, axis, points):
        ''' Component ``axis`` of H at an (n, 3) array of points '''
        if len(points) == 0:
            return np.zeros(0)
        return np.asarray(self.function(points[:, 0], points[:, 1], points[:, 2])[axis], dtype=float)

    def edge_samples(self, grid):
        ''' Edge-aligned components of H on every edge of the bounding box '''
        return EdgeField(grid, *(
            self.component(axis, grid.edge_points(axis)).reshape(grid.edge_shapes[axis], order='F')
            for axis in range(3)))

    def divergence(self, grid):
        ''' Max-norm of the discrete divergence of face-sampled H over inside cells '''
        faces = np.concatenate([self.component(axis, grid.full_face_points(axis)) for axis in range(3)])
        div = grid.box_divergence @ faces
        return float(np.abs(div[grid.cell_index]).max())

    def check_divergence(self, grid, tol=1e-10):
        if not self.divergence_free:
            return 0.0
        value = self.divergence(grid)
        if value > tol:
            raise InvalidArgument('applied field is flagged divergence-free but max |div H| = %.3e' % value)
        return value
