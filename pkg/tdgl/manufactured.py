'''
Manufactured exact solutions of the Lorentz-gauge system on a box.

psi = a e^{-t} cos(pi x / Lx) and A = sin(t) (sin(pi x/Lx) cos(pi y/Ly), -cos(pi x/Lx) sin(pi y/Ly), 0)
plus an optional gradient part. With H = 0 both satisfy every boundary
condition of the box, and the forcings follow from symbolic differentiation.
'''
# -*- coding: utf-8 -*-
import logging

import numpy as np
import sympy

from tdgl.base.fields import COORDINATES
from tdgl.exceptions import InvalidArgument

logger = logging.getLogger(__name__)

TIME = sympy.Symbol('t', real=True)


def _compile(expression):
    function = sympy.lambdify((*COORDINATES, TIME), expression, 'numpy')

    def evaluate(points, t):
        value = function(points[:, 0], points[:, 1], points[:, 2], t)
        return np.broadcast_to(np.asarray(value), (len(points),))

    return evaluate


class ManufacturedSolution:

    @classmethod
    def for_config(cls, config, params):
        ''' The exact solution behind a config with the ``manufactured`` initial preset '''
        return cls(params.eta, params.kappa, config.domain.lengths,
                   gradient_amplitude=config.initial.manufactured_gradient)

    def __init__(self, eta, kappa, lengths=(1.0, 1.0, 1.0), psi_amplitude=0.5, gradient_amplitude=0.0):
        if eta <= 0 or kappa <= 0:
            raise InvalidArgument('eta and kappa must be positive')
        self.eta, self.kappa = float(eta), float(kappa)
        x, y, z = COORDINATES
        t = TIME
        pi = sympy.pi
        X, Y, Z = (c * pi / sympy.Float(length) for c, length in zip(COORDINATES, lengths))

        psi = sympy.Float(psi_amplitude) * sympy.exp(-t) * sympy.cos(X)
        potential = [sympy.sin(t) * sympy.sin(X) * sympy.cos(Y), -sympy.sin(t) * sympy.cos(X) * sympy.sin(Y), 0]
        if gradient_amplitude:
            phi = sympy.Float(gradient_amplitude) * sympy.sin(t) * sympy.cos(X) * sympy.cos(Y) * sympy.cos(Z) / pi
            potential = [component + sympy.diff(phi, c) for component, c in zip(potential, COORDINATES)]
        potential = [sympy.sympify(component) for component in potential]

        covariant = [sympy.I / self.kappa * sympy.diff(psi, c) + a * psi for a, c in zip(potential, COORDINATES)]
        squared = sum(sympy.I / self.kappa * sympy.diff(k, c) + a * k
                      for k, a, c in zip(covariant, potential, COORDINATES))
        divergence = sum(sympy.diff(a, c) for a, c in zip(potential, COORDINATES))
        psi_forcing = (self.eta * sympy.diff(psi, t) + squared + (psi * sympy.conjugate(psi) - 1) * psi
                       - sympy.I * self.eta * self.kappa * psi * divergence)

        curl = [sympy.diff(potential[2], y) - sympy.diff(potential[1], z),
                sympy.diff(potential[0], z) - sympy.diff(potential[2], x),
                sympy.diff(potential[1], x) - sympy.diff(potential[0], y)]
        curlcurl = [sympy.diff(curl[2], y) - sympy.diff(curl[1], z),
                    sympy.diff(curl[0], z) - sympy.diff(curl[2], x),
                    sympy.diff(curl[1], x) - sympy.diff(curl[0], y)]
        current = [sympy.conjugate(psi) * k for k in covariant]
        potential_forcing = [sympy.diff(a, t) + cc - sympy.diff(divergence, c)
                             for a, cc, c in zip(potential, curlcurl, COORDINATES)]

        self._psi = _compile(psi)
        self._potential = [_compile(a) for a in potential]
        self._psi_forcing = _compile(psi_forcing)
        self._potential_forcing = [_compile(f) for f in potential_forcing]
        self._current = [_compile(j) for j in current]
        logger.debug('manufactured psi = %s', psi)

    def psi_values(self, grid, t):
        return np.asarray(self._psi(grid.cell_points(), t), dtype=complex)

    def potential_values(self, grid, t):
        return np.concatenate([np.real(self._potential[axis](grid.face_points(axis), t)).astype(float)
                               for axis in range(3)])

    def psi_forcing(self, grid, t):
        return np.asarray(self._psi_forcing(grid.cell_points(), t), dtype=complex)

    def potential_forcing(self, grid, t):
        ''' dA/dt + curl curl A - grad div A + Re[conj(psi)(i/kappa grad + A) psi] on faces '''
        parts = []
        for axis in range(3):
            points = grid.face_points(axis)
            value = self._potential_forcing[axis](points, t) + np.real(self._current[axis](points, t))
            parts.append(np.real(value).astype(float))
        return np.concatenate(parts)
