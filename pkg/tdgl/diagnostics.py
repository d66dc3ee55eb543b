'''
Measurable counterparts of the a priori estimates.

Every diagnostic is a pure function of fields or stored RunRecords: the
energy functional and its Lyapunov/Gronwall behaviour, the pointwise bound
|psi| <= 1, weak-form residuals, two-run stability, the gradient/curl-div
norm ratio that separates convex from nonconvex domains, and the
gauge comparison of observables.
'''
# -*- coding: utf-8 -*-
import logging
import math
from dataclasses import dataclass

import numpy as np

from tdgl.base.fields import OrderParameterField, VectorPotentialField
from tdgl.base.params import SimState
from tdgl.exceptions import InvalidArgument
from tdgl.manufactured import ManufacturedSolution
from tdgl.operators import applied_edge_values, applied_source, supercurrent_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    condensation: float
    field: float
    gauge: float

    @property
    def total(self):
        return self.kinetic + self.condensation + self.field + self.gauge

    def as_dict(self):
        return {'kinetic': self.kinetic, 'condensation': self.condensation, 'field': self.field,
                'gauge': self.gauge, 'total': self.total}


@dataclass(frozen=True)
class LyapunovSeries:
    times: np.ndarray
    residual: np.ndarray

    @property
    def max_positive(self):
        return float(max(self.residual.max(initial=0.0), 0.0))


@dataclass(frozen=True)
class GronwallCheck:
    times: np.ndarray
    energy: np.ndarray
    envelope: np.ndarray

    @property
    def holds(self):
        return bool(np.all(self.energy <= self.envelope))

    @property
    def worst_margin(self):
        return float((self.envelope - self.energy).min())


@dataclass(frozen=True)
class BoundReport:
    max_abs: float
    times: np.ndarray
    max_abs_series: np.ndarray
    excess: np.ndarray


@dataclass(frozen=True)
class FunctionBank:
    centers: tuple
    faces: tuple


@dataclass(frozen=True)
class RunDelta:
    times: np.ndarray
    psi_norm: np.ndarray
    A_norm: np.ndarray
    quantity: np.ndarray
    growth_rate: float

    @property
    def terminal(self):
        return float(self.quantity[-1])


@dataclass(frozen=True)
class GaugeDistance:
    times: np.ndarray
    psi_distance: np.ndarray
    curl_distance: np.ndarray


def _interior_applied(grid, H):
    if H.is_zero:
        return np.zeros(grid.n_interior_edges)
    return applied_edge_values(grid, H)[grid.interior_edges]


def energy(psi, A, H, params):
    grid = psi.grid
    vol = grid.cell_volume
    covariant = grid.covariant_matrix(A.values, params.kappa) @ psi.values
    curl = grid.curl @ A.values - _interior_applied(grid, H)
    return EnergyBreakdown(
        kinetic=float(0.5 * vol * np.sum(np.abs(covariant) ** 2)),
        condensation=float(0.25 * vol * np.sum((np.abs(psi.values) ** 2 - 1.0) ** 2)),
        field=float(0.5 * vol * np.sum(curl ** 2)),
        gauge=float(0.5 * vol * np.sum((grid.div @ A.values) ** 2)),
    )


def excess_values(grid, psi_values):
    ''' Truncation functional: integral of ((|psi|^2 - 1)_+)^2 '''
    positive = np.maximum(np.abs(psi_values) ** 2 - 1.0, 0.0)
    return float(grid.cell_volume * np.sum(positive ** 2))


def _params(record, params):
    return params if params is not None else record.config.phys_params()


def _consecutive(record, columns):
    steps = record.column('step')
    if len(steps) < 2 or np.any(np.diff(steps) != 1):
        raise InvalidArgument('record does not hold consecutive steps')
    data = {name: record.column(name) for name in columns}
    for name, values in data.items():
        if np.any(np.isnan(values[1:])):
            raise InvalidArgument('record series %r is incomplete' % name)
    return data


def lyapunov_residual(record, params=None):
    '''
    r^n = (E^{n+1} - E^n)/dt + |dA/dt|^2 + (eta/2)|dpsi/dt|^2 - (eta kappa^2/2)|div A|^2
    for every step of the record.
    '''
    params = _params(record, params)
    data = _consecutive(record, ('time', 'energy', 'dA_dt_sq', 'dpsi_dt_sq', 'div_A_sq'))
    dt = np.diff(data['time'])
    residual = (np.diff(data['energy']) / dt + data['dA_dt_sq'][1:] + 0.5 * params.eta * data['dpsi_dt_sq'][1:]
                - 0.5 * params.eta * params.kappa ** 2 * data['div_A_sq'][1:])
    return LyapunovSeries(data['time'][1:], residual)


def gronwall_envelope(record, params=None, slack=None):
    ''' E(t) against (E(0) + slack) exp(eta kappa^2 t) + slack '''
    params = _params(record, params)
    if slack is None:
        slack = 1e-8 * record.grid.domain.volume
    times, energies = record.column('time'), record.column('energy')
    envelope = (energies[0] + slack) * np.exp(params.eta * params.kappa ** 2 * times) + slack
    return GronwallCheck(times, energies, envelope)


def order_parameter_balance(record, params=None):
    '''
    Residual of (eta/2) d|psi|^2/dt + |(i/kappa grad + A) psi|^2 + |psi|_4^4 - |psi|^2,
    the psi-equation tested with psi itself.
    '''
    params = _params(record, params)
    data = _consecutive(record, ('time', 'psi_l2', 'kinetic', 'psi_l4_4'))
    dt = np.diff(data['time'])
    mass = data['psi_l2'] ** 2
    residual = (0.5 * params.eta * np.diff(mass) / dt + 2.0 * data['kinetic'][1:] + data['psi_l4_4'][1:]
                - mass[1:])
    return LyapunovSeries(data['time'][1:], residual)


def bound_monitor(record):
    if not record.snapshots:
        raise InvalidArgument('record holds no psi snapshots')
    grid = record.grid
    maxima = np.array([np.abs(snapshot.psi).max() for snapshot in record.snapshots])
    excess = np.array([excess_values(grid, snapshot.psi) for snapshot in record.snapshots])
    overall = float(maxima.max())
    stepwise = record.column('max_abs_psi') if 'max_abs_psi' in record.series else np.array([])
    if stepwise.size and not np.all(np.isnan(stepwise)):
        overall = max(overall, float(np.nanmax(stepwise)))
    return BoundReport(overall, record.times, maxima, excess)


def default_test_bank(grid, modes=1):
    '''
    Products of cosines at cell centres, and for each face axis a sine along
    the axis times cosines across it (these vanish on boundary-normal faces).
    '''
    lengths = grid.domain.lengths
    waves = [np.pi / length for length in lengths]
    points = grid.cell_points()
    centers = []
    for l in range(modes + 1):
        for m in range(modes + 1):
            for n in range(modes + 1):
                centers.append(np.cos(l * waves[0] * points[:, 0]) * np.cos(m * waves[1] * points[:, 1])
                               * np.cos(n * waves[2] * points[:, 2]))
    faces = []
    for axis in range(3):
        others = [d for d in range(3) if d != axis]
        for m in range(modes + 1):
            for n in range(modes + 1):
                def function(x, y, z, axis=axis, others=others, m=m, n=n):
                    coordinates = (x, y, z)
                    components = [np.zeros_like(x) for _ in range(3)]
                    components[axis] = (np.sin(waves[axis] * coordinates[axis])
                                        * np.cos(m * waves[others[0]] * coordinates[others[0]])
                                        * np.cos(n * waves[others[1]] * coordinates[others[1]]))
                    return components
                faces.append(grid.sample_faces(function))
    return FunctionBank(tuple(centers), tuple(faces))


def residual_vectors(state, state_next, params, dt, gauge='lorentz', forcing=(None, None)):
    '''
    Strong-form residuals of both discrete equations at the new state, with
    backward time differences.
    '''
    grid = state.grid
    psi, psi_next = state.psi.values, state_next.psi.values
    A_next = state_next.A.values
    div = grid.div @ A_next
    r_psi = (params.eta * (psi_next - psi) / dt + grid.covariant_laplacian_matrix(A_next, params.kappa) @ psi_next
             + (np.abs(psi_next) ** 2 - 1.0) * psi_next)
    r_A = ((A_next - state.A.values) / dt + grid.curl_curl @ A_next - applied_source(grid, params.applied)
           + supercurrent_values(grid, psi_next, A_next, params.kappa))
    if gauge == 'lorentz':
        r_psi = r_psi - 1j * params.eta * params.kappa * div * psi_next
        r_A = r_A + grid.grad_div @ A_next
    psi_forcing, potential_forcing = forcing
    if psi_forcing is not None:
        r_psi = r_psi - psi_forcing
    if potential_forcing is not None:
        r_A = r_A - potential_forcing
    return r_psi, r_A


def pair(grid, residual, test):
    ''' Volume weighted pairing of a residual vector with a test vector '''
    return complex(grid.cell_volume * np.sum(residual * np.conj(test)))


def weak_residual(state, state_next, params, dt, test_bank, gauge='lorentz', forcing=(None, None)):
    ''' Largest |r(phi)| / |phi| over the test bank, for the psi- and the A-equation '''
    grid = state.grid
    r_psi, r_A = residual_vectors(state, state_next, params, dt, gauge, forcing)
    vol = grid.cell_volume

    def worst(residual, tests):
        return max((abs(pair(grid, residual, test)) / math.sqrt(vol * np.sum(np.abs(test) ** 2))
                    for test in tests if np.any(test)), default=0.0)

    return worst(r_psi, test_bank.centers), worst(r_A, test_bank.faces)


def weak_residual_series(record, params=None, modes=1):
    ''' Weak residuals replayed over every pair of consecutive snapshots of a record '''
    params = _params(record, params)
    grid = record.grid
    gauge = 'zero_potential' if record.config.mode == 'zero_potential' else 'lorentz'
    manufactured = None
    if record.config.initial.kind == 'manufactured':
        manufactured = ManufacturedSolution.for_config(record.config, params)
    bank = default_test_bank(grid, modes)
    times, residuals = [], []
    for before, after in zip(record.snapshots, record.snapshots[1:]):
        if after.step != before.step + 1:
            continue
        forcing = (None, None)
        if manufactured is not None:
            forcing = (manufactured.psi_forcing(grid, after.time), manufactured.potential_forcing(grid, after.time))
        state = SimState(before.time, OrderParameterField(grid, before.psi), VectorPotentialField(grid, before.A))
        state_next = SimState(after.time, OrderParameterField(grid, after.psi), VectorPotentialField(grid, after.A))
        times.append(after.time)
        residuals.append(weak_residual(state, state_next, params, after.time - before.time, bank, gauge, forcing))
    if not times:
        raise InvalidArgument('record holds no consecutive snapshots; rerun with output.every = 1')
    return np.array(times), np.array(residuals)


def _matched_times(record_a, record_b):
    if record_a.grid.domain != record_b.grid.domain:
        raise InvalidArgument('records live on different domains')
    times_a, times_b = record_a.times, record_b.times
    if times_a.shape != times_b.shape or not np.allclose(times_a, times_b, rtol=0, atol=1e-12):
        raise InvalidArgument('records have different snapshot times')
    return times_a


def stability_compare(run1, run2, params=None):
    '''
    eta/2 |psi_1 - psi_2|^2 + 1/2 |A_1 - A_2|^2 along two runs that differ
    only in their initial data, and the smallest G with
    quantity(t) <= quantity(0) exp(G t).
    '''
    if run1.config.without_initial() != run2.config.without_initial():
        raise InvalidArgument('runs differ in more than their initial data')
    params = _params(run1, params)
    times = _matched_times(run1, run2)
    vol = run1.grid.cell_volume
    psi_norm = np.array([math.sqrt(vol * np.sum(np.abs(a.psi - b.psi) ** 2))
                         for a, b in zip(run1.snapshots, run2.snapshots)])
    A_norm = np.array([math.sqrt(vol * np.sum((a.A - b.A) ** 2)) for a, b in zip(run1.snapshots, run2.snapshots)])
    quantity = 0.5 * params.eta * psi_norm ** 2 + 0.5 * A_norm ** 2
    return RunDelta(times, psi_norm, A_norm, quantity, growth_rate(times, quantity))


def growth_rate(times, quantity):
    later = times > 0
    if not np.any(later):
        return 0.0
    if quantity[0] == 0.0:
        return 0.0 if not np.any(quantity[later]) else math.inf
    with np.errstate(divide='ignore'):
        rates = np.log(quantity[later] / quantity[0]) / times[later]
    return float(rates.max())


def _one_sided_derivative(values, valid, axis, h):
    ''' Centred difference where both neighbours exist, one-sided where only one does '''
    def shifted(array, step, fill):
        out = np.full_like(array, fill)
        source = [slice(None)] * 3
        target = [slice(None)] * 3
        if step > 0:
            source[axis], target[axis] = slice(1, None), slice(None, -1)
        else:
            source[axis], target[axis] = slice(None, -1), slice(1, None)
        out[tuple(target)] = array[tuple(source)]
        return out

    forward, backward = shifted(values, 1, 0.0), shifted(values, -1, 0.0)
    has_forward, has_backward = shifted(valid, 1, False), shifted(valid, -1, False)
    centred = (forward - backward) / (2.0 * h)
    derivative = np.where(has_forward & has_backward, centred,
                          np.where(has_forward, (forward - values) / h,
                                   np.where(has_backward, (values - backward) / h, 0.0)))
    return np.where(valid, derivative, 0.0)


def gradient_seminorm_sq(A):
    ''' Sum over components of the discrete |grad A_a|^2, boundary faces at half weight '''
    grid = A.grid
    vol = grid.cell_volume
    total = 0.0
    for axis in range(3):
        values = A.component(axis)
        interior = np.zeros(values.size, dtype=bool)
        interior[grid.face_index[axis]] = True
        interior = interior.reshape(values.shape, order='F')
        valid = interior | grid.boundary_face_masks[axis]
        weight = np.where(interior, vol, 0.5 * vol)
        for direction in range(3):
            derivative = _one_sided_derivative(values, valid, direction, grid.spacing[direction])
            total += float(np.sum(weight * derivative ** 2))
    return total


def norm_ratio(A):
    ''' |grad A|^2 / (|curl A|^2 + |div A|^2 + |A|^2) '''
    grid = A.grid
    vol = grid.cell_volume
    if not np.any(A.values):
        raise InvalidArgument('norm ratio of the zero field is undefined')
    denominator = vol * (np.sum((grid.curl @ A.values) ** 2) + np.sum((grid.div @ A.values) ** 2)
                         + np.sum(A.values ** 2))
    return gradient_seminorm_sq(A) / float(denominator)


def embedding_ratio(A, p=3.5):
    ''' |A|_{L^p} / |A|_M with A interpolated to cell centres '''
    grid = A.grid
    vol = grid.cell_volume
    if not np.any(A.values):
        raise InvalidArgument('embedding ratio of the zero field is undefined')
    if p < 1:
        raise InvalidArgument('p must be at least 1')
    modulus = np.linalg.norm(grid.face_to_center(A.values), axis=1)
    lp = float((vol * np.sum(modulus ** p)) ** (1.0 / p))
    m_norm = math.sqrt(vol * (np.sum(A.values ** 2) + np.sum((grid.curl @ A.values) ** 2)
                              + np.sum((grid.div @ A.values) ** 2)))
    return lp / m_norm


def gauge_compare(record_lorentz, record_zero_potential):
    ''' L2 distances of |psi| and of curl A (interior edges) at every common snapshot time '''
    physical = [dict(record.config.to_dict(), mode=None, name=None, galerkin=None)
                for record in (record_lorentz, record_zero_potential)]
    if physical[0] != physical[1]:
        raise InvalidArgument('gauge comparison needs the same physical configuration')
    times = _matched_times(record_lorentz, record_zero_potential)
    grid = record_lorentz.grid
    vol = grid.cell_volume
    psi_distance, curl_distance = [], []
    for a, b in zip(record_lorentz.snapshots, record_zero_potential.snapshots):
        psi_distance.append(math.sqrt(vol * np.sum((np.abs(a.psi) - np.abs(b.psi)) ** 2)))
        curl_distance.append(math.sqrt(vol * np.sum((grid.curl @ (a.A - b.A)) ** 2)))
    return GaugeDistance(times, np.array(psi_distance), np.array(curl_distance))
