'''
Time integration of the Lorentz-gauge TDGL system.

Each step is linearly implicit backward Euler: the psi-equation is solved
with A fixed, then the A-equation with psi fixed; Picard iteration repeats
the pair until the update stalls. ``picard_max = 1`` is the lagged scheme.
The same steppers drive the spectral Galerkin mode (A restricted to the span
of the first N eigenvectors of M) and the zero-potential gauge backend.
'''
# -*- coding: utf-8 -*-
import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from tdgl import diagnostics
from tdgl.base.fields import OrderParameterField, VectorPotentialField
from tdgl.base.params import SimState
from tdgl.exceptions import InvalidArgument, NumericalFailure
from tdgl.galerkin import assemble_M, eigenbasis_M, project_onto_XN
from tdgl.helpers import initial_state_fields
from tdgl.manufactured import ManufacturedSolution
from tdgl.operators import applied_source, supercurrent_values
from tdgl.records import RunRecord, Snapshot
from tdgl.settings import get_config
from tdgl.solvers import SolveCounter, solve_general, solve_spd

logger = logging.getLogger(__name__)

LORENTZ = 'lorentz'
ZERO_POTENTIAL = 'zero_potential'


@dataclass
class SolverStats:
    psi: SolveCounter = field(default_factory=SolveCounter)
    potential: SolveCounter = field(default_factory=SolveCounter)
    steps: int = 0
    picard_iterations: int = 0
    picard_unconverged_steps: int = 0
    bound_breaches: int = 0
    max_weak_residual: tuple = (0.0, 0.0)

    def as_dict(self):
        return {
            'psi_solver': self.psi.as_dict(),
            'A_solver': self.potential.as_dict(),
            'steps': self.steps,
            'picard_iterations': self.picard_iterations,
            'picard_unconverged_steps': self.picard_unconverged_steps,
            'bound_breaches': self.bound_breaches,
            'max_weak_residual': list(self.max_weak_residual),
        }


@dataclass(frozen=True)
class PicardReport:
    iterations: int
    distances: tuple
    converged: bool


def psi_matrix(grid, psi_old, A_values, params, dt, gauge=LORENTZ):
    ''' (eta/dt) I + L_A + diag(|psi_old|^2 - 1) [- i eta kappa diag(div A)] '''
    diagonal = params.eta / dt + (np.abs(psi_old) ** 2 - 1.0)
    if gauge == LORENTZ:
        diagonal = diagonal - 1j * params.eta * params.kappa * (grid.div @ A_values)
    return (grid.covariant_laplacian_matrix(A_values, params.kappa) + sp.diags(diagonal)).tocsr()


def potential_matrix(grid, dt, gauge=LORENTZ):
    matrix = sp.identity(grid.n_faces, format='csr') / dt + grid.curl_curl
    if gauge == LORENTZ:
        matrix = matrix + grid.grad_div
    return matrix.tocsr()


def potential_rhs(state, psi_used, params, dt, forcing=None):
    ''' A^n / dt + curl H - J(psi_used, A^n) [+ forcing] '''
    grid = state.grid
    rhs = state.A.values / dt + applied_source(grid, params.applied)
    rhs = rhs - supercurrent_values(grid, psi_used.values, state.A.values, params.kappa)
    if forcing is not None:
        rhs = rhs + forcing
    return rhs


def step_psi(state, A_used, params, dt, forcing=None, gauge=LORENTZ, settings=None, stats=None):
    config = get_config(settings)
    grid = state.grid
    bound = 1.0 + config['BOUND_TOL']
    psi_old = state.psi.values
    matrix = psi_matrix(grid, psi_old, A_used.values, params, dt, gauge)
    rhs = (params.eta / dt) * psi_old
    if forcing is not None:
        rhs = rhs + forcing
    values = solve_general(matrix, rhs, x0=psi_old, rtol=config['LINEAR_RTOL'], maxiter=config['LINEAR_MAXITER'],
                           counter=stats.psi if stats else None)
    if values.size and np.abs(values).max() > bound:
        logger.debug('bound monitor: max |psi| = %.12g at t=%g', np.abs(values).max(), state.time + dt)
        if stats is not None:
            stats.bound_breaches += 1
    return OrderParameterField(grid, values)


def step_A(state, psi_used, params, dt, forcing=None, gauge=LORENTZ, settings=None, stats=None):
    config = get_config(settings)
    grid = state.grid
    rhs = potential_rhs(state, psi_used, params, dt, forcing)
    values = solve_spd(potential_matrix(grid, dt, gauge), rhs, x0=state.A.values, rtol=config['LINEAR_RTOL'],
                       maxiter=config['LINEAR_MAXITER'], counter=stats.potential if stats else None)
    return VectorPotentialField(grid, values)


def step_A_galerkin(state, psi_used, params, dt, basis, forcing=None):
    ''' Coefficient update (c' - c)/dt + (lambda - 1) c' = (a_i, rhs), diagonal in the eigenbasis '''
    rhs = potential_rhs(state, psi_used, params, dt, forcing)
    coefficients = basis.coefficients_of(rhs) / (1.0 / dt + basis.eigenvalues - 1.0)
    return basis.reconstruct(coefficients), coefficients


def _distance(psi_a, psi_b, A_a, A_b, vol):
    return math.sqrt(vol * (np.sum(np.abs(psi_a - psi_b) ** 2) + np.sum((A_a - A_b) ** 2)))


def picard_coupled_step(state, params, dt, tdisc, forcing=(None, None), gauge=LORENTZ, basis=None,
                        settings=None, stats=None):
    '''
    One time step. Iteration k solves psi with the previous A iterate (A^n for
    k = 1) and then A with the new psi, until the L2 distance between
    successive iterates drops to ``tdisc.picard_tol``.

    Returns the new SimState and a PicardReport.
    '''
    if tdisc.picard_max < 1:
        raise InvalidArgument('picard_max must be at least 1')
    grid = state.grid
    psi_forcing, potential_forcing = forcing
    A_iterate, coefficients = state.A, state.coefficients
    psi_previous, A_previous = state.psi.values, state.A.values
    distances = []
    converged = False
    for _ in range(tdisc.max_iterations):
        psi_iterate = step_psi(state, A_iterate, params, dt, psi_forcing, gauge, settings, stats)
        if basis is None:
            A_iterate = step_A(state, psi_iterate, params, dt, potential_forcing, gauge, settings, stats)
        else:
            A_iterate, coefficients = step_A_galerkin(state, psi_iterate, params, dt, basis, potential_forcing)
        distances.append(_distance(psi_iterate.values, psi_previous, A_iterate.values, A_previous,
                                   grid.cell_volume))
        psi_previous, A_previous = psi_iterate.values, A_iterate.values
        if distances[-1] <= tdisc.picard_tol:
            converged = True
            break
    if tdisc.max_iterations == 1:
        converged = True
    if stats is not None:
        stats.picard_iterations += len(distances)
    report = PicardReport(len(distances), tuple(distances), converged)
    return SimState(state.time + dt, psi_iterate, A_iterate, coefficients), report


class _Monitor:
    ''' Per-step series row of a run '''

    def __init__(self, grid, params, config, manufactured):
        self.grid = grid
        self.params = params
        self.config = config
        self.manufactured = manufactured

    def row(self, step, state, previous=None, report=None, dt=None):
        grid, vol = self.grid, self.grid.cell_volume
        psi, A = state.psi.values, state.A.values
        row = {'step': step, 'time': state.time, 'picard_iterations': 0, 'picard_distance': 0.0}
        if self.config.diagnostics.energy:
            breakdown = diagnostics.energy(state.psi, state.A, self.params.applied, self.params)
            row.update(energy=breakdown.total, kinetic=breakdown.kinetic, condensation=breakdown.condensation,
                       field=breakdown.field, gauge=breakdown.gauge)
        if self.config.diagnostics.bound:
            row.update(max_abs_psi=float(np.abs(psi).max()), excess=diagnostics.excess_values(grid, psi))
        gradient = grid.grad @ psi
        divergence = grid.div @ A
        curl = grid.curl @ A
        row.update(
            psi_l2=math.sqrt(vol * np.sum(np.abs(psi) ** 2)),
            psi_l4_4=float(vol * np.sum(np.abs(psi) ** 4)),
            psi_h1=math.sqrt(vol * (np.sum(np.abs(psi) ** 2) + np.sum(np.abs(gradient) ** 2))),
            A_l2=math.sqrt(vol * np.sum(A ** 2)),
            A_m_norm=math.sqrt(vol * (np.sum(A ** 2) + np.sum(curl ** 2) + np.sum(divergence ** 2))),
            div_A_sq=float(vol * np.sum(divergence ** 2)),
        )
        if previous is not None:
            row.update(
                dpsi_dt_sq=float(vol * np.sum(np.abs(psi - previous.psi.values) ** 2) / dt ** 2),
                dA_dt_sq=float(vol * np.sum((A - previous.A.values) ** 2) / dt ** 2),
                picard_iterations=report.iterations,
                picard_distance=report.distances[-1],
            )
        if self.manufactured is not None:
            exact_psi = self.manufactured.psi_values(grid, state.time)
            exact_A = self.manufactured.potential_values(grid, state.time)
            row.update(error_psi=math.sqrt(vol * np.sum(np.abs(psi - exact_psi) ** 2)),
                       error_A=math.sqrt(vol * np.sum((A - exact_A) ** 2)))
        return row


def _snapshot(step, state):
    coefficients = None if state.coefficients is None else np.array(state.coefficients)
    return Snapshot(step, state.time, np.array(state.psi.values), np.array(state.A.values), coefficients)


def _integrate(config, gauge, basis=None):
    params = config.phys_params()
    settings = config.settings()
    grid = basis.grid if basis is not None else config.build_grid()
    record = RunRecord.start(config)
    record.grid = grid

    manufactured = None
    if config.initial.kind == 'manufactured':
        manufactured = ManufacturedSolution.for_config(config, params)
    psi0, A0, warnings = initial_state_fields(config.initial.as_dict(), grid, manufactured)
    record.warnings.extend(warnings)

    coefficients = None
    if basis is not None:
        projection = project_onto_XN(A0, basis)
        A0, coefficients = projection.field, projection.coefficients
    state = SimState(0.0, psi0, A0, coefficients)
    stats = SolverStats()
    monitor = _Monitor(grid, params, config, manufactured)
    test_bank = diagnostics.default_test_bank(grid) if config.diagnostics.weak else None

    record.append_row(monitor.row(0, state))
    record.snapshots.append(_snapshot(0, state))
    steps = config.time.steps(params.T_final)
    logger.info('starting %s run %s: %d steps on %s cells', config.mode, config.name, len(steps), grid.shape)

    for step, dt in enumerate(steps, 1):
        time = params.T_final if step == len(steps) else step * config.time.dt
        forcing = (None, None)
        if manufactured is not None:
            forcing = (manufactured.psi_forcing(grid, time), manufactured.potential_forcing(grid, time))
        try:
            new_state, report = picard_coupled_step(state, params, dt, config.time, forcing, gauge, basis,
                                                    settings, stats)
        except NumericalFailure as error:
            record.status = 'failed'
            record.failure = dict(error.to_dict(), step=step, time=state.time)
            logger.error('run %s failed at step %d: %s', config.name, step, error)
            if record.snapshots[-1].step != step - 1:
                record.snapshots.append(_snapshot(step - 1, state))
            break
        new_state = dataclasses.replace(new_state, time=time)
        stats.steps += 1
        if not report.converged:
            if not stats.picard_unconverged_steps:
                record.warnings.append('Picard iteration not converged at t=%r (distance %.3e after %d iterations)'
                                       % (time, report.distances[-1], report.iterations))
                logger.warning(record.warnings[-1])
            stats.picard_unconverged_steps += 1
        if test_bank is not None:
            residual = diagnostics.weak_residual(state, new_state, params, dt, test_bank, gauge, forcing)
            stats.max_weak_residual = tuple(max(a, b) for a, b in zip(stats.max_weak_residual, residual))
        record.append_row(monitor.row(step, new_state, state, report, dt))
        if step % config.output.every == 0 or step == len(steps):
            record.snapshots.append(_snapshot(step, new_state))
        state = new_state
    else:
        record.status = 'completed'

    if stats.bound_breaches:
        record.warnings.append('bound monitor: max |psi| exceeded 1 in %d solves' % stats.bound_breaches)
    record.solver_stats = stats.as_dict()
    logger.info('run %s %s after %d steps', config.name, record.status, stats.steps)
    return record


def run_simulation(config):
    ''' Grid-mode Lorentz-gauge run '''
    return _integrate(config, LORENTZ)


def run_galerkin(config, basis=None):
    ''' Lorentz-gauge run with A restricted to X_N; computes the basis when none is given '''
    grid = config.build_grid()
    if basis is None:
        operator = assemble_M(grid, config.galerkin.H_zero_bc)
        basis = eigenbasis_M(operator, config.galerkin.N, settings=config.settings())
    if basis.grid.domain != grid.domain:
        raise InvalidArgument('Galerkin basis was computed on a different domain')
    if not basis.operator.H_zero_bc:
        raise InvalidArgument('Galerkin runs need a basis of the operator with pinned boundary curls')
    return _integrate(config, LORENTZ, basis)


def run_zero_potential_gauge(config):
    return _integrate(config, ZERO_POTENTIAL)


def run(config, basis=None):
    ''' Dispatch on ``config.mode`` '''
    if config.mode == 'galerkin':
        return run_galerkin(config, basis)
    if config.mode == 'zero_potential':
        return run_zero_potential_gauge(config)
    return run_simulation(config)
