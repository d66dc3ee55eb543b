'''
Simulation documents.

A run is described by one TOML or JSON document. ``parse_config`` validates
it against ``CONFIG_SCHEMA`` (every violation is collected, unknown keys are
rejected), fills the documented defaults from ``tdgl.settings`` and applies
the cross-field checks that a schema cannot express.
'''
# -*- coding: utf-8 -*-
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from jsonschema import Draft202012Validator

from tdgl.base.fields import AppliedField
from tdgl.base.params import SCHEMES, PhysParams, TimeDisc
from tdgl.domain import build_box_domain, build_fichera_domain, build_lshape_domain, domain_from_mask
from tdgl.exceptions import ConfigValidationError, InvalidArgument
from tdgl.operators import grid_for
from tdgl.settings import SOLVER_KEYS, get_config, simulation_defaults
from tdgl.utils import canonical_json, sha256_hex

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)

MODES = ('grid', 'galerkin', 'zero_potential')
DOMAIN_KINDS = ('box', 'lshape', 'fichera', 'mask')
INITIAL_KINDS = ('random', 'uniform', 'steady', 'zero', 'manufactured', 'file')
POTENTIAL_KINDS = ('zero', 'cosine_gradient', 'file')

_NUMBER = {'type': 'number'}
_POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
_TRIPLE = {'type': 'array', 'minItems': 3, 'maxItems': 3}


def _section(properties):
    return {'type': 'object', 'additionalProperties': False, 'properties': properties}


CONFIG_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'type': 'object',
    'additionalProperties': False,
    'required': ['domain'],
    'properties': {
        'mode': {'enum': list(MODES)},
        'name': {'type': 'string', 'pattern': '^[A-Za-z0-9_.-]+$'},
        'domain': _section({
            'kind': {'enum': list(DOMAIN_KINDS)},
            'counts': dict(_TRIPLE, items={'type': 'integer', 'minimum': 2}),
            'lengths': dict(_TRIPLE, items=_POSITIVE),
            'removed_quadrant': {'type': 'array', 'minItems': 2, 'maxItems': 2,
                                 'items': {'enum': ['x', 'y', 'z']}},
            'mask': {'type': ['string', 'null']},
        }),
        'physics': _section({'eta': _POSITIVE, 'kappa': _POSITIVE, 'T_final': _POSITIVE}),
        'applied': _section({
            'kind': {'enum': ['uniform', 'expression']},
            'value': dict(_TRIPLE, items=_NUMBER),
            'expressions': dict(_TRIPLE, items={'type': 'string'}),
            'divergence_free': {'type': 'boolean'},
        }),
        'time': _section({
            'dt': _POSITIVE,
            'picard_max': {'type': 'integer', 'minimum': 1},
            'picard_tol': _POSITIVE,
            'scheme': {'enum': list(SCHEMES)},
        }),
        'initial': _section({
            'kind': {'enum': list(INITIAL_KINDS)},
            'seed': {'type': 'integer', 'minimum': 0},
            'value': {'type': 'array', 'minItems': 2, 'maxItems': 2, 'items': _NUMBER},
            'path': {'type': ['string', 'null']},
            'perturbation': {'type': 'number', 'minimum': 0},
            'perturbation_seed': {'type': 'integer', 'minimum': 0},
            'potential': {'enum': list(POTENTIAL_KINDS)},
            'potential_amplitude': _NUMBER,
            'manufactured_gradient': {'type': 'number', 'minimum': 0},
        }),
        'output': _section({'every': {'type': 'integer', 'minimum': 1}, 'vtk': {'type': 'boolean'}}),
        'diagnostics': _section({
            'energy': {'type': 'boolean'}, 'bound': {'type': 'boolean'}, 'weak': {'type': 'boolean'},
        }),
        'galerkin': _section({'N': {'type': 'integer', 'minimum': 1}, 'H_zero_bc': {'type': 'boolean'}}),
        'solver': _section({
            'linear_rtol': _POSITIVE,
            'linear_maxiter': {'type': 'integer', 'minimum': 1},
            'bound_tol': {'type': 'number', 'minimum': 0},
            'eigen_shift': {'type': 'number', 'exclusiveMaximum': 1},
            'eigen_tol': {'type': 'number', 'minimum': 0},
            'eigen_maxiter': {'type': 'integer', 'minimum': 1},
        }),
    },
}


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    counts: tuple
    lengths: tuple
    removed_quadrant: tuple = ('x', 'y')
    mask: Optional[str] = None

    def build(self):
        if self.kind == 'box':
            return build_box_domain(self.counts, self.lengths)
        if self.kind == 'lshape':
            return build_lshape_domain(self.counts, self.lengths, self.removed_quadrant)
        if self.kind == 'fichera':
            return build_fichera_domain(self.counts, self.lengths)
        try:
            mask = np.load(self.mask)
        except (OSError, ValueError, TypeError) as error:
            raise InvalidArgument('cannot read domain mask %s: %s' % (self.mask, error)) from error
        if tuple(mask.shape) != tuple(self.counts):
            raise InvalidArgument('mask %s has shape %s, expected %s' % (self.mask, mask.shape, self.counts))
        return domain_from_mask(mask, self.lengths)


@dataclass(frozen=True)
class PhysicsSpec:
    eta: float
    kappa: float
    T_final: float


@dataclass(frozen=True)
class AppliedSpec:
    kind: str
    value: tuple
    expressions: tuple
    divergence_free: bool = True

    def build(self):
        if self.kind == 'uniform':
            return AppliedField.uniform(self.value, self.divergence_free)
        return AppliedField.from_expressions(self.expressions, self.divergence_free)

    @property
    def is_zero(self):
        return self.kind == 'uniform' and not any(self.value)


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    seed: int
    value: tuple
    path: Optional[str]
    perturbation: float
    perturbation_seed: int
    potential: str
    potential_amplitude: float
    manufactured_gradient: float

    def as_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class OutputSpec:
    every: int = 1
    vtk: bool = False


@dataclass(frozen=True)
class DiagnosticsSpec:
    energy: bool = True
    bound: bool = True
    weak: bool = False


@dataclass(frozen=True)
class GalerkinSpec:
    N: int = 16
    H_zero_bc: bool = True


@dataclass(frozen=True)
class SimConfig:
    mode: str
    name: str
    domain: DomainSpec
    physics: PhysicsSpec
    applied: AppliedSpec
    time: TimeDisc
    initial: InitialSpec
    output: OutputSpec
    diagnostics: DiagnosticsSpec
    galerkin: GalerkinSpec
    solver: tuple = ()

    def build_domain(self):
        return self.domain.build()

    def build_grid(self):
        return grid_for(self.build_domain())

    def phys_params(self):
        return PhysParams(self.physics.eta, self.physics.kappa, self.physics.T_final, self.applied.build())

    def settings(self):
        return get_config({SOLVER_KEYS[key]: value for key, value in self.solver})

    def to_dict(self):
        return {
            'mode': self.mode,
            'name': self.name,
            'domain': {
                'kind': self.domain.kind,
                'counts': list(self.domain.counts),
                'lengths': list(self.domain.lengths),
                'removed_quadrant': list(self.domain.removed_quadrant),
                'mask': self.domain.mask,
            },
            'physics': dict(self.physics.__dict__),
            'applied': {
                'kind': self.applied.kind,
                'value': list(self.applied.value),
                'expressions': list(self.applied.expressions),
                'divergence_free': self.applied.divergence_free,
            },
            'time': dict(self.time.__dict__),
            'initial': dict(self.initial.as_dict(), value=list(self.initial.value)),
            'output': dict(self.output.__dict__),
            'diagnostics': dict(self.diagnostics.__dict__),
            'galerkin': dict(self.galerkin.__dict__),
            'solver': dict(self.solver),
        }

    def without_initial(self):
        ''' Everything but the initial data, for comparing runs that differ only there '''
        data = self.to_dict()
        data.pop('initial')
        data.pop('name')
        return data


def _merge(defaults, data):
    merged = dict(defaults)
    for key, value in data.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict) and key != 'solver':
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _violation(path, message):
    return {'path': path, 'message': message}


def _schema_violations(data):
    validator = Draft202012Validator(CONFIG_SCHEMA)
    violations = []
    for error in sorted(validator.iter_errors(data), key=lambda error: list(map(str, error.absolute_path))):
        path = '.'.join(str(part) for part in error.absolute_path)
        violations.append(_violation(path or '<root>', error.message))
    return violations


def _resolve(path, base_dir):
    if path is None or base_dir is None or os.path.isabs(path):
        return path
    return str((Path(base_dir) / path).resolve())


def _build(data, base_dir):
    domain = data['domain']
    initial = data['initial']
    applied = data['applied']
    return SimConfig(
        mode=data['mode'],
        name=data['name'],
        domain=DomainSpec(domain['kind'], tuple(int(n) for n in domain['counts']),
                          tuple(float(v) for v in domain['lengths']), tuple(domain['removed_quadrant']),
                          _resolve(domain['mask'], base_dir)),
        physics=PhysicsSpec(**{key: float(value) for key, value in data['physics'].items()}),
        applied=AppliedSpec(applied['kind'], tuple(float(v) for v in applied['value']),
                            tuple(applied['expressions']), bool(applied['divergence_free'])),
        time=TimeDisc(float(data['time']['dt']), int(data['time']['picard_max']),
                      float(data['time']['picard_tol']), data['time']['scheme']),
        initial=InitialSpec(initial['kind'], int(initial['seed']), tuple(float(v) for v in initial['value']),
                            _resolve(initial['path'], base_dir), float(initial['perturbation']),
                            int(initial['perturbation_seed']), initial['potential'],
                            float(initial['potential_amplitude']), float(initial['manufactured_gradient'])),
        output=OutputSpec(**data['output']),
        diagnostics=DiagnosticsSpec(**data['diagnostics']),
        galerkin=GalerkinSpec(**data['galerkin']),
        solver=tuple(sorted(data['solver'].items())),
    )


def _cross_violations(config):
    violations = []
    if config.physics.T_final < config.time.dt:
        violations.append(_violation('time.dt', 'dt=%r exceeds T_final=%r' % (config.time.dt, config.physics.T_final)))
    if config.domain.kind == 'mask' and not config.domain.mask:
        violations.append(_violation('domain.mask', 'mask domains need a mask file'))
    if config.initial.kind == 'file' or config.initial.potential == 'file':
        if not config.initial.path or not os.path.exists(config.initial.path):
            violations.append(_violation('initial.path', 'initial data file %r not found' % config.initial.path))
    if config.initial.kind == 'manufactured':
        if config.domain.kind != 'box':
            violations.append(_violation('initial.kind', 'manufactured solutions need a box domain'))
        if not config.applied.is_zero:
            violations.append(_violation('applied', 'manufactured solutions need H = 0'))
        if config.mode == 'zero_potential':
            violations.append(_violation('mode', 'manufactured solutions are built for the Lorentz gauge'))
    elif config.initial.manufactured_gradient:
        violations.append(_violation('initial.manufactured_gradient',
                                     'only the manufactured preset has a gradient part'))

    try:
        domain = config.build_domain()
    except InvalidArgument as error:
        violations.append(_violation('domain', str(error)))
        return violations
    try:
        applied = config.applied.build()
        applied.check_divergence(grid_for(domain))
    except InvalidArgument as error:
        violations.append(_violation('applied', str(error)))
    return violations


def config_from_dict(data, base_dir=None):
    if not isinstance(data, dict):
        raise ConfigValidationError([_violation('<root>', 'configuration must be a table/object')])
    violations = _schema_violations(data)
    if violations:
        raise ConfigValidationError(violations)
    merged = _merge(simulation_defaults(), data)
    try:
        config = _build(merged, base_dir)
    except InvalidArgument as error:
        raise ConfigValidationError([_violation('time', str(error))]) from error
    violations = _cross_violations(config)
    if violations:
        raise ConfigValidationError(violations)
    logger.debug('parsed configuration %s (%s mode)', config.name, config.mode)
    return config


def _looks_like_path(source):
    return isinstance(source, os.PathLike) or (
        isinstance(source, str) and '\n' not in source and source.strip()[:1] not in ('{', '[')
        and Path(source).suffix.lower() in ('.toml', '.json'))


def parse_config(source):
    ''' Parse a path or the text of a TOML/JSON document into a validated SimConfig '''
    base_dir = None
    if _looks_like_path(source):
        path = Path(source)
        text = path.read_text(encoding='utf-8')
        is_json = path.suffix.lower() == '.json'
        base_dir = path.parent
    else:
        text = source
        is_json = text.lstrip().startswith('{')
    try:
        data = json.loads(text) if is_json else tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as error:
        raise ConfigValidationError([_violation('<document>', 'cannot decode: %s' % error)]) from error
    return config_from_dict(data, base_dir)


def serialize_config(config):
    return canonical_json(config.to_dict())


def config_hash(config):
    return sha256_hex(serialize_config(config))
