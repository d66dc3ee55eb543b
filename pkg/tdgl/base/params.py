''' Physical and discretization parameters, and the simulation state '''
# -*- coding: utf-8 -*-
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from tdgl.base.fields import AppliedField
from tdgl.exceptions import InvalidArgument

SCHEMES = ('lagged', 'picard')


@dataclass(frozen=True)
class PhysParams:
    eta: float = 1.0
    kappa: float = 1.0
    T_final: float = 1.0
    applied: AppliedField = field(default_factory=AppliedField.zero)

    def __post_init__(self):
        for name in ('eta', 'kappa', 'T_final'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidArgument('%s must be positive, got %r' % (name, value))


@dataclass(frozen=True)
class TimeDisc:
    dt: float = 1e-3
    picard_max: int = 1
    picard_tol: float = 1e-10
    scheme: str = 'lagged'

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise InvalidArgument('dt must be positive, got %r' % self.dt)
        if int(self.picard_max) != self.picard_max or self.picard_max < 1:
            raise InvalidArgument('picard_max must be an integer >= 1, got %r' % self.picard_max)
        if not self.picard_tol > 0:
            raise InvalidArgument('picard_tol must be positive, got %r' % self.picard_tol)
        if self.scheme not in SCHEMES:
            raise InvalidArgument('scheme must be one of %s, got %r' % (SCHEMES, self.scheme))

    @property
    def max_iterations(self):
        return 1 if self.scheme == 'lagged' else int(self.picard_max)

    def steps(self, T_final):
        ''' Step sizes covering [0, T_final]; the last one is shortened when dt does not divide T_final '''
        if self.dt > T_final * (1 + 1e-12):
            raise InvalidArgument('dt=%r exceeds T_final=%r' % (self.dt, T_final))
        count = max(1, int(math.ceil(T_final / self.dt - 1e-9)))
        last = T_final - (count - 1) * self.dt
        return [self.dt] * (count - 1) + [last]


@dataclass(frozen=True, eq=False)
class SimState:
    time: float
    psi: object
    A: object
    coefficients: Optional[np.ndarray] = None

    @property
    def grid(self):
        return self.psi.grid
