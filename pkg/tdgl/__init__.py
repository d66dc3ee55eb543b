# -*- coding: utf-8 -*-
"""
    tdgl-lorentz
    ~~~~~
    Time-dependent Ginzburg-Landau simulations in the Lorentz gauge on voxel domains.
    :copyright: (c) 2026 by tdgl-lorentz developers.
    :license: BSD, see LICENSE.txt for more details.
"""
import logging

# PEP 386-compliant version number: N.N[.N]+[{a|b|c|rc}N[.N]+][.postN][.devN]
__version__ = '0.1.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())
