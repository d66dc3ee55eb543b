#!/usr/bin/env python
# -*- coding: utf-8 -*-
''' tdgl-lorentz setup file for pip package '''
import ast
import re

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup  # pylint: disable=no-name-in-module,import-error


_version_re = re.compile(r'__version__\s+=\s+(.*)')  # pylint: disable=invalid-name

with open('tdgl/__init__.py', 'rb') as f:
    version = str(ast.literal_eval(_version_re.search(  # pylint: disable=invalid-name
        f.read().decode('utf-8')).group(1)))


setup(
    name='tdgl-lorentz',
    version=version,
    description='Time-dependent Ginzburg-Landau simulations in the Lorentz gauge on voxel domains.',
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    author='tdgl-lorentz developers',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'sympy>=1.9',
        'jsonschema>=4.0',
        'tomli>=1.1; python_version < "3.11"',
    ],
    test_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'sympy>=1.9',
        'jsonschema>=4.0',
    ],
    packages=[
        'tdgl',
        'tdgl.base',
        'tdgl.tests',
    ],
    entry_points={
        'console_scripts': ['tdgl=tdgl.cli:main'],
    },
    include_package_data=True,
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics'
    ],
    keywords='ginzburg-landau superconductivity lorentz gauge finite differences galerkin',
    license='BSD',
)
