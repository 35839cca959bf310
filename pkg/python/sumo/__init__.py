# Licensed under a 3-clause BSD-style license - see LICENSE.
# -*- coding: utf-8 -*-
"""
====
SUMO
====
SU(1,1) Modified Oscillators (SUMO), a Python toolkit for building Hamiltonian
matrices of polynomial Hamiltonians on R^N analytically in SU(1,1) x SO(N)
modified-oscillator bases. Functionality is available in package modules.

radial
------
Radial basis functions and their radial matrix elements from the SU(1,1)
algebra and the factorization method.

orbital
-------
SO(N) reduced matrix elements of the unit vector Q, SO(3) coupling and
recoupling coefficients, and consumption of SO(5) > SO(3) coupling tables.

combined
--------
Reduced matrix elements of x, p and the oscillator ladder operators between
arbitrary radial states.

hamiltonian, solve
------------------
Declarative Hamiltonians, block assembly, diagonalization, variational basis
optimization and basis selection.

oracle
------
Independent numerical checks: quadrature of matrix elements and a
finite-difference radial eigensolver.
"""

from ._version import __version__
