"""
Module of constant values for sumo
"""

import numpy as np


SQRT2 = np.sqrt(2.0)

#-------------------------------------------------------------------------------
# Numerical tolerances
#-------------------------------------------------------------------------------
SYMMETRY_RTOL = 1e-12      # relative asymmetry accepted for Hermitian blocks
ORACLE_RTOL = 1e-9         # analytic vs quadrature, relative
ORACLE_FLOOR = 1e-3        # entries below this fraction of the largest are compared absolutely
QUAD_DOUBLING_TOL = 1e-10  # order-doubling disagreement of the quadrature
FD_TOL = 1e-8              # finite-difference eigenvalue target
CONVERGENCE_TOL = 1e-12    # default eigenvalue convergence target (relative)

#-------------------------------------------------------------------------------
# Default orders and sizes
#-------------------------------------------------------------------------------
QUAD_ORDER = 120           # Gauss-Laguerre nodes in u = r^2
FD_STEP = 0.01             # coarsest finite-difference step
WKB_DECAY = np.log(1e14)   # semiclassical decay required at r_max
DRIFT_STEP = 10            # nu_max difference used for eigenvalue drift
REFERENCE_MARGIN = 20      # extra states used to confirm a reference spectrum

#-------------------------------------------------------------------------------
# Command-line exit codes
#-------------------------------------------------------------------------------
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_MISSING_CG = 4

#-------------------------------------------------------------------------------
# Result file schema
#-------------------------------------------------------------------------------
SCHEMA_VERSION = 'v1'
