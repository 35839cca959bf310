#!/usr/bin/env python
"""
Convergence of the l = 0 quartic oscillator levels, -nabla^2/2 + r^4 on R^3,
as a function of the basis scale a.
"""

from argparse import ArgumentParser, ArgumentDefaultsHelpFormatter

import numpy as np

from sumo import hamiltonian
from sumo import solve
from sumo.hamiltonian import BasisSpec

p = ArgumentParser(description='Minimal radial basis size of the quartic oscillator versus scale.',
                   formatter_class=ArgumentDefaultsHelpFormatter)

p.add_argument('--scales', type=float, nargs='+', default=[1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
               help='Basis scales a to try.')
p.add_argument('--energy-cut', dest='energy_cut', type=float, default=50.,
               help='Levels below this energy must converge.')
p.add_argument('--tolerance', type=float, default=1e-9,
               help='Relative convergence tolerance.')
p.add_argument('--nu-reference', dest='nu_reference', type=int, default=150,
               help='Reference truncation for the converged levels.')

args = p.parse_args()

spec = hamiltonian.quartic_oscillator(3)

print('{:>6s} {:>8s} {:>8s}'.format('a', 'nu_max', 'levels'))
for scale in args.scales:
    basis = BasisSpec(N=3, scale=scale)
    n, reference = solve.minimal_basis_size(spec, basis, 0, args.energy_cut,
                                            tol=args.tolerance, nu_reference=args.nu_reference)
    print('{:6.2f} {:8d} {:8d}'.format(scale, n, len(reference)))

print('Ground state energy: {:.12f}'.format(reference[0]))

for optimize in (False, True):
    n, scale = solve.harmonic_basis_requirement(spec, 0, reference[0], rel_tol=0.01,
                                                optimize_scale=optimize)
    print('A lambda = 3/2 basis needs {} states at a = {:.4f} for 1% accuracy{}'.format(
        n, scale, ' (a optimized per size)' if optimize else ''))

print('Relative spread of the reference levels:', np.ptp(reference)/reference[0])
