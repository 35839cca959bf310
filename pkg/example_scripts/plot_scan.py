#!/usr/bin/env python
"""
Plot the output of ``sumo scan``: single-state variational energies against
the diagonalized ones, and the optimal basis parameters, versus alpha.
"""

from argparse import ArgumentParser, ArgumentDefaultsHelpFormatter

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from sumo import results

p = ArgumentParser(description='Plot a collective-model alpha scan.',
                   formatter_class=ArgumentDefaultsHelpFormatter)

p.add_argument('scan_file', help='CSV or JSON file written by sumo scan.')
p.add_argument('-o', '--out', default='scan.png', help='Output image.')
p.add_argument('--v', type=int, default=0, help='SO(5) irrep to plot.')

args = p.parse_args()

schema, table = results.read_table(args.scan_file)
if not schema.startswith('sumo-schema scan'):
    raise SystemExit('{} is not a scan result ({})'.format(args.scan_file, schema))

rows = table[table['v'] == args.v]
rows.sort('alpha')

fig, axes = plt.subplots(1, 2, figsize=(10, 4), tight_layout=True)

ax = axes[0]
ax.plot(rows['alpha'], rows['variational'], 'o-', label='single state')
ax.plot(rows['alpha'], rows['diagonalized'], 's--', label='diagonalized')
ax.set(xlabel=r'$\alpha$', ylabel='$E$', title='v = {}'.format(args.v))
ax.legend()

ax = axes[1]
ax.plot(rows['alpha'], rows['scale_over_sqrt_mass'], 'o-', label=r'$a^*/\sqrt{M}$')
ax.plot(rows['alpha'], np.sqrt(rows['lam']), 's--', label=r'$\sqrt{\lambda^*}$')
ax.set(xlabel=r'$\alpha$', yscale='log')
ax.legend()

fig.savefig(args.out, dpi=150)
print('Wrote', args.out)
