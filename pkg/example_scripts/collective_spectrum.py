################################################################################
# SUMO - collective-model spectrum
#
# Working example script: chooses a parity-paired basis for the Bohr
# collective Hamiltonian in its rotor regime, diagonalizes it and writes the
# levels of every SO(5) irrep v.
################################################################################




################################################################################
# IMPORT MODULES
#
# If sumo is not installed, add its python/ directory to the path:
#-------------------------------------------------------------------------------
#import sys
#sys.path.insert(1, 'local/path/sumo/python/')

from sumo import hamiltonian
from sumo import results
from sumo import solve
################################################################################




################################################################################
# USER INPUTS
#-------------------------------------------------------------------------------
# Potential shape and mass parameter
alpha = 1.5
M = 100.

# Candidate lambdas for the v = 0 selection; 'harmonic' means lambda = v + 5/2
candidates = ['harmonic', 20., 40., 57., 70.]

# Lowest n states of interest, selected in an n_basis-state basis
n_states = 3
n_basis = 5

# Diagonalization size and largest v
nu_max = 8
v_max = 6

out_file = 'collective_alpha{:.1f}.csv'.format(alpha)
################################################################################




################################################################################
# BASIS SELECTION
#-------------------------------------------------------------------------------
spec = hamiltonian.collective_model(alpha, M)

basis, choice = solve.select_parity_pair(spec, n_states, n_basis, candidates, v_max=v_max, verbose=1)

print('Selected lambda_even = {}, lambda_odd = {}, a = {:.4f}'.format(basis.lam_even, basis.lam_odd,
                                                                      choice.scale))
print(choice.candidates)
################################################################################




################################################################################
# DIAGONALIZATION
#-------------------------------------------------------------------------------
result = solve.solve_central_force(spec, basis.resized(nu_max), levels=n_states, verbose=1)

rows = [(result.block_name, str(v), k, E, d, result.nu_max) for v, k, E, d in result.levels()]
table = results.new_table('spectrum', rows)

results.write_table(table, out_file)
print('Levels written to', out_file)
################################################################################
