"""Diagonalization, variational optimization of (a_v, lambda_v), basis selection
and convergence studies.
"""

import multiprocessing
import time

import numpy as np

from dataclasses import dataclass, field
from typing import Optional

import scipy.linalg
import scipy.optimize

from astropy.table import Table
from psutil import cpu_count

from sumo import hamiltonian
from sumo.constants import CONVERGENCE_TOL, DRIFT_STEP, REFERENCE_MARGIN, SYMMETRY_RTOL
from sumo.errors import ConvergenceError, DomainError
from sumo.hamiltonian import BasisSpec, FIXED, HARMONIC, PAIR




################################################################################
#-------------------------------------------------------------------------------
# Results
#-------------------------------------------------------------------------------
################################################################################

@dataclass
class SpectrumResult:
    """Eigenvalues and eigenvectors of every block of a Hamiltonian.

    Attributes
    ----------
    eigenvalues : dict
        Block label -> ascending eigenvalues.
    eigenvectors : dict
        Block label -> columns of orthonormal eigenvectors.
    states : dict
        Block label -> row labels of the eigenvectors.
    basis : BasisSpec
    drift : dict
        Block label -> eigenvalue change against ``nu_max - drift_step``.
    block_name : str
    spec_name : str
    """
    eigenvalues: dict = field(default_factory=dict)
    eigenvectors: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    basis: Optional[BasisSpec] = None
    drift: dict = field(default_factory=dict)
    drift_step: int = 0
    block_name: str = 'v'
    spec_name: str = ''

    @property
    def nu_max(self):
        return None if self.basis is None else self.basis.nu_max

    def levels(self, energy_cut=None):
        """(block, index, energy, drift) for every level, sorted by energy."""
        rows = []
        for label in sorted(self.eigenvalues):
            drift = self.drift.get(label)
            for k, E in enumerate(self.eigenvalues[label]):
                if energy_cut is not None and E > energy_cut:
                    break
                d = drift[k] if drift is not None and k < len(drift) else np.nan
                rows.append((label, k, float(E), float(d)))
        rows.sort(key=lambda row: (row[2], str(row[0]), row[1]))
        return rows

    def max_drift(self, energy_cut=None):
        drifts = [abs(row[3]) for row in self.levels(energy_cut) if np.isfinite(row[3])]
        return max(drifts) if drifts else 0.0



@dataclass
class VariationalResult:
    """Optimal single-state parameters for one SO(N) irrep v.

    ``energy`` is <0 v|H|0 v> at (scale, lam); ``trace`` lists every evaluated
    point as (scale, lam, energy).
    """
    v: int
    scale: float
    lam: float
    energy: float
    trace: list = field(default_factory=list)
    starts: int = 0

    def basis(self, N, nu_max=0):
        return BasisSpec(N=N, kind=FIXED, lam=self.lam, scale=self.scale, nu_max=nu_max, v_max=self.v)



@dataclass
class BasisChoice:
    """Outcome of the lowest-n-states basis selection for one v."""
    v: int
    lam: float
    scale: float
    energy: float
    n_states: int
    n_basis: int
    candidates: Table = None




################################################################################
#-------------------------------------------------------------------------------
# Diagonalization
#-------------------------------------------------------------------------------
################################################################################

def eigh(matrix, rtol=SYMMETRY_RTOL):
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    matrix : array_like of shape (n, n)
    rtol : float
        Largest accepted asymmetry relative to the largest entry.

    Returns
    -------
    eigenvalues : ndarray
        Ascending.
    eigenvectors : ndarray
        Orthonormal columns.
    """
    H = np.asarray(matrix, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("eigh needs a square matrix, got shape {}".format(H.shape))
    norm = np.max(np.abs(H)) if H.size else 0.0
    if H.size and np.max(np.abs(H - H.T)) > rtol*max(norm, 1e-300):
        raise ValueError("matrix is not symmetric to relative tolerance {}".format(rtol))
    return scipy.linalg.eigh(H)



def _lowest(H, count=None):
    if count is None:
        return scipy.linalg.eigh(H, eigvals_only=True)
    count = min(count, H.shape[0])
    return scipy.linalg.eigh(H, eigvals_only=True, subset_by_index=[0, count - 1])



def solve_central_force(spec, basis, v_values=None, levels=None, drift_step=DRIFT_STEP, verbose=0):
    """Diagonalize each central-force block v.

    Parameters
    ----------
    spec : HamiltonianSpec
    basis : BasisSpec
    v_values : iterable of int, optional
        Defaults to 0..basis.v_max.
    levels : int, optional
        Keep only the lowest ``levels`` eigenpairs per block.
    drift_step : int
        Eigenvalues are also computed at nu_max - drift_step; 0 disables.
    verbose : int

    Returns
    -------
    SpectrumResult
    """
    if v_values is None:
        v_values = range(basis.v_max + 1)
    result = SpectrumResult(basis=basis, drift_step=drift_step, block_name='v', spec_name=spec.name)

    for v in v_values:
        start = time.time()
        H = hamiltonian.build_central_force_block(spec, basis, v)
        w, V = eigh(H)
        k = len(w) if levels is None else min(levels, len(w))
        result.eigenvalues[v] = w[:k]
        result.eigenvectors[v] = V[:, :k]
        result.states[v] = [(nu, v) for nu in range(basis.nu_max + 1)]

        if drift_step and basis.nu_max >= drift_step:
            small = hamiltonian.build_central_force_block(spec, basis.resized(basis.nu_max - drift_step), v)
            ws = _lowest(small, k)
            result.drift[v] = ws - w[:len(ws)]

        if verbose > 1:
            print("v = {}: E0 = {:.12g} ({:.3f} s)".format(v, w[0], time.time() - start), flush=True)
    return result



def solve_coupled(spec, basis, blocks=None, levels=None, drift_step=DRIFT_STEP, verbose=0):
    """Diagonalize every block of a (possibly symmetry-broken) Hamiltonian."""
    assembled = hamiltonian.build_coupled_matrix(spec, basis, blocks)
    smaller = None
    if drift_step and basis.nu_max >= drift_step:
        smaller = hamiltonian.build_coupled_matrix(spec, basis.resized(basis.nu_max - drift_step), blocks)

    result = SpectrumResult(basis=basis, drift_step=drift_step, block_name=assembled.block_name,
                            spec_name=spec.name)
    for label in assembled:
        w, V = eigh(assembled.blocks[label])
        k = len(w) if levels is None else min(levels, len(w))
        result.eigenvalues[label] = w[:k]
        result.eigenvectors[label] = V[:, :k]
        result.states[label] = assembled.states[label]
        if smaller is not None and label in smaller.blocks:
            ws = _lowest(smaller.blocks[label], k)
            result.drift[label] = ws - w[:len(ws)]
        if verbose > 1:
            print("block {} = {}: {} states, E0 = {:.12g}".format(
                assembled.block_name, label, len(w), w[0]), flush=True)
    return result




################################################################################
#-------------------------------------------------------------------------------
# Variational optimization
#-------------------------------------------------------------------------------
################################################################################

def _default_scale_range(spec):
    root = np.sqrt(spec.mass)
    return (0.2*root, 5.0*root)



def _default_lam_range(spec, v):
    return (1.05, max(150.0, 4.0*(v + 0.5*spec.N)))



def single_state_energy(spec, v, scale, lam):
    """<0 v|H|0 v> in the basis state R^lam_0(a r) of irrep v."""
    basis = BasisSpec(N=spec.N, kind=FIXED, lam=lam, scale=scale, nu_max=0, v_max=v)
    return float(hamiltonian.build_central_force_block(spec, basis, v)[0, 0])



def variational_optimize(spec, v, scale_range=None, lam_range=None, grid=5, starts=3,
                         tol=1e-8, verbose=0):
    """Minimize <0 v|H|0 v> over the scale a and lambda.

    A ``grid`` x ``grid`` scan over (log a, lambda) seeds Nelder-Mead from
    the ``starts`` best points; the best converged run is returned.

    Parameters
    ----------
    spec : HamiltonianSpec
        Central-force Hamiltonian.
    v : int
        SO(N) irrep.
    scale_range, lam_range : (float, float), optional
        Search box; lambda must stay above 1 when 1/r^2 elements appear.
    grid, starts : int
    tol : float
        Nelder-Mead tolerance on both parameters and energy.
    verbose : int

    Returns
    -------
    VariationalResult

    Raises
    ------
    ConvergenceError
        When no Nelder-Mead run converges; ``trace`` holds the evaluated points.
    """
    a_lo, a_hi = _default_scale_range(spec) if scale_range is None else scale_range
    l_lo, l_hi = _default_lam_range(spec, v) if lam_range is None else lam_range
    if a_lo <= 0 or a_hi <= a_lo:
        raise DomainError("bad scale range ({}, {})".format(a_lo, a_hi))
    if l_lo <= 0 or l_hi <= l_lo:
        raise DomainError("bad lambda range ({}, {})".format(l_lo, l_hi))

    trace = []

    def objective(x):
        a, lam = np.exp(x[0]), x[1]
        E = single_state_energy(spec, v, a, lam)
        trace.append((float(a), float(lam), E))
        return E

    log_a = np.linspace(np.log(a_lo), np.log(a_hi), grid)
    lams = np.linspace(l_lo, l_hi, grid)
    seeds = sorted(((objective((x, l)), x, l) for x in log_a for l in lams))[:starts]

    bounds = [(np.log(a_lo), np.log(a_hi)), (l_lo, l_hi)]
    best = None
    for E0, x0, l0 in seeds:
        res = scipy.optimize.minimize(objective, x0=np.array([x0, l0]), method='Nelder-Mead',
                                      bounds=bounds,
                                      options={'xatol': tol, 'fatol': tol, 'maxiter': 4000})
        if verbose > 1:
            print("  start (a={:.4g}, lam={:.4g}) -> E={:.10g} [{}]".format(
                np.exp(x0), l0, res.fun, res.message), flush=True)
        if res.success and (best is None or res.fun < best.fun):
            best = res

    if best is None:
        raise ConvergenceError("variational optimization for v={} did not converge".format(v), trace)

    result = VariationalResult(v=v, scale=float(np.exp(best.x[0])), lam=float(best.x[1]),
                               energy=float(best.fun), trace=trace, starts=len(seeds))
    if verbose:
        print("v = {}: a* = {:.6g}, lambda* = {:.6g}, E = {:.10g}".format(
            v, result.scale, result.lam, result.energy), flush=True)
    return result



def excited_expectations(spec, result, count):
    """<nu v|H|nu v> for nu < count at the ground-state-optimized parameters."""
    H = hamiltonian.build_central_force_block(spec, result.basis(spec.N, nu_max=count - 1), result.v)
    return np.diag(H).copy()



def _optimal_scale(spec, v, lam, nu_max, index, scale_range):
    """Scale minimizing the index-th eigenvalue of the (nu_max+1) block."""
    a_lo, a_hi = scale_range

    def level(x):
        basis = BasisSpec(N=spec.N, kind=FIXED, lam=lam, scale=np.exp(x), nu_max=nu_max, v_max=v)
        return _lowest(hamiltonian.build_central_force_block(spec, basis, v), index + 1)[index]

    res = scipy.optimize.minimize_scalar(level, bounds=(np.log(a_lo), np.log(a_hi)), method='bounded',
                                         options={'xatol': 1e-10})
    if not res.success:
        raise ConvergenceError("scale optimization failed for lambda={}: {}".format(lam, res.message))
    return float(np.exp(res.x)), float(res.fun)



def select_basis(spec, v, n, n_basis, candidates, scale_range=None, verbose=0):
    """Pick lambda (and a) minimizing the n-th lowest eigenvalue of an n_basis block.

    Parameters
    ----------
    spec : HamiltonianSpec
    v : int
    n : int
        Number of low states that must be described well.
    n_basis : int
        Dimension of the radial basis, >= n.
    candidates : iterable of float or 'harmonic'
        lambda values to compare; 'harmonic' stands for v + N/2.
    scale_range : (float, float), optional
    verbose : int

    Returns
    -------
    BasisChoice
        Ties go to the smaller lambda, so the order of ``candidates`` does
        not matter.
    """
    if n_basis < n:
        raise ValueError("n_basis={} is smaller than n={}".format(n_basis, n))
    lams = sorted({(v + 0.5*spec.N) if c == HARMONIC else float(c) for c in candidates})
    if not lams:
        raise ValueError("empty candidate set")
    if scale_range is None:
        scale_range = _default_scale_range(spec)

    table = Table(names=('lam', 'scale', 'energy'), dtype=(float, float, float))
    best = None
    for lam in lams:
        a, E = _optimal_scale(spec, v, lam, n_basis - 1, n - 1, scale_range)
        table.add_row((lam, a, E))
        if verbose > 1:
            print("  lambda = {:.6g}: a = {:.6g}, E[{}] = {:.10g}".format(lam, a, n - 1, E), flush=True)
        if best is None or E < best[2]:
            best = (lam, a, E)

    return BasisChoice(v=v, lam=best[0], scale=best[1], energy=best[2], n_states=n,
                       n_basis=n_basis, candidates=table)



def select_parity_pair(spec, n, n_basis, candidates, v_max=0, scale_range=None, verbose=0):
    """select_basis on v = 0, returned as the pair basis (lambda, lambda + 1)."""
    choice = select_basis(spec, 0, n, n_basis, candidates, scale_range, verbose)
    basis = BasisSpec(N=spec.N, kind=PAIR, lam_even=choice.lam, lam_odd=choice.lam + 1,
                      scale=choice.scale, nu_max=n_basis - 1, v_max=v_max)
    return basis, choice




################################################################################
#-------------------------------------------------------------------------------
# Convergence
#-------------------------------------------------------------------------------
################################################################################

def convergence_study(spec, basis, schedule, v=0, levels=5, verbose=0):
    """Lowest eigenvalues of block v for each nu_max in ``schedule``.

    Returns
    -------
    astropy.table.Table
        Columns nu_max, level, energy and drift (change since the previous
        schedule entry, NaN for the first).
    """
    table = Table(names=('nu_max', 'level', 'energy', 'drift'), dtype=(int, int, float, float))
    previous = None
    for nu_max in sorted(schedule):
        H = hamiltonian.build_central_force_block(spec, basis.resized(nu_max), v)
        w = _lowest(H, levels)
        for k, E in enumerate(w):
            drift = E - previous[k] if previous is not None and k < len(previous) else np.nan
            table.add_row((nu_max, k, E, drift))
        previous = w
        if verbose:
            print("nu_max = {}: E0 = {:.14g}".format(nu_max, w[0]), flush=True)
    return table



def _close(E, ref, tol):
    return np.all(np.abs(E - ref) <= tol*np.maximum(np.abs(ref), 1.0))



def reference_levels(spec, basis, v, energy_cut, tol=CONVERGENCE_TOL, nu_reference=300):
    """Levels below ``energy_cut`` at nu_reference, confirmed at nu_reference + 20."""
    big = _lowest(hamiltonian.build_central_force_block(spec, basis.resized(nu_reference), v))
    ref = big[big <= energy_cut]
    check = _lowest(hamiltonian.build_central_force_block(spec, basis.resized(nu_reference + REFERENCE_MARGIN), v),
                    len(ref))
    if len(ref) and not _close(check, ref, tol):
        raise ConvergenceError("reference levels for v={} not stable at nu_max={} (drift {:.3g})".format(
            v, nu_reference, np.max(np.abs(check - ref))), [ref, check])
    return ref



def minimal_basis_size(spec, basis, v, energy_cut, tol=CONVERGENCE_TOL, nu_reference=300, verbose=0):
    """Smallest nu_max reproducing every level below ``energy_cut`` to relative ``tol``.

    Levels never rise when nu_max grows, so the predicate is monotone and a
    bisection suffices.

    Returns
    -------
    nu_max : int
    reference : ndarray
    """
    ref = reference_levels(spec, basis, v, energy_cut, tol, nu_reference)
    if len(ref) == 0:
        return 0, ref

    def good(nu_max):
        if nu_max + 1 < len(ref):
            return False
        w = _lowest(hamiltonian.build_central_force_block(spec, basis.resized(nu_max), v), len(ref))
        return _close(w, ref, tol)

    lo, hi = len(ref) - 1, nu_reference
    while lo < hi:
        mid = (lo + hi)//2
        if good(mid):
            hi = mid
        else:
            lo = mid + 1
    if verbose:
        print("v = {}: {} levels below {} need nu_max = {}".format(v, len(ref), energy_cut, lo), flush=True)
    return lo, ref



def harmonic_basis_requirement(spec, v, reference, rel_tol=0.01, n_max=60, scale=None,
                               optimize_scale=False, scale_range=None, verbose=0):
    """Smallest harmonic basis whose ground energy is within rel_tol of ``reference``.

    The basis is lambda = v + N/2 at the oscillator length of the mass
    parameter, a = sqrt(M), unless ``scale`` is given. With
    ``optimize_scale`` the scale is instead re-optimized for every size.

    Returns
    -------
    n_states : int
    scale : float

    Raises
    ------
    ConvergenceError
        When ``n_max`` states do not reach the target; ``trace`` holds
        (n, a, E) for every size tried.
    """
    if scale is None:
        scale = np.sqrt(spec.mass)
    if not scale > 0:
        raise DomainError("scale must be > 0, got {}".format(scale))
    if scale_range is None:
        scale_range = _default_scale_range(spec)
    lam = v + 0.5*spec.N
    trace = []
    for n in range(1, n_max + 1):
        if optimize_scale:
            a, E = _optimal_scale(spec, v, lam, n - 1, 0, scale_range)
        else:
            basis = BasisSpec(N=spec.N, kind=FIXED, lam=lam, scale=scale, nu_max=n - 1, v_max=v)
            a, E = scale, float(_lowest(hamiltonian.build_central_force_block(spec, basis, v), 1)[0])
        trace.append((n, a, E))
        if verbose > 1:
            print("  {} harmonic states: E0 = {:.10g}".format(n, E), flush=True)
        if E - reference <= rel_tol*abs(reference):
            return n, a
    raise ConvergenceError("{} harmonic states do not reach {} of {}".format(n_max, rel_tol, reference), trace)




################################################################################
#-------------------------------------------------------------------------------
# Collective-model alpha scan
#-------------------------------------------------------------------------------
################################################################################

SCAN_COLUMNS = ('alpha', 'v', 'scale', 'lam', 'scale_over_sqrt_mass', 'variational',
                'diagonalized', 'discrepancy', 'potential_minimum', 'drift')



def _scan_one(args):
    alpha, M, N, v_max, nu_reference = args
    spec = hamiltonian.collective_model(alpha, M, N)
    floor = hamiltonian.potential_depth(alpha, M)
    rows = []
    for v in range(v_max + 1):
        opt = variational_optimize(spec, v)
        exact, check = [float(_lowest(hamiltonian.build_central_force_block(spec, opt.basis(N, nu_max=n - 1), v), 1)[0])
                        for n in (nu_reference, nu_reference + REFERENCE_MARGIN)]
        rows.append((alpha, v, opt.scale, opt.lam, opt.scale/np.sqrt(M), opt.energy, exact,
                     (opt.energy - exact)/(exact - floor), hamiltonian.potential_minimum(alpha),
                     check - exact))
    return rows



def scan_collective(alphas, M=100.0, N=5, v_max=0, nu_reference=100, num_cpus=None, verbose=0):
    """Single-state variational versus diagonalized energies across alpha.

    ``discrepancy`` is the variational excess measured against the exact
    energy above the bottom of the potential, which is the plain relative
    error for alpha <= 1/2 and stays finite where the energy crosses zero.
    ``drift`` is the change of the diagonalized energy when the reference
    basis grows by REFERENCE_MARGIN states.

    Each alpha is independent; they are spread over a process pool sized by
    the physical core count unless ``num_cpus`` is given.

    Returns
    -------
    astropy.table.Table
        One row per (alpha, v) with the columns of ``SCAN_COLUMNS``, sorted.
    """
    if num_cpus is None:
        num_cpus = cpu_count(logical=False) or 1
    jobs = [(float(alpha), M, N, v_max, nu_reference) for alpha in alphas]

    start = time.time()
    if num_cpus > 1 and len(jobs) > 1:
        ctx = multiprocessing.get_context('fork')
        with ctx.Pool(min(num_cpus, len(jobs))) as pool:
            chunks = pool.map(_scan_one, jobs)
    else:
        chunks = [_scan_one(job) for job in jobs]

    rows = sorted(row for chunk in chunks for row in chunk)
    table = Table(rows=rows, names=SCAN_COLUMNS,
                  dtype=(float, int, float, float, float, float, float, float, float, float))
    if verbose:
        print("Scanned {} alpha values in {:.2f} s on {} processes".format(
            len(jobs), time.time() - start, num_cpus), flush=True)
    return table
