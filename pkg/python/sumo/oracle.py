"""Independent numerical checks of the analytic matrix elements.

Radial elements are integrated by Gauss-Laguerre quadrature in u = r^2 with
Laguerre polynomials from ``scipy.special``; orbital elements by a
Gauss-Legendre x uniform-phi rule on the sphere; spectra by a finite-difference
radial solver with Richardson extrapolation.
"""

import time

import numpy as np

from dataclasses import dataclass
from functools import lru_cache

import scipy.linalg
import scipy.integrate

from scipy.special import binom, eval_genlaguerre, factorial, gammaln, lpmv, roots_genlaguerre

from sumo import radial
from sumo import orbital
from sumo import combined
from sumo import hamiltonian
from sumo.constants import (FD_STEP, FD_TOL, ORACLE_FLOOR, ORACLE_RTOL, QUAD_DOUBLING_TOL,
                            QUAD_ORDER, SQRT2, WKB_DECAY)
from sumo.errors import ConvergenceError, DomainError
from sumo.radial import LOWER, RAISE, RadialBasis


# operator name -> length degree; 'r^k' powers are given as integers
DERIVATIVES = {'ddr': -1, 'd2dr2': -2}

NAMED_POWERS = {'one': 0, 'r': 1, 'r2': 2, 'inv_r': -1, 'inv_r2': -2}




################################################################################
#-------------------------------------------------------------------------------
# Gauss-Laguerre quadrature in u = r^2
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre nodes and weights for u^alpha e^{-u} / Gamma(alpha+1).

    Weights are normalised to sum to 1, so a polynomial p of degree < 2 order
    integrates as ``weights @ p(nodes)`` times Gamma(alpha+1).
    """
    order: int
    alpha: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def exact_degree(self):
        return 2*self.order - 1



@lru_cache(maxsize=256)
def quadrature_rule(order, alpha):
    if alpha <= -1:
        raise DomainError("Gauss-Laguerre weight exponent must be > -1, got {}".format(alpha))
    nodes, weights = roots_genlaguerre(order, alpha)
    weights = weights/np.sum(weights)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=order, alpha=float(alpha), nodes=nodes, weights=weights)



def laguerre_series(n, alpha, x):
    """L_n^alpha(x) = sum_k (-1)^k binom(n+alpha, n-k) x^k / k!, for small n."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(n + 1):
        total = total + (-1.0)**k*binom(n + alpha, n - k)*x**k/factorial(k)
    return total



def _polys(nu_max, alpha, u):
    """L_nu^alpha(u) for nu = 0..nu_max, shape (nu_max+1, len(u)); zero for nu < 0."""
    return np.array([eval_genlaguerre(n, alpha, u) for n in range(nu_max + 1)])



def _log_c(lam, nu_max):
    nu = np.arange(nu_max + 1)
    return 0.5*(np.log(2.0) + gammaln(nu + 1) - gammaln(lam + nu))



def _derivative_polys(lam, nu_max, u):
    """Polynomial part D_nu(u) of dR/dr = C r^(lam-3/2) e^(-u/2) D_nu(u), without (-1)^nu."""
    L = _polys(nu_max, lam - 1.0, u)
    Lp = np.zeros_like(L)
    if nu_max >= 1:
        Lp[1:] = -_polys(nu_max - 1, lam, u)
    return (lam - 0.5)*L + 2.0*u*Lp - u*L



def _op_degree(op):
    if op in DERIVATIVES:
        return DERIVATIVES[op]
    if op in NAMED_POWERS:
        return NAMED_POWERS[op]
    if isinstance(op, (int, np.integer)):
        return int(op)
    raise ValueError("unknown operator {!r}".format(op))



def quad_matrix(lam_out, lam_in, op, nu_max, scale=1.0, order=QUAD_ORDER):
    """All <lam_out, mu| op |lam_in, nu> for mu, nu <= nu_max by quadrature.

    Parameters
    ----------
    lam_out, lam_in : float
        SU(1,1) labels of bra and ket.
    op : str or int
        'one', 'r', 'r2', 'inv_r', 'inv_r2', an integer power k of r,
        'ddr' or 'd2dr2'. The second derivative is integrated as
        -<R'|R'>.
    nu_max : int
    scale : float
    order : int

    Returns
    -------
    ndarray of shape (nu_max+1, nu_max+1)
    """
    degree = _op_degree(op)
    sign = (-1.0)**np.add.outer(np.arange(nu_max + 1), np.arange(nu_max + 1))
    c_out = _log_c(lam_out, nu_max)
    c_in = _log_c(lam_in, nu_max)

    if op == 'ddr':
        alpha = 0.5*(lam_in + lam_out - 3.0)
        rule = quadrature_rule(order, alpha)
        left = _polys(nu_max, lam_out - 1.0, rule.nodes)
        right = _derivative_polys(lam_in, nu_max, rule.nodes)
    elif op == 'd2dr2':
        alpha = 0.5*(lam_in + lam_out - 4.0)
        rule = quadrature_rule(order, alpha)
        left = -_derivative_polys(lam_out, nu_max, rule.nodes)
        right = _derivative_polys(lam_in, nu_max, rule.nodes)
    else:
        alpha = 0.5*(lam_in + lam_out - 2.0 + degree)
        rule = quadrature_rule(order, alpha)
        left = _polys(nu_max, lam_out - 1.0, rule.nodes)
        right = _polys(nu_max, lam_in - 1.0, rule.nodes)

    core = (left*rule.weights) @ right.T
    logc = np.add.outer(c_out, c_in) + gammaln(alpha + 1.0) - np.log(2.0)
    return sign*np.exp(logc)*core*scale**(-degree)



def quad_me(lam_out, mu, lam_in, nu, op, scale=1.0, order=QUAD_ORDER, tol=QUAD_DOUBLING_TOL):
    """One radial element by quadrature, certified by doubling the order.

    Raises
    ------
    ConvergenceError
        When the two orders disagree by more than ``tol`` (relative, floor 1).
    """
    n = max(mu, nu)
    first = quad_matrix(lam_out, lam_in, op, n, scale, order)[mu, nu]
    second = quad_matrix(lam_out, lam_in, op, n, scale, 2*order)[mu, nu]
    if abs(first - second) > tol*max(abs(second), 1.0):
        raise ConvergenceError("quadrature of {} not converged: {} vs {}".format(op, first, second),
                               [first, second])
    return float(second)



def orthonormality_error(lam, nu_max, order=QUAD_ORDER):
    """max |<lam mu|lam nu> - delta| over mu, nu <= nu_max."""
    return float(np.max(np.abs(quad_matrix(lam, lam, 'one', nu_max, order=order) - np.eye(nu_max + 1))))




################################################################################
#-------------------------------------------------------------------------------
# Angular quadrature on the sphere
#-------------------------------------------------------------------------------
################################################################################

def spherical_harmonic(l, m, theta, phi):
    """Y_lm(theta, phi) with the Condon-Shortley phase."""
    if abs(m) > l:
        return np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    am = abs(m)
    norm = np.sqrt((2*l + 1)/(4*np.pi)*np.exp(gammaln(l - am + 1) - gammaln(l + am + 1)))
    y = norm*lpmv(am, l, np.cos(theta))*np.exp(1j*am*phi)
    if m < 0:
        y = (-1.0)**am*np.conj(y)
    return y



def angular_quad_me(l2, m2, l1, m1, f, n_theta=48, n_phi=96):
    """Real part of the integral of conj(Y_l2m2) f Y_l1m1 over the sphere.

    ``f(theta, phi)`` must accept broadcast arrays.
    """
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)[:, None]
    phi = (2*np.pi*np.arange(n_phi)/n_phi)[None, :]
    integrand = np.conj(spherical_harmonic(l2, m2, theta, phi))*f(theta, phi)*spherical_harmonic(l1, m1, theta, phi)
    value = np.sum(wx[:, None]*integrand)*2*np.pi/n_phi
    return float(value.real)




################################################################################
#-------------------------------------------------------------------------------
# Finite-difference radial eigensolver
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid with Dirichlet conditions at r_min and r_max."""
    r_min: float
    r_max: float
    step: float

    @property
    def points(self):
        n = int(round((self.r_max - self.r_min)/self.step)) - 1
        return self.r_min + self.step*np.arange(1, n + 1)

    def refined(self, factor=2):
        return RadialGrid(self.r_min, self.r_max, self.step/factor)



@dataclass
class FDResult:
    eigenvalues: np.ndarray
    error_estimate: np.ndarray
    order: np.ndarray
    converged: bool
    grid: RadialGrid



def centrifugal_constant(N, v, mass=1.0):
    """c in c/r^2 for the radial equation of irrep v in N dimensions."""
    lam = v + 0.5*N
    return (lam - 1.5)*(lam - 0.5)/(2.0*mass)



def _fd_levels(potential, centrifugal, grid, k, mass):
    r = grid.points
    kinetic = 1.0/(2.0*mass*grid.step**2)
    diag = 2.0*kinetic + potential(r) + centrifugal/r**2
    off = -kinetic*np.ones(len(r) - 1)
    return scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select='i',
                                         select_range=(0, k - 1))



def _wkb_radius(potential, centrifugal, energy, mass, r_min, r_limit=60.0):
    """Radius beyond the turning point where the WKB decay reaches WKB_DECAY."""
    r = np.linspace(max(r_min, 1e-3), r_limit, 60001)
    excess = potential(r) + centrifugal/r**2 - energy
    allowed = np.nonzero(excess <= 0)[0]
    start = allowed[-1] if len(allowed) else 0
    kappa = np.sqrt(2.0*mass*np.clip(excess[start:], 0.0, None))
    decay = scipy.integrate.cumulative_trapezoid(kappa, r[start:], initial=0.0)
    beyond = np.nonzero(decay >= WKB_DECAY)[0]
    if not len(beyond):
        return r_limit
    return float(r[start + beyond[0]])



def fd_radial_eigen(potential, centrifugal=0.0, k=1, mass=1.0, step=FD_STEP, r_min=0.0, r_max=None,
                    tol=FD_TOL, verbose=0):
    """Lowest k eigenvalues of -(1/2M) d^2/dr^2 + c/r^2 + V(r) on the half line.

    Second-order differences on grids h, h/2, h/4 are combined by two levels
    of Richardson extrapolation. The potential is never evaluated at r_min.

    Parameters
    ----------
    potential : callable
        V(r), vectorised.
    centrifugal : float
        The constant c.
    k : int
        Number of levels.
    mass : float
    step : float
        Coarsest step h.
    r_min : float
        Dirichlet point; 0 is exact for regular solutions.
    r_max : float, optional
        Outer Dirichlet point; by default placed where the semiclassical
        wave function of level k has decayed by exp(-WKB_DECAY).
    tol : float
        Target on the Richardson error estimate.
    verbose : int

    Returns
    -------
    FDResult
    """
    start = time.time()
    if r_max is None:
        coarse = RadialGrid(r_min, r_min + 20.0, 0.02)
        E_top = _fd_levels(potential, centrifugal, coarse, k, mass)[-1]
        r_max = r_min + np.ceil(_wkb_radius(potential, centrifugal, E_top, mass, r_min) - r_min)
    grid = RadialGrid(r_min, r_max, step)

    levels = [_fd_levels(potential, centrifugal, g, k, mass)
              for g in (grid, grid.refined(2), grid.refined(4))]
    E1, E2, E3 = levels

    R1 = (4.0*E2 - E1)/3.0
    R2 = (4.0*E3 - E2)/3.0
    best = (16.0*R2 - R1)/15.0
    error = np.abs(best - R2)

    with np.errstate(divide='ignore', invalid='ignore'):
        order = np.log2(np.abs(E1 - E2)/np.abs(E2 - E3))

    converged = bool(np.all(error <= tol*np.maximum(np.abs(best), 1.0)))
    if verbose:
        print("FD: {} levels on r in ({}, {}], h = {} -> error {:.2e} ({:.2f} s)".format(
            k, r_min, r_max, step, np.max(error), time.time() - start), flush=True)
    return FDResult(eigenvalues=best, error_estimate=error, order=order, converged=converged, grid=grid)




################################################################################
#-------------------------------------------------------------------------------
# Check battery
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float



def relative_error(analytic, reference, floor=ORACLE_FLOOR):
    """Largest entrywise |A - R| / max(|R|, floor * max|R|)."""
    analytic = np.asarray(analytic, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = np.maximum(np.abs(reference), floor*max(np.max(np.abs(reference)), 1e-300))
    return float(np.max(np.abs(analytic - reference)/scale))



def _radial_checks(lams, nu_max):
    """(name, analytic matrix, quadrature matrix) for every radial element."""
    for lam in lams:
        basis = RadialBasis(lam=lam, nu_max=nu_max)
        yield 'me_r2', radial.me_r2(basis).entries, quad_matrix(lam, lam, 'r2', nu_max)
        if lam > 1:
            yield 'me_inv_r2', radial.me_inv_r2(basis).entries, quad_matrix(lam, lam, 'inv_r2', nu_max)
            yield 'me_d2dr2', radial.me_d2dr2(basis).entries, quad_matrix(lam, lam, 'd2dr2', nu_max)
        for direction, shift in ((RAISE, 1), (LOWER, -1)):
            if direction == LOWER and lam <= 1:
                continue
            target = lam + shift
            yield ('me_r({})'.format(direction), radial.me_r(basis, direction).entries,
                   quad_matrix(target, lam, 'r', nu_max))
            if lam > 1:
                yield ('me_inv_r({})'.format(direction), radial.me_inv_r(basis, direction).entries,
                       quad_matrix(target, lam, 'inv_r', nu_max))
            yield ('me_ddr({})'.format(direction), radial.me_ddr(basis, direction).entries,
                   quad_matrix(target, lam, 'ddr', nu_max))



def _x_ladder_error(lams, nu_max, N=5):
    worst = 0.0
    for lam in lams:
        for dlam in (1, -1):
            if lam + dlam <= 1 or lam <= 1:
                continue
            for v in (1, 2):
                for dv in (1, -1):
                    for mu in range(nu_max + 1):
                        for nu in range(nu_max + 1):
                            bra = combined.CoupledState(lam + dlam, mu, v + dv, N)
                            ket = combined.CoupledState(lam, nu, v, N)
                            x = combined.reduced_me_x(bra, ket).total
                            ladder = (combined.reduced_me_cdag(bra, ket).total
                                      + combined.reduced_me_c(bra, ket).total)/SQRT2
                            worst = max(worst, abs(x - ladder)/max(abs(x), 1.0))
    return worst



def run_battery(verbose=0, lams=(1.2, 2.5, 7.0, 57.0), nu_max=20, tol=ORACLE_RTOL):
    """Compare every analytic element with its oracle and check the algebraic identities.

    Returns
    -------
    list of CheckResult
        One per check; radial checks are named after the operation.
    """
    results = []

    def record(name, error, tolerance):
        ok = bool(np.isfinite(error) and error <= tolerance)
        results.append(CheckResult(name=name, passed=ok, error=float(error), tolerance=tolerance))
        if verbose > 1 or (verbose and not ok):
            print("{:<28s} {:>10.3e} <= {:.1e} {}".format(name, error, tolerance, 'ok' if ok else 'FAIL'),
                  flush=True)

    # radial elements
    worst = {}
    for name, analytic, reference in _radial_checks(lams, nu_max):
        worst[name] = max(worst.get(name, 0.0), relative_error(analytic, reference))
    worst['orthonormality'] = max(orthonormality_error(lam, nu_max) for lam in lams)
    for name in sorted(worst):
        record(name, worst[name], tol)

    # 1/r^2 is the inverse of r^2 away from the truncation edge
    err = 0.0
    for lam in lams:
        if lam <= 1:
            continue
        basis = RadialBasis(lam=lam, nu_max=nu_max)
        prod = radial.me_r2(basis).entries[:-1] @ radial.me_inv_r2(basis).entries
        err = max(err, np.max(np.abs(prod - np.eye(nu_max + 1)[:-1])))
    record('inv_r2_recursion', err, 1e-12)

    err = 0.0
    for lam in lams:
        gens = radial.su11_generators(RadialBasis(lam=lam, nu_max=nu_max))
        casimir = gens.casimir()
        err = max(err, np.max(np.abs(casimir - 0.25*lam*(lam - 2)*np.eye(nu_max + 1)))/max(1.0, lam**2))
    record('su11_casimir', err, 1e-12)

    # orbital
    err = 0.0
    for N in (3, 5):
        for v in range(11):
            lhs = orbital.dim_son(N, v + 1)*orbital.reduced_me_Q(N, v + 1, v)**2
            rhs = orbital.dim_son(N, v)*orbital.reduced_me_Q(N, v, v + 1)**2
            err = max(err, abs(lhs - rhs))
    record('q_symmetry', err, 1e-13)

    err = 0.0
    for l1 in range(5):
        for l2 in range(5):
            for L in range(abs(l1 - l2), l1 + l2 + 1):
                for Lp in range(abs(l1 - l2), l1 + l2 + 1):
                    for M in range(-min(L, Lp), min(L, Lp) + 1):
                        s = sum(orbital.so3_cg(l1, m1, l2, M - m1, L, M)*orbital.so3_cg(l1, m1, l2, M - m1, Lp, M)
                                for m1 in range(-l1, l1 + 1) if abs(M - m1) <= l2)
                        err = max(err, abs(s - (1.0 if L == Lp else 0.0)))
    record('cg_orthogonality', err, 1e-13)

    err = max(abs(sum(orbital.me_crystal_field(l, l, m) for m in range(-l, l + 1))) for l in range(7))
    record('crystal_field_trace', err, 1e-12)

    field = lambda theta, phi: 3.0*np.cos(theta)**2 - 1.0
    err = 0.0
    for l1 in range(4):
        for l2 in range(4):
            for m in range(-min(l1, l2), min(l1, l2) + 1):
                err = max(err, abs(orbital.me_crystal_field(l2, l1, m) - angular_quad_me(l2, m, l1, m, field)))
    record('crystal_field_quadrature', err, 1e-12)

    # combined
    record('x_ladder_identity', _x_ladder_error((2.5, 4.2, 57.0), 6), 1e-12)

    err = 0.0
    for N in (3, 5):
        for v in range(5):
            for nu in range(5):
                ket = combined.CoupledState(v + 0.5*N, nu, v, N)
                n = combined.number_operator_expectation(ket, lambda w, N=N: w + 0.5*N)
                err = max(err, abs(n - (2*nu + v)))
    record('number_operator', err, 1e-12)

    # exactly solvable spectra
    err = 0.0
    for N in (3, 5):
        basis = hamiltonian.BasisSpec(N=N, kind=hamiltonian.HARMONIC, nu_max=nu_max, v_max=4)
        spec = hamiltonian.harmonic_oscillator(N)
        for v in range(5):
            H = hamiltonian.build_central_force_block(spec, basis, v)
            exact = np.diag(v + 2.0*np.arange(nu_max + 1) + 0.5*N)
            err = max(err, np.max(np.abs(H - exact)))
    record('harmonic_exactness', err, 1e-12)

    spec = hamiltonian.davidson(3, 2.0)
    basis = hamiltonian.BasisSpec(N=3, kind=hamiltonian.FIXED, lam=2.5, nu_max=nu_max)
    H = hamiltonian.build_central_force_block(spec, basis, 0)
    record('davidson_exactness', np.max(np.abs(H - np.diag(2.5 + 2.0*np.arange(nu_max + 1)))), 1e-10)

    return results
