"""Radial basis functions of the SU(1,1) modified oscillator and all of their
one-dimensional radial matrix elements.

The basis functions are

    R^lam_nu(x) = (-1)^nu sqrt(2 nu!/Gamma(lam+nu)) x^(lam-1/2) L_nu^(lam-1)(x^2) exp(-x^2/2)

orthonormal on L^2(R+, dr). A basis with scale ``a`` uses sqrt(a) R^lam_nu(a r).
Every matrix element is computed at unit scale from a closed form and then
converted to the requested scale by its length degree (see :func:`rescale`).

Matrix convention: ``entries[mu, nu] = <target, mu | Op | source, nu>``.
"""

import numpy as np

from dataclasses import dataclass, replace
from typing import Optional

from scipy.special import gammaln

from sumo.errors import DomainError, PairingError


RAISE = 'raise'
LOWER = 'lower'

DIRECTIONS = (RAISE, LOWER)




################################################################################
#-------------------------------------------------------------------------------
# Domain types
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class RadialBasis:
    """A truncated SU(1,1) irrep {R^lam_nu(a r) : nu = 0..nu_max}.

    Parameters
    ----------
    lam : float
        SU(1,1) lowest weight lambda, > 0.
    scale : float
        Inverse length a, > 0, in oscillator units.
    nu_max : int
        Highest radial quantum number kept.
    """
    lam: float
    scale: float = 1.0
    nu_max: int = 0

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise DomainError("lambda must be > 0, got {}".format(self.lam))
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise DomainError("scale must be > 0, got {}".format(self.scale))
        if int(self.nu_max) != self.nu_max or self.nu_max < 0:
            raise DomainError("nu_max must be a non-negative integer, got {}".format(self.nu_max))
        object.__setattr__(self, 'lam', float(self.lam))
        object.__setattr__(self, 'scale', float(self.scale))
        object.__setattr__(self, 'nu_max', int(self.nu_max))

    @property
    def dim(self):
        return self.nu_max + 1

    @property
    def nu(self):
        return np.arange(self.dim)

    def shifted(self, delta):
        """Same scale and truncation, lambda moved by ``delta``."""
        return replace(self, lam=self.lam + delta)

    def resized(self, nu_max):
        return replace(self, nu_max=nu_max)

    def rescaled(self, scale):
        return replace(self, scale=scale)

    def same_irrep(self, other):
        """True when ``other`` spans the same functions up to truncation."""
        return bool(np.isclose(self.lam, other.lam, rtol=0, atol=1e-12) and
                    np.isclose(self.scale, other.scale, rtol=1e-14, atol=0))



@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix of a radial operator between two radial bases.

    Attributes
    ----------
    source, target : RadialBasis
        Column and row bases.
    entries : ndarray of shape (target.dim, source.dim)
        Read-only matrix elements.
    exact_within_truncation : bool
        True for band-limited operators (r, r^2, the harmonic Laplacian) whose
        retained entries do not depend on the truncation of products.
    degree : int or None
        Length dimension of the operator (r^k -> k, d/dr -> -1). None for
        inhomogeneous combinations such as A(X).
    name : str
        Short label used in messages and check reports.
    """
    source: RadialBasis
    target: RadialBasis
    entries: np.ndarray
    exact_within_truncation: bool = False
    degree: Optional[int] = 0
    name: str = ''

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (self.target.dim, self.source.dim):
            raise ValueError("entries of shape {} do not match bases ({}, {})".format(
                entries.shape, self.target.dim, self.source.dim))
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def shape(self):
        return self.entries.shape

    def is_symmetric(self, rtol=1e-12):
        """Symmetric to ``rtol`` relative to the largest entry."""
        if self.entries.shape[0] != self.entries.shape[1]:
            return False
        scale = max(np.max(np.abs(self.entries)), 1e-300)
        return bool(np.max(np.abs(self.entries - self.entries.T)) <= rtol*scale)

    def crop(self, nu_max):
        """Keep the leading (nu_max+1) rows and columns."""
        n = nu_max + 1
        return replace(self,
                       source=self.source.resized(nu_max),
                       target=self.target.resized(nu_max),
                       entries=self.entries[:n, :n])

    def __matmul__(self, other):
        """Operator product ``self @ other`` (``other`` acts first)."""
        if not self.source.same_irrep(other.target):
            raise PairingError("cannot compose {} (from lambda={}) after {} (to lambda={})".format(
                self.name, self.source.lam, other.name, other.target.lam))
        degree = None if self.degree is None or other.degree is None else self.degree + other.degree
        return OperatorMatrix(source=other.source,
                              target=self.target,
                              entries=self.entries @ other.entries,
                              exact_within_truncation=False,
                              degree=degree,
                              name='{}*{}'.format(self.name, other.name))

    def __mul__(self, c):
        return replace(self, entries=c*self.entries)

    __rmul__ = __mul__

    def __add__(self, other):
        if not (self.source.same_irrep(other.source) and self.target.same_irrep(other.target)):
            raise PairingError("cannot add {} and {}: different bases".format(self.name, other.name))
        degree = self.degree if self.degree == other.degree else None
        return OperatorMatrix(source=self.source,
                              target=self.target,
                              entries=self.entries + other.entries,
                              exact_within_truncation=self.exact_within_truncation and other.exact_within_truncation,
                              degree=degree,
                              name='{}+{}'.format(self.name, other.name))



@dataclass(frozen=True)
class SU11Generators:
    """Matrices of S+, S- and S0 in a radial basis."""
    s_plus: OperatorMatrix
    s_minus: OperatorMatrix
    s_zero: OperatorMatrix

    def casimir(self):
        """S0(S0 - 1) - S+S-, equal to lam(lam-2)/4 times the identity."""
        s0 = self.s_zero.entries
        return s0 @ (s0 - np.eye(s0.shape[0])) - self.s_plus.entries @ self.s_minus.entries

    def commutator(self):
        """[S-, S+], equal to 2 S0 except in the last diagonal entry."""
        return self.s_minus.entries @ self.s_plus.entries - self.s_plus.entries @ self.s_minus.entries




################################################################################
#-------------------------------------------------------------------------------
# Radial wave functions
#-------------------------------------------------------------------------------
################################################################################

def laguerre(n_max, alpha, x):
    """Generalized Laguerre polynomials L_0..L_{n_max} by upward recurrence.

    Parameters
    ----------
    n_max : int
        Highest degree.
    alpha : float
        Laguerre parameter.
    x : float or ndarray
        Argument(s).

    Returns
    -------
    ndarray of shape (n_max+1,) + shape(x)
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + alpha - x
    for n in range(1, n_max):
        out[n + 1] = ((2*n + 1 + alpha - x)*out[n] - (n + alpha)*out[n - 1])/(n + 1)
    return out



def log_norm(lam, nu):
    """log sqrt(2 nu!/Gamma(lam+nu)), the normalization of R^lam_nu."""
    nu = np.asarray(nu, dtype=float)
    return 0.5*(np.log(2.0) + gammaln(nu + 1) - gammaln(lam + nu))



def eval_radial_wavefunction(basis, nu, r):
    """Evaluate sqrt(a) R^lam_nu(a r).

    Parameters
    ----------
    basis : RadialBasis
        Supplies lambda and the scale a.
    nu : int
        Radial quantum number, 0 <= nu <= basis.nu_max.
    r : float or ndarray
        Radius (or radii), >= 0.

    Returns
    -------
    float or ndarray
        Wave function value(s), normalized on L^2(R+, dr).
    """
    if int(nu) != nu or nu < 0:
        raise DomainError("nu must be a non-negative integer, got {}".format(nu))
    if nu > basis.nu_max:
        raise DomainError("nu={} exceeds nu_max={}".format(nu, basis.nu_max))
    nu = int(nu)

    x = basis.scale*np.asarray(r, dtype=float)
    if np.any(x < 0):
        raise DomainError("r must be >= 0")

    lam = basis.lam
    lag = laguerre(nu, lam - 1.0, x**2)[nu]

    # x^(lam-1/2) exp(-x^2/2) in log form; x = 0 handled separately
    logx = np.log(np.where(x > 0, x, 1.0))
    envelope = np.exp(log_norm(lam, nu) + 0.5*np.log(basis.scale) + (lam - 0.5)*logx - 0.5*x**2)
    value = (-1.0)**nu*envelope*lag

    if lam < 0.5:
        value = np.where(x > 0, value, np.inf)
    elif lam > 0.5:
        value = np.where(x > 0, value, 0.0)

    if value.ndim == 0:
        return float(value)
    return value




################################################################################
#-------------------------------------------------------------------------------
# Helpers
#-------------------------------------------------------------------------------
################################################################################

def rescale(op, scale):
    """Convert an operator matrix to bases of a different scale.

    An operator of length degree k has entries proportional to a^(-k), so the
    entries are multiplied by (a_old/a_new)^k.

    Parameters
    ----------
    op : OperatorMatrix
        Matrix to convert; its degree must be defined.
    scale : float
        New scale a, > 0.

    Returns
    -------
    OperatorMatrix
    """
    if not scale > 0:
        raise DomainError("scale must be > 0, got {}".format(scale))
    if op.degree is None:
        raise ValueError("{} mixes length degrees and cannot be rescaled".format(op.name))
    if op.source.scale != op.target.scale:
        raise ValueError("{} connects bases of different scale".format(op.name))
    factor = (op.source.scale/scale)**op.degree
    return replace(op,
                   source=op.source.rescaled(scale),
                   target=op.target.rescaled(scale),
                   entries=factor*op.entries)



def _unit_scale(entries, source, target, degree, exact, name):
    """Wrap entries computed at a = 1 and convert them to the basis scale."""
    op = OperatorMatrix(source=source.rescaled(1.0),
                        target=target.rescaled(1.0),
                        entries=entries,
                        exact_within_truncation=exact,
                        degree=degree,
                        name=name)
    if source.scale == 1.0:
        return op
    return rescale(op, source.scale)



def _require(basis, lam_min, what):
    if basis.lam <= lam_min:
        raise DomainError("{} requires lambda > {}, got lambda={}".format(what, lam_min, basis.lam))



def _check_direction(direction):
    if direction not in DIRECTIONS:
        raise ValueError("direction must be 'raise' or 'lower', got {!r}".format(direction))



def _ladder(basis):
    """S+ + S- at unit scale (symmetric, tridiagonal)."""
    nu = basis.nu
    m = np.zeros((basis.dim, basis.dim))
    off = np.sqrt((basis.lam + nu[:-1])*(nu[:-1] + 1))
    m[nu[1:], nu[:-1]] = off
    m[nu[:-1], nu[1:]] = off
    return m



def identity(basis):
    return OperatorMatrix(source=basis, target=basis, entries=np.eye(basis.dim),
                          exact_within_truncation=True, degree=0, name='1')




################################################################################
#-------------------------------------------------------------------------------
# Same-lambda elements
#-------------------------------------------------------------------------------
################################################################################

def su11_generators(basis):
    """S+, S- and S0 in the basis; dimensionless, so independent of scale."""
    nu = basis.nu
    s_plus = np.zeros((basis.dim, basis.dim))
    s_plus[nu[1:], nu[:-1]] = np.sqrt((basis.lam + nu[:-1])*(nu[:-1] + 1))
    s_zero = np.diag(0.5*(basis.lam + 2*nu))

    kw = dict(source=basis, target=basis, exact_within_truncation=True, degree=0)
    return SU11Generators(s_plus=OperatorMatrix(entries=s_plus, name='S+', **kw),
                          s_minus=OperatorMatrix(entries=s_plus.T, name='S-', **kw),
                          s_zero=OperatorMatrix(entries=s_zero, name='S0', **kw))



def me_r2(basis):
    """Matrix of r^2 = S+ + S- + 2 S0: tridiagonal, exact within truncation."""
    m = _ladder(basis) + np.diag(basis.lam + 2.0*basis.nu)
    return _unit_scale(m, basis, basis, degree=2, exact=True, name='r2')



def inv_r2_coefficients(lam, nu_max):
    """The symmetric matrix f^lam_{mu nu} of 1/r^2 at unit scale.

    For mu <= nu,
    f_{mu nu} = (-1)^(nu-mu)/(lam-1) sqrt(nu! Gamma(lam+mu)/(mu! Gamma(lam+nu))).
    """
    nu = np.arange(nu_max + 1)
    lo = np.minimum.outer(nu, nu)
    hi = np.maximum.outer(nu, nu)
    logf = 0.5*(gammaln(hi + 1) + gammaln(lam + lo) - gammaln(lo + 1) - gammaln(lam + hi))
    return (-1.0)**(hi - lo)*np.exp(logf)/(lam - 1.0)



def me_inv_r2(basis):
    """Matrix of 1/r^2 (full, symmetric). Requires lambda > 1."""
    _require(basis, 1.0, "1/r^2")
    f = inv_r2_coefficients(basis.lam, basis.nu_max)
    return _unit_scale(f, basis, basis, degree=-2, exact=False, name='inv_r2')



def me_d2dr2(basis):
    """Matrix of d^2/dr^2 = S+ + S- - 2 S0 + (lam-3/2)(lam-1/2)/r^2.

    The 1/r^2 part drops out for lambda = 1/2 and 3/2, where the matrix is
    tridiagonal and no lambda > 1 restriction applies.
    """
    lam = basis.lam
    m = _ladder(basis) - np.diag(lam + 2.0*basis.nu)
    c = (lam - 1.5)*(lam - 0.5)
    exact = abs(c) < 1e-14
    if not exact:
        _require(basis, 1.0, "d2/dr2")
        m = m + c*inv_r2_coefficients(lam, basis.nu_max)
    return _unit_scale(m, basis, basis, degree=-2, exact=exact, name='d2dr2')



def laplacian_correction(lam, N, v):
    """(lam-1)^2 - (v+N/2-1)^2, the coefficient of 1/r^2 in the radial Laplacian."""
    return (lam - 1.0)**2 - (v + 0.5*N - 1.0)**2



def me_laplacian_radial(basis, N, v):
    """Radial part of the N-dimensional Laplacian for SO(N) label v.

    Parameters
    ----------
    basis : RadialBasis
        Radial basis; lambda > 1 is needed unless lambda = v + N/2.
    N : int
        Space dimension.
    v : int
        SO(N) angular momentum (seniority).

    Returns
    -------
    OperatorMatrix
        Tridiagonal and exact within truncation in the harmonic case
        lambda = v + N/2.
    """
    if v < 0 or int(v) != v:
        raise DomainError("v must be a non-negative integer, got {}".format(v))
    lam = basis.lam
    m = _ladder(basis) - np.diag(lam + 2.0*basis.nu)
    c = laplacian_correction(lam, N, v)
    exact = abs(c) < 1e-12
    if not exact:
        _require(basis, 1.0, "the Laplacian with lambda != v+N/2")
        m = m + c*inv_r2_coefficients(lam, basis.nu_max)
    return _unit_scale(m, basis, basis, degree=-2, exact=exact, name='laplacian')




################################################################################
#-------------------------------------------------------------------------------
# lambda -> lambda +/- 1 elements
#-------------------------------------------------------------------------------
################################################################################

def me_r(basis, direction):
    """Matrix of r from lambda to lambda+1 (raise) or lambda-1 (lower).

    lower: <lam-1, nu|r|lam, nu> = sqrt(lam+nu-1), <lam-1, nu+1|r|lam, nu> = sqrt(nu+1)
    raise: <lam+1, nu|r|lam, nu> = sqrt(lam+nu),   <lam+1, nu-1|r|lam, nu> = sqrt(nu)
    """
    _check_direction(direction)
    lam = basis.lam
    nu = basis.nu
    m = np.zeros((basis.dim, basis.dim))
    if direction == LOWER:
        _require(basis, 1.0, "lowering r")
        target = basis.shifted(-1)
        m[nu, nu] = np.sqrt(lam + nu - 1)
        m[nu[1:], nu[:-1]] = np.sqrt(nu[:-1] + 1)
    else:
        target = basis.shifted(+1)
        m[nu, nu] = np.sqrt(lam + nu)
        m[nu[:-1], nu[1:]] = np.sqrt(nu[1:])
    return _unit_scale(m, basis, target, degree=1, exact=True, name='r')



def _inv_r_lower(lam, nu_max):
    """<lam-1, mu|1/r|lam, nu> for mu <= nu at unit scale, zero above."""
    nu = np.arange(nu_max + 1)
    mu = nu[:, None]
    nv = nu[None, :]
    with np.errstate(invalid='ignore'):
        logm = 0.5*(gammaln(nv + 1) + gammaln(lam + mu - 1) - gammaln(mu + 1) - gammaln(lam + nv))
    m = np.where(mu <= nv, (-1.0)**np.abs(mu - nv)*np.exp(np.where(mu <= nv, logm, 0.0)), 0.0)
    return m



def _inv_r_raise(lam, nu_max):
    """<lam+1, mu|1/r|lam, nu> for mu >= nu at unit scale, zero below."""
    nu = np.arange(nu_max + 1)
    mu = nu[:, None]
    nv = nu[None, :]
    logm = 0.5*(gammaln(mu + 1) + gammaln(lam + nv) - gammaln(nv + 1) - gammaln(lam + mu + 1))
    m = np.where(mu >= nv, (-1.0)**np.abs(mu - nv)*np.exp(np.where(mu >= nv, logm, 0.0)), 0.0)
    return m



def me_inv_r(basis, direction):
    """Matrix of 1/r from lambda to lambda +/- 1.

    Lowering is a finite expansion (upper triangular); raising is an infinite
    one (lower triangular). Both require lambda > 1.
    """
    _check_direction(direction)
    _require(basis, 1.0, "1/r")
    if direction == LOWER:
        m = _inv_r_lower(basis.lam, basis.nu_max)
        target = basis.shifted(-1)
    else:
        m = _inv_r_raise(basis.lam, basis.nu_max)
        target = basis.shifted(+1)
    return _unit_scale(m, basis, target, degree=-1, exact=False, name='inv_r')



def me_ddr(basis, direction):
    """Matrix of d/dr from lambda to lambda +/- 1.

    lower:
        d/dr R^lam_nu = -sqrt(nu+1) R^{lam-1}_{nu+1} + (nu+1/2)/sqrt(lam+nu-1) R^{lam-1}_nu
                        - (lam-3/2) sum_{mu<nu} <lam-1, mu|1/r|lam, nu> R^{lam-1}_mu
    raise:
        d/dr R^lam_nu = sqrt(nu) R^{lam+1}_{nu-1} - (nu+1/2)/sqrt(lam+nu) R^{lam+1}_nu
                        + (lam-1/2) sum_{mu>nu} <lam+1, mu|1/r|lam, nu> R^{lam+1}_mu

    Lowering requires lambda > 1.
    """
    _check_direction(direction)
    lam = basis.lam
    nu = basis.nu
    if direction == LOWER:
        _require(basis, 1.0, "lowering d/dr")
        target = basis.shifted(-1)
        m = -(lam - 1.5)*np.triu(_inv_r_lower(lam, basis.nu_max), k=1)
        m[nu, nu] = (nu + 0.5)/np.sqrt(lam + nu - 1)
        m[nu[1:], nu[:-1]] = -np.sqrt(nu[:-1] + 1)
    else:
        target = basis.shifted(+1)
        m = (lam - 0.5)*np.tril(_inv_r_raise(lam, basis.nu_max), k=-1)
        m[nu, nu] = -(nu + 0.5)/np.sqrt(lam + nu)
        m[nu[:-1], nu[1:]] = np.sqrt(nu[1:])
    return _unit_scale(m, basis, target, degree=-1, exact=False, name='ddr')



def me_factorization(basis, X, direction, dagger=False):
    """Matrix of A(X) = d/dr + X/r + r, or A^dagger(X) = -d/dr + X/r + r.

    Assembled from :func:`me_ddr`, :func:`me_inv_r` and :func:`me_r` between
    lambda and lambda +/- 1.

    Parameters
    ----------
    basis : RadialBasis
        Source basis.
    X : float
        Real argument of the factorization operator.
    direction : str
        'raise' or 'lower'.
    dagger : bool
        Build A^dagger(X) instead of A(X).

    Returns
    -------
    OperatorMatrix
    """
    sign = -1.0 if dagger else 1.0
    op = sign*me_ddr(basis, direction) + me_r(basis, direction)
    if X != 0:
        op = op + X*me_inv_r(basis, direction)
    return replace(op, name='{}({:g})'.format('Adag' if dagger else 'A', X))
