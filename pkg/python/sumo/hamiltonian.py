"""Declarative Hamiltonians and their matrices in SU(1,1) x SO(N) bases.

A Hamiltonian is a sum of terms ``coefficient * radial factors @ orbital``.
Radial factors are the primitives of :mod:`sumo.radial`; the orbital part is
the identity (``scalar``), the N = 3 crystal field 3cos^2(theta) - 1, or the
N = 5 triple product (Q x Q x Q)_0.

Matrices are assembled per block of conserved quantum numbers: v for central
forces, (m, parity) for the N = 3 crystal field and L for the N = 5 triple
product.
"""

import re

import numpy as np

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from sumo import radial
from sumo import orbital
from sumo import config as sumo_config
from sumo.constants import SYMMETRY_RTOL
from sumo.errors import ConfigError, DomainError, PairingError
from sumo.radial import LOWER, RAISE, RadialBasis


SCALAR = 'scalar'
CRYSTAL_FIELD = 'crystal_field'
TRIPLE_Q = 'triple_q'

ORBITALS = (SCALAR, CRYSTAL_FIELD, TRIPLE_Q)

# name -> (length degree, changes lambda)
PRIMITIVES = {
    'r':         (1,  True),
    'inv_r':     (-1, True),
    'ddr':       (-1, True),
    'r2':        (2,  False),
    'inv_r2':    (-2, False),
    'd2dr2':     (-2, False),
    'laplacian': (-2, False),
}

ORBITAL_PARITY = {SCALAR: 0, CRYSTAL_FIELD: 0, TRIPLE_Q: 1}

HARMONIC = 'harmonic'
PAIR = 'pair'
PER_V = 'per_v'
FIXED = 'fixed'

BASIS_KINDS = (HARMONIC, PAIR, PER_V, FIXED)




################################################################################
#-------------------------------------------------------------------------------
# Terms and Hamiltonians
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class Term:
    """``coefficient * radial[0] * radial[1] * ... @ orbital``.

    The rightmost radial factor acts first.
    """
    coefficient: float
    radial: Tuple[str, ...] = ()
    orbital: str = SCALAR

    def __post_init__(self):
        for f in self.radial:
            if f not in PRIMITIVES:
                raise ConfigError("unknown radial factor {!r}".format(f))
        if self.orbital not in ORBITALS:
            raise ConfigError("unknown orbital factor {!r}".format(self.orbital))
        object.__setattr__(self, 'coefficient', float(self.coefficient))
        object.__setattr__(self, 'radial', tuple(self.radial))

    @property
    def degree(self):
        return sum(PRIMITIVES[f][0] for f in self.radial)

    @property
    def odd_factors(self):
        return sum(1 for f in self.radial if PRIMITIVES[f][1])

    @property
    def parity(self):
        """0 for O(N)-parity-even terms, 1 for odd."""
        return (self.odd_factors + ORBITAL_PARITY[self.orbital]) % 2

    def __str__(self):
        factors = ' * '.join((repr(self.coefficient),) + self.radial)
        return factors if self.orbital == SCALAR else '{} @ {}'.format(factors, self.orbital)



_FACTOR = re.compile(r'^(?:r\^?(?P<power>-?\d+)|(?P<word>r|1/r|1/r\^?2|d/dr|d2/dr2|nabla2|laplacian|1))$')

_WORDS = {'r': ('r',), '1/r': ('inv_r',), '1/r^2': ('inv_r2',), '1/r2': ('inv_r2',),
          'd/dr': ('ddr',), 'd2/dr2': ('d2dr2',), 'nabla2': ('laplacian',),
          'laplacian': ('laplacian',), '1': ()}



def _power(k):
    """Primitive factors for r^k."""
    if k >= 0:
        return ('r2',)*(k//2) + ('r',)*(k % 2)
    k = -k
    return ('inv_r2',)*(k//2) + ('inv_r',)*(k % 2)



def parse_term(text):
    """Parse ``<coefficient> [* <factor>]... [@ <orbital>]``.

    Examples
    --------
    ``-0.5 * nabla2``, ``0.5 * r^2``, ``0.01 * r^2 @ crystal_field``,
    ``2.0 * r^3 @ triple_q``.
    """
    body, _, orb = text.partition('@')
    orb = orb.strip() or SCALAR
    tokens = [t.strip() for t in body.split('*')]
    if not tokens or not tokens[0]:
        raise ConfigError("empty term {!r}".format(text))
    try:
        coefficient = float(tokens[0])
    except ValueError:
        raise ConfigError("term {!r} must start with a numeric coefficient".format(text)) from None

    factors = ()
    for tok in tokens[1:]:
        tok = tok.replace(' ', '')
        match = _FACTOR.match(tok)
        if match is None:
            raise ConfigError("unknown factor {!r} in term {!r}".format(tok, text))
        if match.group('power') is not None:
            factors += _power(int(match.group('power')))
        else:
            factors += _WORDS[match.group('word')]
    return Term(coefficient=coefficient, radial=factors, orbital=orb)



@dataclass(frozen=True)
class HamiltonianSpec:
    """A Hamiltonian on R^N as a list of terms.

    Attributes
    ----------
    N : int
        Space dimension.
    mass : float
        Mass parameter M, kept for reporting; the term coefficients already
        include it.
    terms : tuple of Term
    cg_table : CGTable, optional
        Needed by ``triple_q`` terms.
    name : str
    """
    N: int
    mass: float = 1.0
    terms: Tuple[Term, ...] = ()
    cg_table: Optional[orbital.CGTable] = None
    name: str = ''

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("dimension must be >= 2, got {}".format(self.N))
        if not self.mass > 0:
            raise DomainError("mass must be > 0, got {}".format(self.mass))
        object.__setattr__(self, 'terms', tuple(self.terms))
        for term in self.terms:
            if term.parity:
                raise ConfigError("term '{}' is odd under O({})-parity".format(term, self.N))
            if term.orbital == CRYSTAL_FIELD and self.N != 3:
                raise ConfigError("crystal_field terms need N = 3, got N = {}".format(self.N))
            if term.orbital == TRIPLE_Q:
                if self.N != 5:
                    raise ConfigError("triple_q terms need N = 5, got N = {}".format(self.N))
                if self.cg_table is None:
                    raise ConfigError("triple_q terms need a CG table")

    @property
    def is_central(self):
        return all(t.orbital == SCALAR for t in self.terms)

    def with_terms(self, *terms, name=None):
        return replace(self, terms=self.terms + tuple(terms), name=self.name if name is None else name)




################################################################################
#-------------------------------------------------------------------------------
# Model Hamiltonians
#-------------------------------------------------------------------------------
################################################################################

def harmonic_oscillator(N):
    """H = (-nabla^2 + r^2)/2."""
    return HamiltonianSpec(N=N, terms=(Term(-0.5, ('laplacian',)), Term(0.5, ('r2',))),
                           name='harmonic')



def davidson(N, r0_4):
    """H = (-nabla^2 + r^2 + r0^4/r^2)/2, minimum of the potential at r0."""
    if r0_4 < 0:
        raise DomainError("r0^4 must be >= 0, got {}".format(r0_4))
    terms = (Term(-0.5, ('laplacian',)), Term(0.5, ('r2',)))
    if r0_4 > 0:
        terms += (Term(0.5*r0_4, ('inv_r2',)),)
    return HamiltonianSpec(N=N, terms=terms, name='davidson')



def quartic_oscillator(N):
    """H = -nabla^2/2 + r^4."""
    return HamiltonianSpec(N=N, terms=(Term(-0.5, ('laplacian',)), Term(1.0, ('r2', 'r2'))),
                           name='quartic')



def collective_model(alpha, M, N=5):
    """H(alpha) = -nabla^2/(2M) + (M/2)[(1 - 2 alpha) r^2 + alpha r^4].

    Spherical vibrator for alpha < 1/2, deformed rotor beyond.
    """
    terms = [Term(-0.5/M, ('laplacian',))]
    if 1.0 - 2.0*alpha != 0.0:
        terms.append(Term(0.5*M*(1.0 - 2.0*alpha), ('r2',)))
    if alpha != 0.0:
        terms.append(Term(0.5*M*alpha, ('r2', 'r2')))
    return HamiltonianSpec(N=N, mass=M, terms=tuple(terms), name='collective')



def add_crystal_field(spec, chi, r0_squared=None):
    """Add chi r^2 (3cos^2 theta - 1), or the aligned chi r0^2 (3cos^2 theta - 1)."""
    if r0_squared is None:
        term = Term(chi, ('r2',), CRYSTAL_FIELD)
    else:
        term = Term(chi*r0_squared, (), CRYSTAL_FIELD)
    return spec.with_terms(term, name=spec.name + '+crystal_field')



def add_triple_q(spec, kappa, table):
    """Add kappa r^3 (Q x Q x Q)_0 using SO(5) > SO(3) coefficients from ``table``."""
    return replace(spec, cg_table=table).with_terms(Term(kappa, ('r2', 'r'), TRIPLE_Q),
                                                     name=spec.name + '+triple_q')



def potential_minimum(alpha):
    """Radius of the minimum of (1 - 2 alpha) r^2 + alpha r^4, in oscillator units."""
    if alpha <= 0.5:
        return 0.0
    return float(np.sqrt((2*alpha - 1)/(2*alpha)))



def potential_depth(alpha, M):
    """Value of (M/2)[(1 - 2 alpha) r^2 + alpha r^4] at its minimum; 0 for alpha <= 1/2."""
    r2 = potential_minimum(alpha)**2
    return float(0.5*M*((1 - 2*alpha)*r2 + alpha*r2**2))



def deformation_estimate(lam, scale, N, v=0):
    """[(lam-1)^2 - (v+N/2-1)^2]^(1/4)/a, the r0 of the Davidson potential matched by lam.

    Zero when lam lies below the harmonic value v + N/2.
    """
    c = radial.laplacian_correction(lam, N, v)
    if c <= 0:
        return 0.0
    return float(c**0.25/scale)



def rescale(obj, scale):
    """Dilate a Hamiltonian (r -> a r) or convert an operator matrix to scale a.

    For a spec every coefficient is multiplied by a^degree, so
    (-nabla^2 + r^2)/2 becomes -nabla^2/(2a^2) + a^2 r^2/2.
    """
    if not scale > 0:
        raise DomainError("scale must be > 0, got {}".format(scale))
    if isinstance(obj, radial.OperatorMatrix):
        return radial.rescale(obj, scale)
    if isinstance(obj, HamiltonianSpec):
        terms = tuple(replace(t, coefficient=t.coefficient*scale**t.degree) for t in obj.terms)
        return replace(obj, terms=terms)
    raise TypeError("cannot rescale {}".format(type(obj).__name__))




################################################################################
#-------------------------------------------------------------------------------
# Basis assignment
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class BasisSpec:
    """Assignment of SU(1,1) labels lambda_v and scales a_v to each SO(N) irrep v.

    Parameters
    ----------
    N : int
        Space dimension.
    kind : str
        'harmonic' (lambda_v = v + N/2), 'pair' (lambda_even, lambda_odd),
        'per_v' (explicit list, extended by alternation) or 'fixed' (one
        lambda for every v).
    nu_max, v_max : int
        Radial and orbital truncation.
    scale : float or tuple of float
        Global a, or one a_v per v (central forces only).
    """
    N: int
    kind: str = HARMONIC
    nu_max: int = 20
    v_max: int = 0
    scale: object = 1.0
    lam: Optional[float] = None
    lam_even: Optional[float] = None
    lam_odd: Optional[float] = None
    lambdas: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ConfigError("basis kind must be one of {}, got {!r}".format(BASIS_KINDS, self.kind))
        if self.nu_max < 0 or self.v_max < 0:
            raise DomainError("nu_max and v_max must be >= 0")
        if self.kind == FIXED and self.lam is None:
            raise ConfigError("a fixed basis needs lambda")
        if self.kind == PAIR:
            if self.lam_even is None or self.lam_odd is None:
                raise ConfigError("a pair basis needs lambda_even and lambda_odd")
            if not np.isclose(abs(self.lam_odd - self.lam_even), 1.0):
                raise PairingError("lambda_odd - lambda_even must be +/- 1, got {} and {}".format(
                    self.lam_odd, self.lam_even))
        if self.kind == PER_V:
            if not self.lambdas:
                raise ConfigError("a per_v basis needs a list of lambdas")
            object.__setattr__(self, 'lambdas', tuple(float(x) for x in self.lambdas))
            steps = np.abs(np.diff(self.lambdas))
            if np.any(~np.isclose(steps, 1.0)):
                raise PairingError("per_v lambdas must step by +/- 1, got {}".format(self.lambdas))
        if isinstance(self.scale, (list, tuple, np.ndarray)):
            object.__setattr__(self, 'scale', tuple(float(a) for a in self.scale))
            if any(a <= 0 for a in self.scale):
                raise DomainError("scales must be > 0")
        elif not self.scale > 0:
            raise DomainError("scale must be > 0, got {}".format(self.scale))

    @property
    def global_scale(self):
        return not isinstance(self.scale, tuple)

    def lam_of(self, v):
        """lambda_v for SO(N) label v."""
        if self.kind == HARMONIC:
            return v + 0.5*self.N
        if self.kind == FIXED:
            return float(self.lam)
        if self.kind == PAIR:
            return float(self.lam_odd if v % 2 else self.lam_even)
        n = len(self.lambdas)
        if v < n:
            return self.lambdas[v]
        if n == 1:
            return self.lambdas[0] + (v % 2)
        return self.lambdas[n - 2 + (v - n) % 2]

    def scale_for(self, v):
        if self.global_scale:
            return float(self.scale)
        return self.scale[min(v, len(self.scale) - 1)]

    def radial_basis(self, v, nu_max=None):
        return RadialBasis(lam=self.lam_of(v), scale=self.scale_for(v),
                           nu_max=self.nu_max if nu_max is None else nu_max)

    def resized(self, nu_max):
        return replace(self, nu_max=nu_max)




################################################################################
#-------------------------------------------------------------------------------
# Configuration files
#-------------------------------------------------------------------------------
################################################################################

def read_spec(path_or_config):
    """Build a HamiltonianSpec from the [Hamiltonian] and [Terms] sections.

    ``model`` selects a built-in Hamiltonian (harmonic, davidson, quartic,
    collective) or ``terms`` for an explicit [Terms] list. A ``chi`` key adds
    the crystal field and a ``kappa`` key the triple product.
    """
    cfg = path_or_config if not isinstance(path_or_config, str) else sumo_config.load(path_or_config)
    if not cfg.has_section('Hamiltonian'):
        raise ConfigError("missing [Hamiltonian] section")

    get = lambda key, cast=str, default=None: sumo_config.get(cfg, 'Hamiltonian', key, cast, default)

    N = get('dimension', int)
    if N is None:
        raise ConfigError("[Hamiltonian] dimension is required")
    mass = get('mass', float, 1.0)
    model = get('model', str, 'terms').strip().lower()

    if model == 'harmonic':
        spec = harmonic_oscillator(N)
    elif model == 'davidson':
        spec = davidson(N, get('r0_4', float, 0.0))
    elif model == 'quartic':
        spec = quartic_oscillator(N)
    elif model == 'collective':
        alpha = get('alpha', float)
        if alpha is None:
            raise ConfigError("[Hamiltonian] alpha is required for the collective model")
        spec = collective_model(alpha, mass, N)
    elif model == 'terms':
        if not cfg.has_section('Terms') or not len(cfg['Terms']):
            raise ConfigError("model = terms needs a non-empty [Terms] section")
        spec = HamiltonianSpec(N=N, mass=mass, name='terms')
    else:
        raise ConfigError("unknown model {!r}".format(model))

    extra = []
    if cfg.has_section('Terms'):
        extra = [parse_term(cfg['Terms'][key]) for key in cfg['Terms']]

    table = None
    table_path = get('cg_table')
    if table_path is not None:
        table = orbital.CGTable.from_file(sumo_config.resolve_path(cfg, table_path))

    spec = replace(spec, cg_table=table).with_terms(*extra)

    chi = get('chi', float)
    if chi is not None:
        spec = add_crystal_field(spec, chi, get('r0_squared', float))
    kappa = get('kappa', float)
    if kappa is not None:
        if table is None:
            raise ConfigError("kappa needs [Hamiltonian] cg_table")
        spec = add_triple_q(spec, kappa, table)
    return spec



def read_basis(path_or_config, N, **overrides):
    """BasisSpec from the [Basis] section; keyword overrides win over the file."""
    cfg = path_or_config if not isinstance(path_or_config, str) else sumo_config.load(path_or_config)
    get = lambda key, cast=str, default=None: sumo_config.get(cfg, 'Basis', key, cast, default)

    scale = get('scale', sumo_config.float_list, (1.0,))
    kw = dict(N=N,
              kind=get('kind', str, HARMONIC).strip().lower(),
              nu_max=get('nu_max', int, 20),
              v_max=get('v_max', int, 0),
              scale=scale[0] if len(scale) == 1 else scale,
              lam=get('lambda', float),
              lam_even=get('lambda_even', float),
              lam_odd=get('lambda_odd', float),
              lambdas=get('lambdas', sumo_config.float_list, ()))
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return BasisSpec(**kw)




################################################################################
#-------------------------------------------------------------------------------
# Radial factors
#-------------------------------------------------------------------------------
################################################################################

def _primitive(name, basis, direction, N, v):
    if name == 'r2':
        return radial.me_r2(basis)
    if name == 'inv_r2':
        return radial.me_inv_r2(basis)
    if name == 'd2dr2':
        return radial.me_d2dr2(basis)
    if name == 'laplacian':
        return radial.me_laplacian_radial(basis, N, v)
    if name == 'r':
        return radial.me_r(basis, direction)
    if name == 'inv_r':
        return radial.me_inv_r(basis, direction)
    return radial.me_ddr(basis, direction)



def radial_factor_matrix(factors, lam_in, lam_out, scale, nu_max, N, v):
    """Matrix of a product of radial primitives from lam_in to lam_out.

    Factors act right to left. Each lambda-changing factor moves one step
    toward lam_out; r^2 factors are split into r * r when the others cannot
    cover the distance. Products are formed at nu_max + len(factors) and
    cropped.

    Parameters
    ----------
    factors : sequence of str
        Primitive names (see ``PRIMITIVES``).
    lam_in, lam_out : float
        SU(1,1) labels of the ket and bra bases.
    scale : float
        Common scale a.
    nu_max : int
        Truncation of the result.
    N, v : int
        Dimension and SO(N) label, needed by the Laplacian.

    Returns
    -------
    OperatorMatrix
    """
    factors = list(factors)
    delta = lam_out - lam_in
    steps = int(round(delta))
    if abs(steps - delta) > 1e-9:
        raise PairingError("lambda {} and {} are not an integer apart".format(lam_in, lam_out))

    n_odd = sum(1 for f in factors if PRIMITIVES[f][1])
    while n_odd < abs(steps) and 'r2' in factors:
        k = factors.index('r2')
        factors[k:k + 1] = ['r', 'r']
        n_odd += 2
    if n_odd < abs(steps) or (n_odd - steps) % 2:
        raise PairingError("factors {} cannot connect lambda={} to lambda={}".format(
            tuple(factors), lam_in, lam_out))

    work = nu_max + len(factors)
    current = RadialBasis(lam=lam_in, scale=scale, nu_max=work)
    product = radial.identity(current)
    remaining = steps
    for name in reversed(factors):
        direction = None
        if PRIMITIVES[name][1]:
            direction = LOWER if remaining < 0 else RAISE
            remaining -= 1 if direction == RAISE else -1
        op = _primitive(name, current, direction, N, v)
        product = op @ product
        current = op.target

    entries = product.entries[:nu_max + 1, :nu_max + 1]
    return radial.OperatorMatrix(source=RadialBasis(lam_in, scale, nu_max),
                                 target=RadialBasis(lam_out, scale, nu_max),
                                 entries=entries,
                                 degree=product.degree,
                                 name='*'.join(factors) or '1')



def _term_radial(term, lam_in, lam_out, scale, nu_max, N, v):
    if not term.radial:
        if not np.isclose(lam_in, lam_out):
            # the identity between different irreps is a (non-diagonal) overlap
            return radial_overlap(lam_in, lam_out, scale, nu_max)
        return np.eye(nu_max + 1)
    return radial_factor_matrix(term.radial, lam_in, lam_out, scale, nu_max, N, v).entries



def radial_overlap(lam_in, lam_out, scale, nu_max):
    """<lam_out, mu | lam_in, nu> for lambdas an even integer apart, via r * 1/r."""
    steps = int(round(lam_out - lam_in))
    if steps % 2:
        raise PairingError("overlap between lambda={} and {} is odd".format(lam_in, lam_out))
    factors = ['r', 'inv_r']*max(abs(steps)//2, 1)
    return radial_factor_matrix(factors, lam_in, lam_out, scale, nu_max, 0, 0).entries




################################################################################
#-------------------------------------------------------------------------------
# Assembly
#-------------------------------------------------------------------------------
################################################################################

@dataclass
class AssembledMatrix:
    """Symmetric blocks of a Hamiltonian, with the state labels of each row.

    Attributes
    ----------
    blocks : dict
        Block label -> dense symmetric ndarray.
    states : dict
        Block label -> list of state labels, one per row.
    index_names : tuple of str
        Names of the fields in each state label.
    block_name : str
        Name of the block label.
    """
    blocks: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    index_names: tuple = ('nu', 'v')
    block_name: str = 'v'

    def __iter__(self):
        return iter(sorted(self.blocks))

    def max_asymmetry(self):
        worst = 0.0
        for H in self.blocks.values():
            norm = max(np.max(np.abs(H)), 1e-300)
            worst = max(worst, float(np.max(np.abs(H - H.T))/norm))
        return worst



def _check_block_bases(spec, basis):
    if not spec.is_central and not basis.global_scale:
        raise PairingError("coupled terms need a single global scale")



def _symmetrized(H, label, rtol=SYMMETRY_RTOL):
    """0.5 (H + H^T), after checking H is symmetric to ``rtol`` of its largest entry."""
    norm = max(np.max(np.abs(H)), 1e-300) if H.size else 1.0
    asym = float(np.max(np.abs(H - H.T)))/norm if H.size else 0.0
    if asym > rtol:
        raise ValueError("block {} is not symmetric: relative asymmetry {:.3g} > {:.1g}".format(
            label, asym, rtol))
    return 0.5*(H + H.T)



def build_central_force_block(spec, basis, v):
    """(nu_max+1)^2 matrix of a central-force Hamiltonian in the irrep v.

    Parameters
    ----------
    spec : HamiltonianSpec
        All terms must be scalar.
    basis : BasisSpec
    v : int

    Returns
    -------
    ndarray
        Symmetric block.
    """
    if not spec.is_central:
        raise ValueError("spec {} has orbital terms; use build_coupled_matrix".format(spec.name))
    lam = basis.lam_of(v)
    a = basis.scale_for(v)
    H = np.zeros((basis.nu_max + 1, basis.nu_max + 1))
    for term in spec.terms:
        H += term.coefficient*_term_radial(term, lam, lam, a, basis.nu_max, spec.N, v)
    return _symmetrized(H, 'v={}'.format(v))



def central_force_matrix(spec, basis, v_values=None):
    v_values = range(basis.v_max + 1) if v_values is None else v_values
    out = AssembledMatrix(index_names=('nu', 'v'), block_name='v')
    for v in v_values:
        out.blocks[v] = build_central_force_block(spec, basis, v)
        out.states[v] = [(nu, v) for nu in range(basis.nu_max + 1)]
    return out



def _crystal_field_matrix(spec, basis, m_values):
    """N = 3 blocks labelled (m, parity) over states (l, nu)."""
    n = basis.nu_max + 1
    a = basis.scale_for(0)
    out = AssembledMatrix(index_names=('nu', 'l', 'm'), block_name='m,parity')
    if m_values is None:
        m_values = range(basis.v_max + 1)

    cache = {}

    def rad(term, l2, l1):
        key = (term, l2, l1)
        if key not in cache:
            cache[key] = _term_radial(term, basis.lam_of(l1), basis.lam_of(l2), a,
                                      basis.nu_max, 3, l1)
        return cache[key]

    for m in m_values:
        for parity in (0, 1):
            ls = [l for l in range(abs(m), basis.v_max + 1) if l % 2 == parity]
            if not ls:
                continue
            H = np.zeros((n*len(ls), n*len(ls)))
            for j, l1 in enumerate(ls):
                for i, l2 in enumerate(ls[:j + 1]):
                    sub = np.zeros((n, n))
                    for term in spec.terms:
                        if term.orbital == SCALAR:
                            if l2 == l1:
                                sub += term.coefficient*rad(term, l2, l1)
                        else:
                            ang = orbital.me_crystal_field(l2, l1, m)
                            if ang != 0.0:
                                sub += term.coefficient*ang*rad(term, l2, l1)
                    H[i*n:(i + 1)*n, j*n:(j + 1)*n] = sub
                    H[j*n:(j + 1)*n, i*n:(i + 1)*n] = sub.T
            label = (m, 1 if parity == 0 else -1)
            out.blocks[label] = _symmetrized(H, label)
            out.states[label] = [(nu, l, m) for l in ls for nu in range(n)]
    return out



def _triple_q_matrix(spec, basis, L_values):
    """N = 5 blocks labelled L over states (v, alpha, nu)."""
    n = basis.nu_max + 1
    a = basis.scale_for(0)
    out = AssembledMatrix(index_names=('nu', 'v', 'alpha', 'L'), block_name='L')

    labels_of = {}
    for v in range(basis.v_max + 1):
        for alpha, L in orbital.so5_branching(v):
            labels_of.setdefault(L, []).append((v, alpha))
    if L_values is None:
        L_values = sorted(labels_of)

    cache = {}

    def rad(term, v2, v1):
        key = (term, v2, v1)
        if key not in cache:
            cache[key] = _term_radial(term, basis.lam_of(v1), basis.lam_of(v2), a,
                                      basis.nu_max, 5, v1)
        return cache[key]

    for L in L_values:
        kets = sorted(labels_of.get(L, []))
        if not kets:
            continue
        H = np.zeros((n*len(kets), n*len(kets)))
        for i, (v1, a1) in enumerate(kets):
            for j in range(i, len(kets)):
                # kets are sorted by v, so state j carries the higher v and is the bra
                v2, a2 = kets[j]
                sub = np.zeros((n, n))
                for term in spec.terms:
                    if term.orbital == SCALAR:
                        if i == j:
                            sub += term.coefficient*rad(term, v2, v1)
                    elif v2 != v1:
                        ang = orbital.triple_Q_me(spec.cg_table, (v2, a2, L, 0), (v1, a1, L, 0))
                        if ang != 0.0:
                            sub += term.coefficient*ang*rad(term, v2, v1)
                H[j*n:(j + 1)*n, i*n:(i + 1)*n] = sub
                H[i*n:(i + 1)*n, j*n:(j + 1)*n] = sub.T
        out.blocks[L] = _symmetrized(H, 'L={}'.format(L))
        out.states[L] = [(nu, v, alpha, L) for v, alpha in kets for nu in range(n)]
    return out



def build_coupled_matrix(spec, basis, blocks=None):
    """Assemble every block of ``spec`` in ``basis``.

    Central-force specs give one block per v. Crystal-field specs (N = 3)
    give blocks (m, parity) with m = 0..v_max unless ``blocks`` lists the m
    values. Triple-product specs (N = 5) give one block per L.

    Returns
    -------
    AssembledMatrix
    """
    _check_block_bases(spec, basis)
    orbitals = {t.orbital for t in spec.terms}
    if orbitals <= {SCALAR}:
        return central_force_matrix(spec, basis, blocks)
    if CRYSTAL_FIELD in orbitals and TRIPLE_Q in orbitals:
        raise ConfigError("crystal_field and triple_q terms cannot be combined")
    if CRYSTAL_FIELD in orbitals:
        return _crystal_field_matrix(spec, basis, blocks)
    if basis.kind == FIXED:
        raise PairingError("triple_q couples opposite parities; a fixed lambda cannot pair them")
    return _triple_q_matrix(spec, basis, blocks)
