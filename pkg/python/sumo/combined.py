"""SO(N)-reduced matrix elements of x, p, c^dagger and c between coupled
radial x orbital states |lam nu; v>.

Each element factorizes into a radial element between lambda and lambda +/- 1
and the orbital element <v'||Q||v>.
"""

import numpy as np

from dataclasses import dataclass

from sumo import radial
from sumo import orbital
from sumo.constants import SQRT2
from sumo.errors import DomainError, PairingError
from sumo.radial import LOWER, RAISE, RadialBasis




@dataclass(frozen=True)
class CoupledState:
    """Radial state R^lam_nu(a r) coupled to the SO(N) irrep v."""
    lam: float
    nu: int
    v: int
    N: int
    scale: float = 1.0

    def __post_init__(self):
        if self.nu < 0 or int(self.nu) != self.nu:
            raise DomainError("nu must be a non-negative integer, got {}".format(self.nu))
        if self.v < 0 or int(self.v) != self.v:
            raise DomainError("v must be a non-negative integer, got {}".format(self.v))

    def basis(self, nu_max=None):
        """Radial basis of this state, truncated at least at ``nu``."""
        return RadialBasis(lam=self.lam, scale=self.scale,
                           nu_max=self.nu if nu_max is None else max(nu_max, self.nu))



@dataclass(frozen=True)
class CoupledReducedME:
    radial_factor: float
    orbital_factor: float
    bra: CoupledState
    ket: CoupledState
    phase: complex = 1.0

    @property
    def total(self):
        return self.radial_factor*self.orbital_factor



def _pairing(bra, ket):
    """Direction of the radial step, after checking the states can be paired."""
    if bra.N != ket.N:
        raise PairingError("bra and ket live in different dimensions ({} and {})".format(bra.N, ket.N))
    if bra.scale != ket.scale:
        raise PairingError("bra and ket use different scales ({} and {})".format(bra.scale, ket.scale))
    if abs(bra.v - ket.v) != 1:
        raise PairingError("v'={} and v={} differ by {}, not 1".format(bra.v, ket.v, bra.v - ket.v))
    dlam = bra.lam - ket.lam
    if np.isclose(dlam, 1.0, rtol=0, atol=1e-12):
        return RAISE
    if np.isclose(dlam, -1.0, rtol=0, atol=1e-12):
        return LOWER
    raise PairingError("lambda'={} and lambda={} are not adjacent".format(bra.lam, ket.lam))



def _element(op, bra, ket):
    return float(op.entries[bra.nu, ket.nu])



def reduced_me_x(bra, ket, phases=None):
    """<lam' nu'; v' || x || lam nu; v> = <lam' nu'|r|lam nu> <v'||Q||v>."""
    direction = _pairing(bra, ket)
    basis = ket.basis(bra.nu)
    radial_factor = _element(radial.me_r(basis, direction), bra, ket)
    orbital_factor = orbital.reduced_me_Q(ket.N, bra.v, ket.v, phases)
    return CoupledReducedME(radial_factor=radial_factor, orbital_factor=orbital_factor,
                            bra=bra, ket=ket)



def ladder_argument(N, v, v_out, dagger):
    """Argument X of the A(X) operator carried by c (or c^dagger) from v to v_out."""
    h = v + 0.5*N
    if v_out == v + 1:
        return h - 0.5 if dagger else -h + 0.5
    if v_out == v - 1:
        return -h + 1.5 if dagger else h - 1.5
    raise PairingError("v'={} is not v +/- 1 for v={}".format(v_out, v))



def _ladder(bra, ket, phases, dagger):
    direction = _pairing(bra, ket)
    X = ladder_argument(ket.N, ket.v, bra.v, dagger)
    op = radial.me_factorization(ket.basis(bra.nu), X, direction, dagger=dagger)
    return CoupledReducedME(radial_factor=_element(op, bra, ket)/SQRT2,
                            orbital_factor=orbital.reduced_me_Q(ket.N, bra.v, ket.v, phases),
                            bra=bra, ket=ket)



def reduced_me_cdag(bra, ket, phases=None):
    """<bra || c^dagger || ket> = A^dagger(X) element / sqrt(2) times <v'||Q||v>."""
    return _ladder(bra, ket, phases, dagger=True)



def reduced_me_c(bra, ket, phases=None):
    """<bra || c || ket> = A(X) element / sqrt(2) times <v'||Q||v>."""
    return _ladder(bra, ket, phases, dagger=False)



def reduced_me_p(bra, ket, phases=None, hbar=1.0):
    """Real magnitude of <bra || p || ket>; the element itself is -i times it.

    v' = v+1: hbar <d/dr - (v+N/2-1/2)/r> <v+1||Q||v>
    v' = v-1: hbar <d/dr + (v+N/2-3/2)/r> <v-1||Q||v>
    """
    direction = _pairing(bra, ket)
    h = ket.v + 0.5*ket.N
    X = -(h - 0.5) if bra.v == ket.v + 1 else h - 1.5

    basis = ket.basis(bra.nu)
    op = radial.me_ddr(basis, direction)
    if X != 0:
        op = op + X*radial.me_inv_r(basis, direction)
    return CoupledReducedME(radial_factor=hbar*_element(op, bra, ket),
                            orbital_factor=orbital.reduced_me_Q(ket.N, bra.v, ket.v, phases),
                            bra=bra, ket=ket, phase=-1j)



def number_operator_expectation(ket, lam_of, phases=None, nu_max=None):
    """<ket| sum_i c_i^dagger c_i |ket> from reduced elements of c.

    Sums (d(v')/d(v)) |<lam_of(v') mu; v'||c||ket>|^2 over v' = v +/- 1 and
    mu = 0..nu_max. Equals 2 nu + v when lam_of(v) = v + N/2.
    """
    if nu_max is None:
        nu_max = ket.nu + 1
    total = 0.0
    for vp in (ket.v - 1, ket.v + 1):
        if vp < 0:
            continue
        weight = orbital.dim_son(ket.N, vp)/orbital.dim_son(ket.N, ket.v)
        q = orbital.reduced_me_Q(ket.N, vp, ket.v, phases)
        bra = CoupledState(lam=lam_of(vp), nu=0, v=vp, N=ket.N, scale=ket.scale)
        direction = _pairing(bra, ket)
        X = ladder_argument(ket.N, ket.v, vp, dagger=False)
        op = radial.me_factorization(ket.basis(nu_max), X, direction, dagger=False)
        column = op.entries[:, ket.nu]/SQRT2
        total += weight*q**2*float(np.sum(column**2))
    return total
