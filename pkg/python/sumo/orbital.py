"""SO(N)-reduced matrix elements of the unit-vector tensor Q, their SO(3)
recouplings, and the angular-momentum coefficients they need.

Reduced matrix elements follow the Wigner-Eckart convention

    <j' m'| T^k_q |j m> = (j m, k q | j' m') <j' || T^k || j>.
"""

import warnings

import numpy as np

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from scipy.special import gammaln

from sumo.errors import ConfigError, DomainError, MissingCoefficient


Q_LABEL = (1, 1, 2)




################################################################################
#-------------------------------------------------------------------------------
# Labels and conventions
#-------------------------------------------------------------------------------
################################################################################

@dataclass(frozen=True)
class OrbitalLabel:
    """SO(N) label v, optionally refined by SO(5) > SO(3) sublabels."""
    N: int
    v: int
    alpha: Optional[int] = None
    L: Optional[int] = None
    M: Optional[int] = None

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("N must be >= 2, got {}".format(self.N))
        if self.v < 0:
            raise DomainError("v must be >= 0, got {}".format(self.v))

    @property
    def parity(self):
        return 1 if self.v % 2 == 0 else -1

    @property
    def dim(self):
        return dim_son(self.N, self.v)



@dataclass(frozen=True)
class PhaseConvention:
    """Phase e^{i phi(v)} attached to the SO(N) states of label v.

    Only the two real choices occur: ``alternating`` gives (-1)^v, otherwise
    the phase is 1.
    """
    name: str
    alternating: bool = False

    def phase(self, v):
        return -1.0 if (self.alternating and v % 2) else 1.0

    def phase_angle(self, v):
        return np.pi*(v % 2) if self.alternating else 0.0


SO3_STANDARD = PhaseConvention('so3_standard', alternating=True)
SO5_UNIT = PhaseConvention('so5_unit', alternating=False)

PHASE_CONVENTIONS = {p.name: p for p in (SO3_STANDARD, SO5_UNIT)}



def default_phases(N):
    """Spherical-harmonic phases for N = 3, unit phases otherwise."""
    return SO3_STANDARD if N == 3 else SO5_UNIT




################################################################################
#-------------------------------------------------------------------------------
# SO(N) tower of Q
#-------------------------------------------------------------------------------
################################################################################

def dim_son(N, v):
    """Dimension of the symmetric traceless rank-v irrep of SO(N).

    (2v+N-2)(v+N-3)!/(v!(N-2)!), with the N = 2 irreps of dimension 1 (v = 0)
    and 2 (v > 0).
    """
    if N < 2 or v < 0:
        raise DomainError("dim_son needs N >= 2 and v >= 0, got N={} v={}".format(N, v))
    if v == 0:
        return 1
    if N == 2:
        return 2
    logd = gammaln(v + N - 2) - gammaln(v + 1) - gammaln(N - 1)
    return int(round((2*v + N - 2)*np.exp(logd)))



def reduced_me_Q(N, v_out, v_in, phases=None):
    """<v_out || Q || v_in>, nonzero only for v_out = v_in +/- 1.

    Parameters
    ----------
    N : int
        Space dimension.
    v_out, v_in : int
        SO(N) labels of bra and ket.
    phases : PhaseConvention, optional
        Defaults to :func:`default_phases`.

    Returns
    -------
    float
    """
    if phases is None:
        phases = default_phases(N)
    if v_out < 0 or v_in < 0:
        return 0.0

    v = v_in
    if v_out == v + 1:
        return float(np.sqrt((v + 1)/(2*v + N)))
    if v_out == v - 1:
        ratio = dim_son(N, v)*v/(dim_son(N, v - 1)*(2*v + N - 2))
        return phases.phase(v)*phases.phase(v - 1)*float(np.sqrt(ratio))
    return 0.0



def reduced_me_symmetry_check(N, v3, v1, phases=None):
    """Both sides of the bra/ket exchange relation of <v3||Q||v1>.

    Returns ``(lhs, rhs)`` with lhs = <v3||Q||v1> and
    rhs = e^{i(phi(v1)-phi(v3))} sqrt(d(v1)/d(v3)) <v1||Q||v3>.
    """
    if phases is None:
        phases = default_phases(N)
    lhs = reduced_me_Q(N, v3, v1, phases)
    rhs = (phases.phase(v1)*phases.phase(v3)*np.sqrt(dim_son(N, v1)/dim_son(N, v3))
           *reduced_me_Q(N, v1, v3, phases))
    return lhs, float(rhs)



def q_sum_rule(N, v, phases=None):
    """sum over v' of d(v')/d(v) <v'||Q||v>^2, equal to 1 (Q.Q = 1)."""
    total = 0.0
    for vp in (v - 1, v + 1):
        if vp >= 0:
            total += dim_son(N, vp)/dim_son(N, v)*reduced_me_Q(N, vp, v, phases)**2
    return total




################################################################################
#-------------------------------------------------------------------------------
# SO(3) coupling coefficients
#
# Angular momenta are handled internally as doubled integers so half-integer
# values are exact.
#-------------------------------------------------------------------------------
################################################################################

def _twice(j):
    tj = int(round(2*j))
    if abs(tj - 2*j) > 1e-9:
        raise DomainError("{} is not an integer or half-integer".format(j))
    return tj



def _logfact(n):
    return gammaln(n + 1.0)



def _triangle(ta, tb, tc):
    """Doubled-int triangle condition including integer perimeter."""
    return (tc <= ta + tb) and (tc >= abs(ta - tb)) and ((ta + tb + tc) % 2 == 0)



def _log_delta(ta, tb, tc):
    """log of (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!"""
    return (_logfact((ta + tb - tc)//2) + _logfact((ta - tb + tc)//2)
            + _logfact((-ta + tb + tc)//2) - _logfact((ta + tb + tc)//2 + 1))



@lru_cache(maxsize=65536)
def _w3j(tj1, tj2, tj3, tm1, tm2, tm3):
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if not _triangle(tj1, tj2, tj3):
        return 0.0
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if abs(tm) > tj or (tj + tm) % 2:
            return 0.0

    log_pre = 0.5*(_log_delta(tj1, tj2, tj3)
                   + _logfact((tj1 + tm1)//2) + _logfact((tj1 - tm1)//2)
                   + _logfact((tj2 + tm2)//2) + _logfact((tj2 - tm2)//2)
                   + _logfact((tj3 + tm3)//2) + _logfact((tj3 - tm3)//2))

    # summation bounds, in single (not doubled) units
    k_min = max(0, (tj2 - tj3 - tm1)//2, (tj1 - tj3 + tm2)//2)
    k_max = min((tj1 + tj2 - tj3)//2, (tj1 - tm1)//2, (tj2 + tm2)//2)

    total = 0.0
    for k in range(k_min, k_max + 1):
        log_den = (_logfact(k) + _logfact((tj3 - tj2 + tm1)//2 + k)
                   + _logfact((tj3 - tj1 - tm2)//2 + k) + _logfact((tj1 + tj2 - tj3)//2 - k)
                   + _logfact((tj1 - tm1)//2 - k) + _logfact((tj2 + tm2)//2 - k))
        total += (-1.0)**k*np.exp(log_pre - log_den)

    sign = -1.0 if ((tj1 - tj2 - tm3)//2) % 2 else 1.0
    return sign*total



def wigner_3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3); zero outside the selection rules."""
    return _w3j(_twice(j1), _twice(j2), _twice(j3), _twice(m1), _twice(m2), _twice(m3))



def so3_cg(l1, m1, l2, m2, L, M):
    """Condon-Shortley Clebsch-Gordan coefficient (l1 m1, l2 m2 | L M)."""
    tl1, tl2, tL = _twice(l1), _twice(l2), _twice(L)
    tm1, tm2, tM = _twice(m1), _twice(m2), _twice(M)
    w = _w3j(tl1, tl2, tL, tm1, tm2, -tM)
    if w == 0.0:
        return 0.0
    sign = -1.0 if ((tl1 - tl2 + tM)//2) % 2 else 1.0
    return sign*np.sqrt(tL + 1.0)*w



@lru_cache(maxsize=65536)
def _w6j(ta, tb, tc, td, te, tf):
    for triad in ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc)):
        if not _triangle(*triad):
            return 0.0

    log_pre = 0.5*(_log_delta(ta, tb, tc) + _log_delta(ta, te, tf)
                   + _log_delta(td, tb, tf) + _log_delta(td, te, tc))

    s1 = (ta + tb + tc)//2
    s2 = (ta + te + tf)//2
    s3 = (td + tb + tf)//2
    s4 = (td + te + tc)//2
    p1 = (ta + tb + td + te)//2
    p2 = (ta + tc + td + tf)//2
    p3 = (tb + tc + te + tf)//2

    total = 0.0
    for t in range(max(s1, s2, s3, s4), min(p1, p2, p3) + 1):
        log_term = (_logfact(t + 1) - _logfact(t - s1) - _logfact(t - s2) - _logfact(t - s3)
                    - _logfact(t - s4) - _logfact(p1 - t) - _logfact(p2 - t) - _logfact(p3 - t))
        total += (-1.0)**t*np.exp(log_pre + log_term)
    return total



def wigner_6j(j1, j2, j3, j4, j5, j6):
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _w6j(_twice(j1), _twice(j2), _twice(j3), _twice(j4), _twice(j5), _twice(j6))



def racah_w(a, b, c, d, e, f):
    """Racah coefficient W(a b c d; e f) = (-1)^(a+b+c+d) {a b e; d c f}."""
    six = wigner_6j(a, b, e, d, c, f)
    if six == 0.0:
        return 0.0
    s = _twice(a) + _twice(b) + _twice(c) + _twice(d)
    return -six if (s//2) % 2 else six




################################################################################
#-------------------------------------------------------------------------------
# N = 3 recouplings
#-------------------------------------------------------------------------------
################################################################################

def reduced_me_coupled(l2, l1, k1, k2, K, left, right):
    """<l2 || (T^k1 x U^k2)_K || l1> from the reduced elements of T and U.

    ``left(lb, la)`` and ``right(lb, la)`` return <lb||T||la> and <lb||U||la>.
    """
    total = 0.0
    for l in range(abs(l1 - k2), l1 + k2 + 1):
        if not _triangle(2*l, 2*k1, 2*l2):
            continue
        w = racah_w(l1, k2, l2, k1, l, K)
        if w == 0.0:
            continue
        total += np.sqrt((2*l + 1)*(2*K + 1))*w*left(l2, l)*right(l, l1)
    sign = -1.0 if (k1 + k2 - K) % 2 else 1.0
    return sign*total



def reduced_me_QQ2(l2, l1, phases=SO3_STANDARD):
    """<l2 || (Q x Q)_2 || l1> for N = 3 by Racah recoupling."""
    if (l2 - l1) % 2:
        return 0.0

    def q(lb, la):
        return reduced_me_Q(3, lb, la, phases)

    return reduced_me_coupled(l2, l1, 1, 1, 2, q, q)



def me_crystal_field(l2, l1, m, phases=SO3_STANDARD):
    """<l2 m| 3cos^2(theta) - 1 |l1 m> = sqrt(6) (l1 m, 2 0 | l2 m) <l2||(QxQ)_2||l1>."""
    if abs(l2 - l1) not in (0, 2):
        return 0.0
    if abs(m) > min(l1, l2):
        return 0.0
    cg = so3_cg(l1, m, 2, 0, l2, m)
    if cg == 0.0:
        return 0.0
    return float(np.sqrt(6.0)*cg*reduced_me_QQ2(l2, l1, phases))




################################################################################
#-------------------------------------------------------------------------------
# SO(5) > SO(3)
#-------------------------------------------------------------------------------
################################################################################

@lru_cache(maxsize=None)
def so5_branching(v):
    """(alpha, L) labels of the SO(5) irrep v restricted to SO(3).

    For n = 0..v//3 with lam = v - 3n, L runs over lam..2 lam except 2 lam - 1.
    alpha numbers repeated L values from 1. Sorted by (L, alpha).
    """
    if v < 0:
        raise DomainError("v must be >= 0, got {}".format(v))
    count = {}
    labels = []
    for n in range(v//3 + 1):
        lam = v - 3*n
        for L in range(lam, 2*lam + 1):
            if L == 2*lam - 1:
                continue
            count[L] = count.get(L, 0) + 1
            labels.append((count[L], L))
    return tuple(sorted(labels, key=lambda al: (al[1], al[0])))



def _label(t):
    return tuple(int(x) for x in t)



@dataclass(frozen=True)
class CGTable:
    """SO(5) > SO(3) reduced coupling coefficients (v1 a1 L1; v2 a2 L2 || v3 a3 L3).

    Only consumed here; the coefficients come from an external file.
    """
    entries: dict = field(default_factory=dict)
    source: str = ''

    @classmethod
    def from_file(cls, path):
        """Read the whitespace text format ``v1 a1 L1  v2 a2 L2  v3 a3 L3  value``."""
        try:
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', UserWarning)
                data = np.loadtxt(path, comments='#', ndmin=2)
        except OSError as err:
            raise ConfigError("cannot read CG table {}: {}".format(path, err)) from err
        except ValueError as err:
            raise ConfigError("malformed CG table {}: {}".format(path, err)) from err

        entries = {}
        if data.size:
            if data.shape[1] != 10:
                raise ConfigError("CG table {} needs 10 columns per line, found {}".format(path, data.shape[1]))
            for row in data:
                if np.any(row[:9] != np.round(row[:9])):
                    raise ConfigError("CG table {} has non-integer labels in {}".format(path, row[:9]))
                entries[(_label(row[0:3]), _label(row[3:6]), _label(row[6:9]))] = float(row[9])
        return cls(entries=entries, source=str(path))

    def __len__(self):
        return len(self.entries)

    def get(self, first, second, coupled):
        key = (_label(first), _label(second), _label(coupled))
        try:
            return self.entries[key]
        except KeyError:
            raise MissingCoefficient(key[0] + key[1] + key[2], self.source) from None

    def block_norms(self):
        """Sum of squares per coupled label (v3 a3 L3) and pair (v1, v2).

        Equal to 1 for every block the table lists completely.
        """
        norms = {}
        for (first, second, coupled), value in self.entries.items():
            key = (first[0], second[0]) + coupled
            norms[key] = norms.get(key, 0.0) + value**2
        return norms



def so3_reduced_me_Q5(table, bra, ket):
    """<v' a' L' || Q || v a L> for N = 5 from the table and the SO(5) element."""
    so5 = reduced_me_Q(5, bra[0], ket[0], SO5_UNIT)
    if so5 == 0.0:
        return 0.0
    return table.get(ket, Q_LABEL, bra)*so5



def triple_Q_me(table, bra, ket):
    """<v' a' L M | (Q x Q x Q)_0 | v a L M> for N = 5.

    The product is coupled as [(Q x Q)_2 x Q]_0. The first intermediate state
    (v1 a1 L1) is reached from the ket and the second (v2 a2 L2) connects to
    the bra.

    Parameters
    ----------
    table : CGTable
        Coefficients for every intermediate reached from the ket.
    bra, ket : tuple
        (v, alpha, L, M) labels.

    Returns
    -------
    float

    Raises
    ------
    MissingCoefficient
        When a needed coefficient is absent from the table.
    """
    vp, ap, Lp, Mp = bra
    v, a, L, M = ket
    if Lp != L or Mp != M:
        return 0.0
    if abs(vp - v) > 3 or (vp - v) % 2 == 0:
        return 0.0

    out = (vp, ap, L)
    into = (v, a, L)
    total = 0.0
    for v1 in (v - 1, v + 1):
        if v1 < 0:
            continue
        for v2 in (v1 - 1, v1 + 1):
            if v2 < 0 or abs(vp - v2) != 1:
                continue
            for a1, L1 in so5_branching(v1):
                if not _triangle(2*L, 4, 2*L1):
                    continue
                for a2, L2 in so5_branching(v2):
                    if not (_triangle(2*L1, 4, 2*L2) and _triangle(2*L2, 4, 2*L)):
                        continue
                    w = racah_w(L, 2, L1, 2, L2, 2)
                    if w == 0.0:
                        continue
                    factor = (-1.0)**(L1 - L)*np.sqrt((2*L1 + 1)*(2*L2 + 1)/(2*L + 1))*w
                    first = (v1, a1, L1)
                    second = (v2, a2, L2)
                    total += (factor
                              *so3_reduced_me_Q5(table, out, second)
                              *so3_reduced_me_Q5(table, second, first)
                              *so3_reduced_me_Q5(table, first, into))
    return float(total)
