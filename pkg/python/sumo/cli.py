"""Command-line entry points: ``sumo spectrum|scan|check|crystal-field|variational``.

Every command reads an INI file (``--spec``), lets flags override the
[Basis] and [Settings] keys, writes a result table and returns an exit code:
0 ok, 2 configuration error, 3 non-convergence, 4 missing CG coefficient.
"""

import os
import sys
import time

from argparse import ArgumentParser, ArgumentDefaultsHelpFormatter
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from sumo import config as sumo_config
from sumo import hamiltonian
from sumo import oracle
from sumo import results
from sumo import solve
from sumo._version import __version__
from sumo.constants import (CONVERGENCE_TOL, DRIFT_STEP, EXIT_CONFIG, EXIT_CONVERGENCE,
                            EXIT_MISSING_CG, EXIT_OK, ORACLE_RTOL)
from sumo.errors import ConfigError, ConvergenceError, DomainError, MissingCoefficient, PairingError
from sumo.hamiltonian import HARMONIC, PAIR, PER_V




################################################################################
#-------------------------------------------------------------------------------
# Run configuration
#-------------------------------------------------------------------------------
################################################################################

COMMANDS = ('spectrum', 'scan', 'check', 'crystal-field', 'variational')


@dataclass
class RunConfig:
    """Validated options of one CLI invocation.

    Attributes
    ----------
    command : str
    spec : str
        INI file with [Hamiltonian] and optional run sections.
    basis : str, optional
        ``harmonic``, ``pair:EVEN,ODD`` or ``per-v:FILE``; the [Basis]
        section is used when absent.
    scale : float, optional
    nu_max, v_max : int, optional
    out : str, optional
        Result file; stdout when absent.
    format : str, optional
        ``csv`` or ``json``; inferred from ``out`` when absent.
    cg_table : str, optional
    tolerance : float, optional
    num_cpus : int, optional
    verbose : int
    """
    command: str
    spec: Optional[str] = None
    basis: Optional[str] = None
    scale: Optional[float] = None
    nu_max: Optional[int] = None
    v_max: Optional[int] = None
    out: Optional[str] = None
    format: Optional[str] = None
    cg_table: Optional[str] = None
    tolerance: Optional[float] = None
    num_cpus: Optional[int] = None
    verbose: int = 0

    @classmethod
    def from_dict(cls, options):
        """Build from a mapping, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(options) - known)
        if unknown:
            raise ConfigError("unknown run option(s): {}".format(', '.join(unknown)))
        run = cls(**options)
        run.validate()
        return run

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError("unknown command {!r}".format(self.command))
        if self.command != 'check':
            if self.spec is None:
                raise ConfigError("{} needs --spec".format(self.command))
            if not os.path.isfile(self.spec):
                raise ConfigError("spec file {} not found".format(self.spec))
        self.format = results.infer_format(self.out, self.format)
        if self.scale is not None and not self.scale > 0:
            raise ConfigError("--scale must be > 0, got {}".format(self.scale))
        for name in ('nu_max', 'v_max'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError("--{} must be >= 0, got {}".format(name.replace('_', '-'), value))
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("--tolerance must be > 0, got {}".format(self.tolerance))
        if self.num_cpus is not None and self.num_cpus < 1:
            raise ConfigError("--num-cpus must be >= 1, got {}".format(self.num_cpus))
        if self.cg_table is not None and not os.path.isfile(self.cg_table):
            raise ConfigError("CG table {} not found".format(self.cg_table))



def _load(run):
    """Parsed INI file of ``run`` with --cg-table applied."""
    cfg = sumo_config.load(run.spec)
    if run.cg_table is not None:
        if not cfg.has_section('Hamiltonian'):
            cfg.add_section('Hamiltonian')
        cfg['Hamiltonian']['cg_table'] = os.path.abspath(run.cg_table)
    return cfg



def parse_basis_option(text, N, nu_max=None, v_max=None, scale=None):
    """BasisSpec from ``harmonic``, ``pair:EVEN,ODD`` or ``per-v:FILE``.

    A per-v file lists one lambda_v per line, optionally followed by a_v.
    """
    kind, _, arg = text.partition(':')
    kind = kind.strip().lower()
    kw = {k: v for k, v in dict(nu_max=nu_max, v_max=v_max, scale=scale).items() if v is not None}

    if kind == HARMONIC:
        return hamiltonian.BasisSpec(N=N, kind=HARMONIC, **kw)

    if kind == PAIR:
        try:
            even, odd = sumo_config.float_list(arg)
        except ValueError as err:
            raise ConfigError("--basis pair:EVEN,ODD, got {!r}".format(text)) from err
        return hamiltonian.BasisSpec(N=N, kind=PAIR, lam_even=even, lam_odd=odd, **kw)

    if kind in ('per-v', PER_V):
        try:
            data = np.loadtxt(arg, comments='#', ndmin=2)
        except (OSError, ValueError) as err:
            raise ConfigError("cannot read per-v basis file {}: {}".format(arg, err)) from err
        if data.shape[1] > 1 and scale is None:
            kw['scale'] = tuple(data[:, 1])
        return hamiltonian.BasisSpec(N=N, kind=PER_V, lambdas=tuple(data[:, 0]), **kw)

    raise ConfigError("--basis must be harmonic, pair:EVEN,ODD or per-v:FILE, got {!r}".format(text))



def _basis(run, cfg, N):
    if run.basis is not None:
        return parse_basis_option(run.basis, N, run.nu_max, run.v_max, run.scale)
    return hamiltonian.read_basis(cfg, N, nu_max=run.nu_max, v_max=run.v_max, scale=run.scale)



def _setting(cfg, key, cast, default):
    return sumo_config.get(cfg, 'Settings', key, cast, default)



def _tolerance(run, cfg, default=CONVERGENCE_TOL):
    if run.tolerance is not None:
        return run.tolerance
    return _setting(cfg, 'tolerance', float, default)



def _flag(text):
    value = text.strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError("not a boolean")



def _block_text(label):
    if isinstance(label, tuple):
        return ','.join(str(x) for x in label)
    return str(label)



def _unconverged(rows, tol):
    """Rows whose drift exceeds tol relative to max(|E|, 1)."""
    return [row for row in rows
            if np.isfinite(row[-1]) and abs(row[-1]) > tol*max(abs(row[-2]), 1.0)]




################################################################################
#-------------------------------------------------------------------------------
# Commands
#-------------------------------------------------------------------------------
################################################################################

def cmd_spectrum(run):
    """Diagonalize every block and write the levels with their drift.

    With ``[Settings] minimal_size = true`` each central-force block is
    instead solved at the smallest nu_max that reproduces the levels below
    ``energy_cut`` to the tolerance, and that nu_max is reported.
    """
    cfg = _load(run)
    spec = hamiltonian.read_spec(cfg)
    basis = _basis(run, cfg, spec.N)
    tol = _tolerance(run, cfg)
    energy_cut = _setting(cfg, 'energy_cut', float, None)
    levels = _setting(cfg, 'levels', int, None)
    drift_step = _setting(cfg, 'drift_step', int, DRIFT_STEP)

    rows = []
    if _setting(cfg, 'minimal_size', _flag, False):
        if not spec.is_central:
            raise ConfigError("minimal_size applies to central-force Hamiltonians only")
        if energy_cut is None:
            raise ConfigError("minimal_size needs [Settings] energy_cut")
        nu_reference = _setting(cfg, 'nu_reference', int, 300)
        for v in range(basis.v_max + 1):
            nu_max, ref = solve.minimal_basis_size(spec, basis, v, energy_cut, tol, nu_reference,
                                                   verbose=run.verbose)
            if not len(ref):
                continue
            small = solve.solve_central_force(spec, basis.resized(nu_max), [v], levels=len(ref),
                                              drift_step=0)
            for k, (E, E_ref) in enumerate(zip(small.eigenvalues[v], ref)):
                rows.append(('v', str(v), k, float(E_ref), float(E - E_ref), nu_max))
    else:
        if spec.is_central:
            spectrum = solve.solve_central_force(spec, basis, levels=levels, drift_step=drift_step,
                                                 verbose=run.verbose)
        else:
            blocks = _setting(cfg, 'blocks', sumo_config.int_list, None)
            spectrum = solve.solve_coupled(spec, basis, blocks=blocks, levels=levels,
                                           drift_step=drift_step, verbose=run.verbose)
        for label, k, E, drift in spectrum.levels(energy_cut):
            rows.append((spectrum.block_name, _block_text(label), k, E, drift, basis.nu_max))

    table = results.new_table('spectrum', rows)
    results.write_table(table, run.out, run.format)

    bad = _unconverged([(r[3], r[4]) for r in rows], tol)
    if bad:
        print("sumo: {} level(s) drift beyond tolerance {} (worst {:.3g})".format(
            len(bad), tol, max(abs(b[-1]) for b in bad)), file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK



def _alphas(cfg):
    alphas = sumo_config.get(cfg, 'Scan', 'alphas', sumo_config.float_list)
    if alphas is not None:
        return alphas
    lo = sumo_config.get(cfg, 'Scan', 'alpha_min', float, 0.0)
    hi = sumo_config.get(cfg, 'Scan', 'alpha_max', float, 1.0)
    step = sumo_config.get(cfg, 'Scan', 'alpha_step', float, 0.1)
    if not step > 0 or hi < lo:
        raise ConfigError("[Scan] needs alpha_min <= alpha_max and alpha_step > 0")
    n = int(np.floor((hi - lo)/step + 1e-9)) + 1
    return tuple(np.round(lo + step*np.arange(n), 12))



def cmd_scan(run):
    """Variational single-state versus diagonalized energies over an alpha grid."""
    cfg = _load(run)
    N = sumo_config.get(cfg, 'Hamiltonian', 'dimension', int, 5)
    M = sumo_config.get(cfg, 'Hamiltonian', 'mass', float, 100.0)
    v_max = run.v_max if run.v_max is not None else sumo_config.get(cfg, 'Basis', 'v_max', int, 0)
    nu_reference = sumo_config.get(cfg, 'Scan', 'nu_reference', int,
                                   _setting(cfg, 'nu_reference', int, 100))
    num_cpus = run.num_cpus if run.num_cpus is not None else _setting(cfg, 'num_cpus', int, None)

    table = solve.scan_collective(_alphas(cfg), M=M, N=N, v_max=v_max, nu_reference=nu_reference,
                                  num_cpus=num_cpus, verbose=run.verbose)
    table = results.new_table('scan', [tuple(row) for row in table])
    results.write_table(table, run.out, run.format)

    if run.verbose and len(table):
        worst = table[np.argmax(table['discrepancy'])]
        print("largest single-state discrepancy {:.3%} at alpha = {}, v = {}".format(
            worst['discrepancy'], worst['alpha'], worst['v']), flush=True)

    tol = _tolerance(run, cfg)
    bad = _unconverged([(row['diagonalized'], row['drift']) for row in table], tol)
    if bad:
        print("sumo: {} reference energies drift beyond tolerance {} (worst {:.3g})".format(
            len(bad), tol, max(abs(b[-1]) for b in bad)), file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK



def cmd_check(run):
    """Run the oracle battery; fails naming every check beyond its tolerance."""
    tol = run.tolerance if run.tolerance is not None else ORACLE_RTOL
    start = time.time()
    checks = oracle.run_battery(verbose=run.verbose, tol=tol)
    table = results.new_table('check', [(c.name, c.passed, c.error, c.tolerance) for c in checks])
    if run.out is not None or run.verbose:
        results.write_table(table, run.out, run.format)

    failed = [c for c in checks if not c.passed]
    for c in failed:
        print("sumo: check {} failed: error {:.3e} > {:.1e}".format(c.name, c.error, c.tolerance),
              file=sys.stderr)
    if run.verbose:
        print("{} checks, {} failed ({:.1f} s)".format(len(checks), len(failed), time.time() - start),
              flush=True)
    return EXIT_CONVERGENCE if failed else EXIT_OK



def cmd_crystal_field(run):
    """Levels of H_central, H_0 = H_central + chi r0^2 P2 and H = H_central + chi r^2 P2.

    The central part comes from [Hamiltonian]; chi, r0_squared and m_max
    from [CrystalField]. Without r0_squared the ``aligned`` column is NaN.
    """
    cfg = _load(run)
    spec = hamiltonian.read_spec(cfg)
    if not spec.is_central:
        raise ConfigError("crystal-field takes a central [Hamiltonian]; put chi in [CrystalField]")
    if spec.N != 3:
        raise ConfigError("crystal-field needs dimension = 3, got {}".format(spec.N))
    chi = sumo_config.get(cfg, 'CrystalField', 'chi', float)
    if chi is None:
        raise ConfigError("crystal-field needs [CrystalField] chi")
    r0_squared = sumo_config.get(cfg, 'CrystalField', 'r0_squared', float)
    basis = _basis(run, cfg, spec.N)
    m_max = sumo_config.get(cfg, 'CrystalField', 'm_max', int, basis.v_max)
    m_values = list(range(min(m_max, basis.v_max) + 1))
    levels = _setting(cfg, 'levels', int, 5)
    drift_step = _setting(cfg, 'drift_step', int, DRIFT_STEP)
    tol = _tolerance(run, cfg)

    def solve_with(extra, step=0):
        return solve.solve_coupled(extra, basis, blocks=m_values, levels=levels, drift_step=step,
                                   verbose=run.verbose)

    central = solve_with(hamiltonian.add_crystal_field(spec, 0.0))
    aligned = None if r0_squared is None else solve_with(hamiltonian.add_crystal_field(spec, chi, r0_squared))
    perturbed = solve_with(hamiltonian.add_crystal_field(spec, chi), drift_step)

    rows = []
    for label in sorted(perturbed.eigenvalues):
        m, parity = label
        for k, E in enumerate(perturbed.eigenvalues[label]):
            E0 = central.eigenvalues[label][k]
            Ea = np.nan if aligned is None else aligned.eigenvalues[label][k]
            drift = perturbed.drift.get(label)
            d = drift[k] if drift is not None and k < len(drift) else np.nan
            rows.append((m, parity, k, float(E0), float(Ea), float(E), float(d)))

    table = results.new_table('crystal-field', rows)
    results.write_table(table, run.out, run.format)

    bad = _unconverged([(r[5], r[6]) for r in rows], tol)
    if bad:
        print("sumo: {} level(s) drift beyond tolerance {}".format(len(bad), tol), file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK



def _candidates(cfg, v, N, lam_star):
    """[Variational] candidates, or the harmonic lambda and its integer shifts up to lam* + 10."""
    text = sumo_config.get(cfg, 'Variational', 'candidates')
    if text is not None:
        return [HARMONIC if tok == HARMONIC else float(tok)
                for tok in text.replace(',', ' ').split()]
    base = v + 0.5*N
    top = max(base, lam_star + 10.0)
    return [base + k for k in range(int(np.ceil(top - base)) + 1)]



def cmd_variational(run):
    """Per-v single-state optimum (a*, lambda*), plus the lowest-n-states basis selection
    when [Variational] states is set."""
    cfg = _load(run)
    spec = hamiltonian.read_spec(cfg)
    if not spec.is_central:
        raise ConfigError("variational needs a central-force Hamiltonian")
    get = lambda key, cast=float, default=None: sumo_config.get(cfg, 'Variational', key, cast, default)
    v_max = run.v_max if run.v_max is not None else sumo_config.get(cfg, 'Basis', 'v_max', int, 0)
    states = get('states', int)
    n_basis = get('basis_size', int, 5)

    scale_range = None
    if get('scale_min') is not None or get('scale_max') is not None:
        root = np.sqrt(spec.mass)
        scale_range = (get('scale_min', float, 0.2*root), get('scale_max', float, 5.0*root))
    lam_range = None
    if get('lambda_min') is not None or get('lambda_max') is not None:
        lam_range = (get('lambda_min', float, 1.05), get('lambda_max', float, 150.0))
    tol = _tolerance(run, cfg, 1e-8)

    rows = []
    for v in range(v_max + 1):
        opt = solve.variational_optimize(spec, v, scale_range, lam_range, tol=tol, verbose=run.verbose)
        selected = (np.nan, np.nan, np.nan)
        if states is not None:
            choice = solve.select_basis(spec, v, states, n_basis, _candidates(cfg, v, spec.N, opt.lam),
                                        scale_range, verbose=run.verbose)
            selected = (choice.lam, choice.scale, choice.energy)
        rows.append((v, opt.scale, opt.lam, opt.energy, opt.scale/np.sqrt(spec.mass),
                     hamiltonian.deformation_estimate(opt.lam, opt.scale, spec.N, v)) + selected)

    table = results.new_table('variational', rows)
    results.write_table(table, run.out, run.format)
    return EXIT_OK



HANDLERS = {'spectrum': cmd_spectrum,
            'scan': cmd_scan,
            'check': cmd_check,
            'crystal-field': cmd_crystal_field,
            'variational': cmd_variational}




################################################################################
#-------------------------------------------------------------------------------
# Entry point
#-------------------------------------------------------------------------------
################################################################################

def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument('-s', '--spec', '--config', dest='spec', default=None,
                        help='INI file with [Hamiltonian] and run settings.')
    common.add_argument('--basis', default=None,
                        help='harmonic, pair:EVEN,ODD or per-v:FILE; overrides [Basis].')
    common.add_argument('--scale', type=float, default=None, help='Global inverse width a.')
    common.add_argument('--nu-max', dest='nu_max', type=int, default=None, help='Radial truncation.')
    common.add_argument('--vmax', dest='v_max', type=int, default=None, help='Largest SO(N) label v.')
    common.add_argument('-o', '--out', default=None, help='Result file; stdout when omitted.')
    common.add_argument('--format', choices=results.FORMATS, default=None,
                        help='Result format; inferred from --out when omitted.')
    common.add_argument('--cg-table', dest='cg_table', default=None,
                        help='SO(5) > SO(3) coupling table, overrides [Hamiltonian] cg_table.')
    common.add_argument('--tolerance', type=float, default=None,
                        help='Convergence (or oracle) tolerance, overrides [Settings] tolerance.')
    common.add_argument('--num-cpus', dest='num_cpus', type=int, default=None,
                        help='Worker processes for scans; physical cores when omitted.')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='Repeat for more detail.')

    p = ArgumentParser(prog='sumo', description='Analytic Hamiltonian matrices in SU(1,1) x SO(N) '
                                                'modified-oscillator bases.',
                       formatter_class=ArgumentDefaultsHelpFormatter)
    p.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = p.add_subparsers(dest='command', metavar='command')
    sub.required = True
    helps = {'spectrum': 'Diagonalize a Hamiltonian and write its levels.',
             'scan': 'Collective-model alpha scan: single-state vs diagonalized energies.',
             'check': 'Compare every analytic matrix element with its numerical oracle.',
             'crystal-field': 'm-resolved levels with and without an axial crystal field.',
             'variational': 'Optimal (a, lambda) per v and lowest-n-states basis selection.'}
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name],
                       formatter_class=ArgumentDefaultsHelpFormatter)
    return p



def main(argv=None):
    """Run the CLI; returns the exit code."""
    args = build_parser().parse_args(argv)
    options = vars(args)
    try:
        run = RunConfig.from_dict(options)
        return HANDLERS[run.command](run)
    except MissingCoefficient as err:
        code, error = EXIT_MISSING_CG, err
    except ConvergenceError as err:
        code, error = EXIT_CONVERGENCE, err
    except (ConfigError, DomainError, PairingError, ValueError) as err:
        code, error = EXIT_CONFIG, err
    print("sumo: {}: {}".format(type(error).__name__, error), file=sys.stderr)
    return code



if __name__ == '__main__':
    sys.exit(main())
