# -*- coding: utf-8 -*-
"""Tests of the sumo command line: result files and exit codes.
"""
import io
import os
import tempfile
import unittest

from contextlib import redirect_stderr
from unittest import mock

import numpy as np

from sumo import cli
from sumo import radial
from sumo import results
from sumo.constants import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_MISSING_CG, EXIT_OK
from sumo.errors import ConfigError, PairingError

DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')

QUARTIC_SMALL = """[Hamiltonian]
dimension = 3
model     = quartic

[Basis]
nu_max = 12

[Settings]
levels     = 3
drift_step = 10
tolerance  = 1e-12
"""

TRIPLE_Q_ALL_BLOCKS = """[Hamiltonian]
dimension = 5
model     = collective
mass      = 100
alpha     = 1.5
kappa     = 2.0

[Basis]
kind        = pair
lambda_even = 57
lambda_odd  = 58
scale       = 10.0
nu_max      = 2
v_max       = 3

[Settings]
drift_step = 0
"""

SCAN = """[Hamiltonian]
dimension = 5
model     = collective
mass      = 100
alpha     = 0.0

[Scan]
alphas       = 0.0, 1.0
nu_reference = 80

[Settings]
tolerance = 1e-9
"""

SCAN_SMALL = """[Hamiltonian]
dimension = 5
model     = collective
mass      = 100
alpha     = 1.0

[Scan]
alphas       = 1.0
nu_reference = 2

[Settings]
tolerance = 1e-12
"""

BAD_KEY = """[Hamiltonian]
dimension = 3
model     = harmonic
colour    = red
"""

class TestCommands(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        self.files = []

    def tearDown(self):
        for path in self.files:
            if os.path.exists(path):
                os.remove(path)
        os.rmdir(self.tmpdir)

    def _path(self, name):
        path = os.path.join(self.tmpdir, name)
        self.files.append(path)
        return path

    def _ini(self, name, text):
        path = self._path(name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def _main(self, argv):
        err = io.StringIO()
        with redirect_stderr(err):
            code = cli.main(argv)
        return code, err.getvalue()

    def test_spectrum_csv(self):
        """Harmonic N = 3 levels 3/2 + 2 nu + v, read back from CSV."""
        out = self._path('harmonic.csv')
        code, _ = self._main(['spectrum', '--spec', os.path.join(DATA, 'harmonic.ini'), '--out', out])
        self.assertEqual(code, EXIT_OK)

        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema spectrum v1')
        self.assertEqual(len(table), 25)
        for row in table:
            v = int(row['block'])
            self.assertTrue(np.isclose(row['energy'], 1.5 + v + 2.*row['level'], atol=1e-12))
            self.assertEqual(row['block_name'], 'v')
            self.assertEqual(row['nu_max'], 20)
        self.assertTrue(np.all(np.diff(table['energy']) >= 0))

    def test_spectrum_json_override(self):
        """Flags override [Basis]; JSON output mirrors the CSV columns."""
        out = self._path('davidson.json')
        code, _ = self._main(['spectrum', '--spec', os.path.join(DATA, 'davidson.ini'),
                              '--nu-max', '15', '--out', out])
        self.assertEqual(code, EXIT_OK)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema spectrum v1')
        self.assertEqual(list(table.colnames), list(results.SCHEMAS['spectrum'][0]))
        self.assertTrue(np.allclose(table['energy'], [2.5, 4.5, 6.5], atol=1e-10))
        self.assertTrue(np.all(table['nu_max'] == 15))

    def test_minimal_size(self):
        out = self._path('quartic.csv')
        spec = self._ini('quartic.ini', "[Hamiltonian]\ndimension = 3\nmodel = quartic\n\n"
                         "[Basis]\nscale = 1.6\nv_max = 1\n\n"
                         "[Settings]\nenergy_cut = 20\nminimal_size = yes\n"
                         "nu_reference = 100\ntolerance = 1e-9\n")
        code, _ = self._main(['spectrum', '--spec', spec, '--out', out])
        self.assertEqual(code, EXIT_OK)
        _, table = results.read_table(out)
        self.assertGreaterEqual(len(table), 4)
        self.assertTrue(np.all(table['nu_max'] < 100))
        self.assertTrue(np.all(np.abs(table['drift']) <= 1e-9*np.abs(table['energy'])))

    def test_triple_q_blocks(self):
        out = self._path('triple_q.csv')
        code, _ = self._main(['spectrum', '--spec', os.path.join(DATA, 'triple_q.ini'), '--out', out])
        self.assertEqual(code, EXIT_OK)
        _, table = results.read_table(out)
        self.assertEqual(len(table), 3)
        self.assertTrue(np.all(table['block_name'] == 'L'))

    def test_exit_missing_coefficient(self):
        spec = self._ini('triple_q_all.ini', TRIPLE_Q_ALL_BLOCKS)
        code, err = self._main(['spectrum', '--spec', spec,
                                '--cg-table', os.path.join(DATA, 'so5_cg_minimal.txt'),
                                '--out', self._path('unused.csv')])
        self.assertEqual(code, EXIT_MISSING_CG)
        self.assertIn('MissingCoefficient', err)

    def test_exit_convergence(self):
        spec = self._ini('quartic_small.ini', QUARTIC_SMALL)
        out = self._path('quartic_small.csv')
        code, err = self._main(['spectrum', '--spec', spec, '--out', out])
        self.assertEqual(code, EXIT_CONVERGENCE)
        self.assertIn('drift beyond tolerance', err)
        # the table is still written
        schema, _ = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema spectrum v1')

    def test_exit_config(self):
        bad = self._ini('bad.ini', BAD_KEY)
        for argv in (['spectrum', '--spec', bad],
                     ['spectrum'],
                     ['spectrum', '--spec', os.path.join(self.tmpdir, 'absent.ini')],
                     ['spectrum', '--spec', os.path.join(DATA, 'harmonic.ini'), '--nu-max', '-1'],
                     ['spectrum', '--spec', os.path.join(DATA, 'harmonic.ini'), '--basis', 'pair:2.5,4.5'],
                     ['crystal-field', '--spec', os.path.join(DATA, 'harmonic.ini')]):
            code, err = self._main(argv)
            self.assertEqual(code, EXIT_CONFIG, argv)
            self.assertTrue(err.startswith('sumo: '))

    def test_check(self):
        out = self._path('check.csv')
        code, _ = self._main(['check', '--out', out])
        self.assertEqual(code, EXIT_OK)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema check v1')
        self.assertIn('me_ddr(raise)', list(table['name']))

    def test_check_detects_broken_element(self):
        """A sign error in d/dr fails the battery and is named."""
        original = radial.me_ddr
        with mock.patch('sumo.radial.me_ddr', side_effect=lambda b, d: -1.0*original(b, d)):
            code, err = self._main(['check'])
        self.assertEqual(code, EXIT_CONVERGENCE)
        self.assertIn('check me_ddr(raise) failed', err)

    def test_crystal_field(self):
        out = self._path('crystal_field.json')
        code, _ = self._main(['crystal-field', '--spec', os.path.join(DATA, 'crystal_field.ini'),
                              '--out', out])
        self.assertEqual(code, EXIT_OK)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema crystal-field v1')
        self.assertEqual(sorted(set(table['m'])), [0, 1, 2])

        def ground(m):
            rows = table[(table['m'] == m) & (table['parity'] == -1) & (table['level'] == 0)]
            return rows[0]

        p0, p1 = ground(0), ground(1)
        self.assertTrue(np.isclose(p0['central'], 2.5))
        shift0 = p0['perturbed'] - p0['central']
        shift1 = p1['perturbed'] - p1['central']
        self.assertTrue(np.isclose(shift0, 0.02, rtol=0.05))
        self.assertTrue(np.isclose(shift1/shift0, -0.5, rtol=0.05))
        self.assertTrue(np.isfinite(p0['aligned']))

    def test_variational(self):
        out = self._path('variational.json')
        code, _ = self._main(['variational', '--spec', os.path.join(DATA, 'harmonic.ini'),
                              '--vmax', '1', '--tolerance', '1e-8', '--out', out])
        self.assertEqual(code, EXIT_OK)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema variational v1')
        self.assertTrue(np.allclose(table['energy'], [1.5, 2.5], rtol=1e-7))
        self.assertTrue(np.allclose(table['lam'], [1.5, 2.5], atol=1e-3))
        self.assertTrue(np.all(np.isnan(table['selected_lam'])))

    def test_scan(self):
        out = self._path('scan.csv')
        spec = self._ini('scan.ini', SCAN)
        code, _ = self._main(['scan', '--spec', spec, '--num-cpus', '1', '--out', out])
        self.assertEqual(code, EXIT_OK)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema scan v1')
        self.assertEqual(list(table['alpha']), [0.0, 1.0])
        self.assertTrue(np.isclose(table['scale_over_sqrt_mass'][0], 1.0, atol=1e-3))

    def test_scan_unstable_reference(self):
        out = self._path('scan_small.csv')
        spec = self._ini('scan_small.ini', SCAN_SMALL)
        code, err = self._main(['scan', '--spec', spec, '--num-cpus', '1', '--out', out])
        self.assertEqual(code, EXIT_CONVERGENCE)
        self.assertIn('drift beyond tolerance', err)
        schema, table = results.read_table(out)
        self.assertEqual(schema, 'sumo-schema scan v1')
        self.assertGreater(abs(table['drift'][0]), 1e-12)

class TestOptions(unittest.TestCase):

    def test_version(self):
        import sumo
        from sumo import _git
        self.assertEqual(_git.get_version(), sumo.__version__)
        path = os.path.join(tempfile.mkdtemp(), '_version.py')
        with open(path, 'w') as f:
            f.write("release = '1.0'\n")
        self.assertIsNone(_git.read_version(path))
        os.remove(path)
        os.rmdir(os.path.dirname(path))

    def test_run_config(self):
        with self.assertRaises(ConfigError):
            cli.RunConfig.from_dict({'command': 'spectrum', 'colour': 'red'})
        with self.assertRaises(ConfigError):
            cli.RunConfig.from_dict({'command': 'plot'})
        run = cli.RunConfig.from_dict({'command': 'check', 'out': 'checks.json'})
        self.assertEqual(run.format, 'json')
        with self.assertRaises(ConfigError):
            cli.RunConfig.from_dict({'command': 'check', 'format': 'xml'})

    def test_basis_option(self):
        basis = cli.parse_basis_option('pair:57,58', 5, nu_max=4)
        self.assertEqual((basis.lam_of(0), basis.lam_of(1), basis.nu_max), (57., 58., 4))
        self.assertEqual(cli.parse_basis_option('harmonic', 3).lam_of(2), 3.5)
        with self.assertRaises(PairingError):
            cli.parse_basis_option('pair:57,59', 5)
        with self.assertRaises(ConfigError):
            cli.parse_basis_option('pair:57', 5)
        with self.assertRaises(ConfigError):
            cli.parse_basis_option('laguerre', 5)

    def test_parser(self):
        args = cli.build_parser().parse_args(['spectrum', '-s', 'h.ini', '--vmax', '3', '-vv'])
        self.assertEqual((args.command, args.spec, args.v_max, args.verbose), ('spectrum', 'h.ini', 3, 2))
        with self.assertRaises(SystemExit):
            with redirect_stderr(io.StringIO()):
                cli.build_parser().parse_args([])

if __name__ == '__main__':
    unittest.main()
