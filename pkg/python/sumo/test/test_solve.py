# -*- coding: utf-8 -*-
"""Unit tests of diagonalization, variational optimization and convergence.
"""
import unittest

import numpy as np

from sumo import hamiltonian
from sumo import oracle
from sumo import solve
from sumo.errors import ConvergenceError, DomainError
from sumo.hamiltonian import BasisSpec

class TestEigh(unittest.TestCase):

    def test_symmetry_required(self):
        with self.assertRaises(ValueError):
            solve.eigh(np.array([[1., 2.], [0., 1.]]))
        with self.assertRaises(ValueError):
            solve.eigh(np.ones((2, 3)))

    def test_values(self):
        w, V = solve.eigh(np.array([[2., 1.], [1., 2.]]))
        self.assertTrue(np.allclose(w, [1., 3.]))
        self.assertTrue(np.allclose(V.T @ V, np.eye(2)))

class TestExactSpectra(unittest.TestCase):

    def test_harmonic(self):
        """E = 2 nu + v + 3/2 with zero drift."""
        spec = hamiltonian.harmonic_oscillator(3)
        basis = BasisSpec(N=3, nu_max=20, v_max=3)
        result = solve.solve_central_force(spec, basis, levels=5)
        for v in range(4):
            self.assertTrue(np.allclose(result.eigenvalues[v], 1.5 + v + 2.*np.arange(5), atol=1e-12))
            self.assertLess(np.max(np.abs(result.drift[v])), 1e-12)
        self.assertLess(result.max_drift(), 1e-12)

        levels = result.levels(energy_cut=4.0)
        self.assertEqual(sorted((v, k) for v, k, _, _ in levels), [(0, 0), (0, 1), (1, 0), (2, 0)])
        self.assertEqual(levels[0][:2], (0, 0))
        self.assertEqual(result.nu_max, 20)

    def test_davidson_matched(self):
        spec = hamiltonian.davidson(3, 2.0)
        basis = BasisSpec(N=3, kind=hamiltonian.FIXED, lam=2.5, nu_max=20)
        result = solve.solve_central_force(spec, basis, levels=3)
        self.assertTrue(np.allclose(result.eigenvalues[0], [2.5, 4.5, 6.5], atol=1e-10))

    def test_davidson_mismatched(self):
        """The harmonic lambda converges from above, and only algebraically."""
        spec = hamiltonian.davidson(3, 2.0)
        energies = []
        for nu_max in (20, 60):
            basis = BasisSpec(N=3, kind=hamiltonian.HARMONIC, nu_max=nu_max)
            energies.append(solve.solve_central_force(spec, basis, levels=1, drift_step=0).eigenvalues[0][0])
        self.assertGreater(energies[0], 2.5 - 1e-12)
        self.assertGreater(energies[1], 2.5 - 1e-12)
        self.assertLess(energies[1], energies[0])
        self.assertLess(energies[1] - 2.5, 0.5*(energies[0] - 2.5))

    def test_convergence_study(self):
        spec = hamiltonian.harmonic_oscillator(3)
        table = solve.convergence_study(spec, BasisSpec(N=3), (4, 8, 12), v=1, levels=3)
        self.assertEqual(len(table), 9)
        self.assertTrue(np.all(np.isnan(table['drift'][table['nu_max'] == 4])))
        self.assertLess(np.nanmax(np.abs(table['drift'])), 1e-12)

class TestQuartic(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.spec = hamiltonian.quartic_oscillator(3)

    def test_scale_reduces_basis(self):
        """A scale near the optimum needs fewer states than the oscillator length."""
        sizes = []
        for scale in (1.0, 1.6):
            basis = BasisSpec(N=3, scale=scale)
            n, ref = solve.minimal_basis_size(self.spec, basis, 0, 50., tol=1e-9, nu_reference=150)
            self.assertGreater(len(ref), 3)
            sizes.append(n)
        self.assertLess(sizes[1], sizes[0])

    def test_against_finite_differences(self):
        ref = solve.reference_levels(self.spec, BasisSpec(N=3, scale=1.6), 0, 10., tol=1e-10,
                                     nu_reference=120)
        fd = oracle.fd_radial_eigen(lambda r: r**4, 0.0, k=1)
        self.assertTrue(fd.converged)
        self.assertLess(abs(fd.eigenvalues[0] - ref[0]), 1e-8*abs(ref[0]))

    def test_harmonic_requirement(self):
        ref = solve.reference_levels(self.spec, BasisSpec(N=3, scale=1.6), 0, 5., nu_reference=120)
        n, scale = solve.harmonic_basis_requirement(self.spec, 0, ref[0], rel_tol=0.01)
        self.assertGreaterEqual(n, 1)
        self.assertEqual(scale, 1.0)
        n_opt, scale_opt = solve.harmonic_basis_requirement(self.spec, 0, ref[0], rel_tol=0.01,
                                                            optimize_scale=True)
        self.assertLessEqual(n_opt, n)
        self.assertGreater(scale_opt, 1.0)
        with self.assertRaises(ConvergenceError):
            solve.harmonic_basis_requirement(self.spec, 0, ref[0], rel_tol=1e-8, n_max=1)
        with self.assertRaises(DomainError):
            solve.harmonic_basis_requirement(self.spec, 0, ref[0], scale=0.)

class TestVariational(unittest.TestCase):

    def test_harmonic_optimum(self):
        """lambda* = 3/2, a* = 1 and E = 3/2 for the N = 3 oscillator."""
        opt = solve.variational_optimize(hamiltonian.harmonic_oscillator(3), 0)
        self.assertTrue(np.isclose(opt.energy, 1.5, rtol=1e-7))
        self.assertTrue(np.isclose(opt.lam, 1.5, atol=1e-3))
        self.assertTrue(np.isclose(opt.scale, 1.0, atol=1e-3))
        self.assertEqual(opt.starts, 3)
        self.assertGreater(len(opt.trace), 25)

        excited = solve.excited_expectations(hamiltonian.harmonic_oscillator(3), opt, 3)
        self.assertTrue(np.allclose(excited, [1.5, 3.5, 5.5], atol=1e-3))

    def test_ranges(self):
        spec = hamiltonian.harmonic_oscillator(3)
        with self.assertRaises(DomainError):
            solve.variational_optimize(spec, 0, scale_range=(2.0, 1.0))
        with self.assertRaises(DomainError):
            solve.variational_optimize(spec, 0, lam_range=(0.0, 5.0))

    def test_collective_rotor(self):
        """Deep in the rotor regime lambda* is large and a* close to sqrt(1.5 lambda*)."""
        spec = hamiltonian.collective_model(1.5, 100.)
        opt = solve.variational_optimize(spec, 0)
        self.assertTrue(55. < opt.lam < 75.)
        self.assertTrue(np.isclose(opt.scale, np.sqrt(1.5*opt.lam), rtol=0.05))
        self.assertLess(opt.energy, solve.single_state_energy(spec, 0, np.sqrt(100.), 2.5))

    def test_select_basis(self):
        spec = hamiltonian.collective_model(1.5, 100.)
        candidates = ['harmonic', 30., 57., 80.]
        choice = solve.select_basis(spec, 0, 3, 5, candidates)
        self.assertEqual(len(choice.candidates), 4)
        self.assertEqual(choice.energy, np.min(choice.candidates['energy']))
        self.assertNotEqual(choice.lam, 2.5)
        again = solve.select_basis(spec, 0, 3, 5, candidates[::-1])
        self.assertEqual(again.lam, choice.lam)
        with self.assertRaises(ValueError):
            solve.select_basis(spec, 0, 3, 2, candidates)

        basis, _ = solve.select_parity_pair(spec, 3, 5, candidates, v_max=2)
        self.assertEqual(basis.kind, hamiltonian.PAIR)
        self.assertEqual(basis.lam_odd, choice.lam + 1)
        self.assertEqual(basis.nu_max, 4)

class TestCollectiveRotor(unittest.TestCase):
    """Deformed rotor alpha = 1.5, M = 100 in five dimensions."""

    @classmethod
    def setUpClass(cls):
        cls.spec = hamiltonian.collective_model(1.5, 100.)
        basis = BasisSpec(N=5, kind=hamiltonian.PAIR, lam_even=57., lam_odd=58., scale=10., nu_max=4)
        cls.ground = solve.reference_levels(cls.spec, basis, 0, -31., tol=1e-8, nu_reference=100)[0]

    @staticmethod
    def closed_form(a, lam, M=100., alpha=1.5):
        """<0 0|H|0 0> for N = 5."""
        kinetic = a**2/(2.*M)*(1. + 2.25/(lam - 1.))
        potential = 0.5*M*((1. - 2.*alpha)*lam/a**2 + alpha*lam*(lam + 1.)/a**4)
        return kinetic + potential

    def test_ground_energy(self):
        self.assertTrue(np.isclose(self.ground, -32.3218, atol=1e-3))

    def test_harmonic_basis_is_large(self):
        """At the oscillator length a = sqrt(M) about twenty harmonic states are needed."""
        n, scale = solve.harmonic_basis_requirement(self.spec, 0, self.ground, rel_tol=0.01)
        self.assertEqual(scale, 10.)
        self.assertGreaterEqual(n, 20)

        basis = BasisSpec(N=5, kind=hamiltonian.FIXED, lam=2.5, scale=10., nu_max=n - 1)
        E = solve.solve_central_force(self.spec, basis, levels=1, drift_step=0).eigenvalues[0][0]
        self.assertLessEqual(E - self.ground, 0.01*abs(self.ground))

    def test_single_state_energy(self):
        for a, lam in ((10., 57.), (9.5, 66.), (12., 2.5)):
            self.assertTrue(np.isclose(solve.single_state_energy(self.spec, 0, a, lam),
                                       self.closed_form(a, lam), rtol=1e-10))

    def test_variational_against_grid(self):
        lams = np.arange(40., 90.0001, 0.05)
        scales = np.arange(8., 12.0001, 0.005)
        E = self.closed_form(scales[None, :], lams[:, None])
        i, j = np.unravel_index(np.argmin(E), E.shape)

        opt = solve.variational_optimize(self.spec, 0)
        self.assertTrue(np.isclose(opt.energy, E[i, j], rtol=1e-6))
        self.assertLessEqual(opt.energy, E[i, j] + 1e-9*abs(E[i, j]))
        self.assertLess(abs(opt.lam - lams[i]), 1.)
        self.assertLess(abs(opt.scale - scales[j]), 0.2)
        self.assertTrue(62. < opt.lam < 70.)

    def test_select_basis_dense(self):
        """Three lowest states in five: the best lambda is near 66, not at the range edge."""
        choice = solve.select_basis(self.spec, 0, 3, 5, range(45, 76))
        self.assertEqual(len(choice.candidates), 31)
        self.assertTrue(63. <= choice.lam <= 69.)
        self.assertTrue(9. < choice.scale < 12.)
        energies = np.array(choice.candidates['energy'])
        self.assertEqual(choice.energy, energies.min())
        self.assertGreater(energies[0], choice.energy)
        self.assertGreater(energies[-1], choice.energy)

    def test_single_state_per_v(self):
        """One optimized state per v is within 1% of the 100-state energy."""
        for v in range(7):
            opt = solve.variational_optimize(self.spec, v)
            H = hamiltonian.build_central_force_block(self.spec, opt.basis(5, nu_max=99), v)
            exact = solve.eigh(H)[0][0]
            self.assertGreaterEqual(opt.energy, exact - 1e-9*abs(exact))
            self.assertLessEqual(opt.energy - exact, 0.01*abs(exact))

    def test_parity_pair_three_levels(self):
        """The 5-state pair basis holds the three lowest levels of every v <= 6 to 2%."""
        basis, _ = solve.select_parity_pair(self.spec, 3, 5, range(45, 76), v_max=6)
        small = solve.solve_central_force(self.spec, basis, levels=3, drift_step=0)
        big = solve.solve_central_force(self.spec, basis.resized(99), levels=3, drift_step=0)
        for v in range(7):
            exact = big.eigenvalues[v]
            self.assertEqual(len(small.eigenvalues[v]), 3)
            self.assertTrue(np.all(small.eigenvalues[v] >= exact - 1e-9*np.abs(exact)))
            self.assertTrue(np.all(small.eigenvalues[v] - exact <= 0.02*np.abs(exact)))

class TestScan(unittest.TestCase):

    def test_scan(self):
        table = solve.scan_collective([1.0, 0.0], num_cpus=1)
        self.assertEqual(list(table.colnames), list(solve.SCAN_COLUMNS))
        self.assertEqual(list(table['alpha']), [0.0, 1.0])

        vibrator = table[0]
        self.assertTrue(np.isclose(vibrator['scale_over_sqrt_mass'], 1.0, atol=1e-3))
        self.assertTrue(np.isclose(vibrator['variational'], 2.5, rtol=1e-7))
        self.assertLess(abs(vibrator['discrepancy']), 1e-6)
        self.assertEqual(vibrator['potential_minimum'], 0.)

        rotor = table[1]
        self.assertTrue(0. <= rotor['discrepancy'] <= 0.05)
        self.assertTrue(np.isclose(rotor['potential_minimum'], np.sqrt(0.5)))
        for row in table:
            self.assertLess(abs(row['drift']), 1e-8*max(abs(row['diagonalized']), 1.))

if __name__ == '__main__':
    unittest.main()
