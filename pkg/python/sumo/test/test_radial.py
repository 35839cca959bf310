# -*- coding: utf-8 -*-
"""Unit tests of the radial matrix elements.
"""
import unittest

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_genlaguerre, gamma

from sumo import oracle
from sumo import radial
from sumo.errors import DomainError, PairingError
from sumo.radial import LOWER, RAISE, RadialBasis

class TestRadialBasis(unittest.TestCase):

    def test_validation(self):
        """lambda and scale must be positive, nu_max a non-negative integer."""
        with self.assertRaises(DomainError):
            RadialBasis(lam=0.0)
        with self.assertRaises(DomainError):
            RadialBasis(lam=1.5, scale=-1.0)
        with self.assertRaises(DomainError):
            RadialBasis(lam=1.5, nu_max=-1)

    def test_laguerre(self):
        """Recurrence agrees with scipy's generalized Laguerre polynomials."""
        x = np.linspace(0., 10., 41)
        L = radial.laguerre(12, 1.5, x)
        for n in range(13):
            self.assertTrue(np.allclose(L[n], eval_genlaguerre(n, 1.5, x), rtol=1e-9, atol=1e-9))

    def test_wavefunction_value(self):
        """R^{3/2}_0(x) = sqrt(2/Gamma(3/2)) x exp(-x^2/2)."""
        basis = RadialBasis(lam=1.5, nu_max=0)
        expected = np.sqrt(2./gamma(1.5))*np.exp(-0.5)
        self.assertTrue(np.isclose(radial.eval_radial_wavefunction(basis, 0, 1.0), expected))
        self.assertEqual(radial.eval_radial_wavefunction(basis, 0, 0.0), 0.0)

    def test_wavefunction_examples(self):
        """lambda = 1/2 is sqrt(2) times the even oscillator state; lambda = 5/2 carries (-1)^nu."""
        half = RadialBasis(lam=0.5, nu_max=0)
        expected = np.sqrt(2.)*np.pi**-0.25*np.exp(-0.245)
        self.assertTrue(np.isclose(radial.eval_radial_wavefunction(half, 0, 0.7), expected, rtol=1e-12))
        self.assertTrue(np.isclose(expected, 0.83143, atol=1e-5))

        basis = RadialBasis(lam=2.5, scale=1.0, nu_max=1)
        self.assertTrue(np.isclose(oracle.laguerre_series(1, 1.5, 1.0), 1.5))
        expected = -np.sqrt(2./gamma(3.5))*oracle.laguerre_series(1, 1.5, 1.0)*np.exp(-0.5)
        self.assertTrue(np.isclose(radial.eval_radial_wavefunction(basis, 1, 1.0), expected, rtol=1e-12))
        self.assertTrue(np.isclose(radial.eval_radial_wavefunction(basis, 1, 1.0),
                                   -np.sqrt(2./gamma(3.5))*1.5*np.exp(-0.5), rtol=1e-12))

    def test_wavefunction_orthonormal(self):
        """Scaled wave functions are orthonormal on L^2(R+, dr)."""
        basis = RadialBasis(lam=2.5, scale=1.7, nu_max=3)
        f = lambda r, m, n: (radial.eval_radial_wavefunction(basis, m, r)
                             *radial.eval_radial_wavefunction(basis, n, r))
        for m, n in ((0, 0), (3, 3), (1, 2), (0, 3)):
            value = quad(f, 0., np.inf, args=(m, n), epsabs=1e-12)[0]
            self.assertTrue(np.isclose(value, 1.0 if m == n else 0.0, atol=1e-8))

    def test_wavefunction_domain(self):
        basis = RadialBasis(lam=2.5, nu_max=2)
        with self.assertRaises(DomainError):
            radial.eval_radial_wavefunction(basis, 3, 1.0)
        with self.assertRaises(DomainError):
            radial.eval_radial_wavefunction(basis, 0, -1.0)

class TestSameLambda(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.basis = RadialBasis(lam=2.5, nu_max=10)

    def test_r2(self):
        """r^2 has diagonal lam + 2 nu and off-diagonal sqrt((lam+nu)(nu+1))."""
        op = radial.me_r2(self.basis)
        self.assertTrue(op.exact_within_truncation)
        self.assertTrue(op.is_symmetric())
        self.assertTrue(np.isclose(op.entries[3, 3], 2.5 + 6.))
        self.assertTrue(np.isclose(op.entries[4, 3], np.sqrt(5.5*4.)))
        self.assertEqual(op.entries[5, 3], 0.)

    def test_entries_read_only(self):
        op = radial.me_r2(self.basis)
        with self.assertRaises(ValueError):
            op.entries[0, 0] = 1.

    def test_rescale(self):
        """An operator of length degree k scales as a^-k."""
        at_two = radial.me_r2(self.basis.rescaled(2.0))
        self.assertTrue(np.allclose(at_two.entries, radial.me_r2(self.basis).entries/4.))
        self.assertEqual(at_two.source.scale, 2.0)
        back = radial.rescale(at_two, 1.0)
        self.assertTrue(np.allclose(back.entries, radial.me_r2(self.basis).entries))

    def test_inv_r2_inverts_r2(self):
        """r^2 times 1/r^2 is the identity away from the truncation edge."""
        prod = radial.me_r2(self.basis).entries[:-1] @ radial.me_inv_r2(self.basis).entries
        self.assertTrue(np.allclose(prod, np.eye(11)[:-1], atol=1e-12))

    def test_inv_r2_domain(self):
        with self.assertRaises(DomainError):
            radial.me_inv_r2(RadialBasis(lam=1.0, nu_max=3))
        with self.assertRaises(DomainError):
            radial.me_inv_r2(RadialBasis(lam=0.8, nu_max=3))

    def test_d2dr2_special_lambdas(self):
        """For lam = 1/2 and 3/2 d^2/dr^2 is tridiagonal and exact."""
        for lam in (0.5, 1.5):
            op = radial.me_d2dr2(RadialBasis(lam=lam, nu_max=6))
            self.assertTrue(op.exact_within_truncation)
            self.assertTrue(np.allclose(np.triu(op.entries, k=2), 0.))

    def test_harmonic_laplacian(self):
        """(-nabla^2 + r^2)/2 is diag(lam + 2 nu) for lam = v + N/2."""
        for N, v in ((3, 0), (3, 2), (5, 1)):
            basis = RadialBasis(lam=v + 0.5*N, nu_max=8)
            lap = radial.me_laplacian_radial(basis, N, v)
            self.assertTrue(lap.exact_within_truncation)
            H = 0.5*(-lap.entries + radial.me_r2(basis).entries)
            self.assertTrue(np.allclose(H, np.diag(basis.lam + 2.*basis.nu), atol=1e-12))

    def test_davidson_laplacian(self):
        """(-nabla^2 + r^2 + 2/r^2)/2 is diagonal in the lam = 5/2, N = 3, v = 0 basis."""
        lap = radial.me_laplacian_radial(self.basis, 3, 0)
        H = 0.5*(-lap.entries + radial.me_r2(self.basis).entries
                 + 2.*radial.me_inv_r2(self.basis).entries)
        self.assertTrue(np.allclose(H, np.diag(2.5 + 2.*self.basis.nu), atol=1e-10))

    def test_su11_casimir(self):
        gens = radial.su11_generators(RadialBasis(lam=7.0, nu_max=10))
        self.assertTrue(np.allclose(gens.casimir(), 0.25*7.*5.*np.eye(11), atol=1e-10))

class TestLambdaChanging(unittest.TestCase):

    def test_r_values(self):
        basis = RadialBasis(lam=2.5, nu_max=3)
        up = radial.me_r(basis, RAISE)
        self.assertEqual(up.target.lam, 3.5)
        self.assertTrue(np.isclose(up.entries[0, 0], np.sqrt(2.5)))
        self.assertTrue(np.isclose(up.entries[0, 1], 1.))
        self.assertTrue(np.isclose(up.entries[1, 1], np.sqrt(3.5)))
        down = radial.me_r(basis, LOWER)
        self.assertEqual(down.target.lam, 1.5)
        self.assertTrue(np.isclose(down.entries[0, 0], np.sqrt(1.5)))
        self.assertTrue(np.isclose(down.entries[1, 0], 1.))

    def test_r_squared_through_pair(self):
        """r (lower) after r (raise) reproduces r^2."""
        basis = RadialBasis(lam=2.5, nu_max=8)
        prod = radial.me_r(basis.shifted(1), LOWER) @ radial.me_r(basis, RAISE)
        self.assertTrue(np.allclose(prod.entries[:-1, :-1], radial.me_r2(basis).entries[:-1, :-1]))
        self.assertEqual(prod.degree, 2)

    def test_compose_mismatch(self):
        basis = RadialBasis(lam=2.5, nu_max=3)
        with self.assertRaises(PairingError):
            radial.me_r2(basis) @ radial.me_r(basis, RAISE)

    def test_ddr_anti_hermitian(self):
        """<lam+1|d/dr|lam> = -<lam|d/dr|lam+1>^T."""
        for lam in (1.2, 2.5, 7.3):
            basis = RadialBasis(lam=lam, nu_max=12)
            up = radial.me_ddr(basis, RAISE).entries
            down = radial.me_ddr(basis.shifted(1), LOWER).entries
            self.assertTrue(np.allclose(up, -down.T, atol=1e-12))

    def test_factorization_shifts(self):
        """A and A^dagger with matched arguments are diagonal or single off-diagonal."""
        for lam in (2.5, 7.3):
            basis = RadialBasis(lam=lam, nu_max=10)
            nu = basis.nu

            m = radial.me_factorization(basis, lam - 0.5, RAISE, dagger=True).entries
            self.assertTrue(np.allclose(m, np.diag(2.*np.sqrt(lam + nu)), atol=1e-10))

            m = radial.me_factorization(basis, lam - 1.5, LOWER).entries
            self.assertTrue(np.allclose(m, np.diag(2.*np.sqrt(lam + nu - 1)), atol=1e-10))

            m = radial.me_factorization(basis, -lam + 1.5, LOWER, dagger=True).entries
            expected = np.zeros((11, 11))
            expected[nu[1:], nu[:-1]] = 2.*np.sqrt(nu[:-1] + 1)
            self.assertTrue(np.allclose(m, expected, atol=1e-10))

            m = radial.me_factorization(basis, -lam + 0.5, RAISE).entries
            expected = np.zeros((11, 11))
            expected[nu[:-1], nu[1:]] = 2.*np.sqrt(nu[1:])
            self.assertTrue(np.allclose(m, expected, atol=1e-10))

    def test_inv_r_lower_truncation(self):
        """Lowering 1/r is a finite expansion: entries do not depend on nu_max."""
        small = radial.me_inv_r(RadialBasis(lam=4.2, nu_max=5), LOWER)
        large = radial.me_inv_r(RadialBasis(lam=4.2, nu_max=12), LOWER)
        self.assertTrue(np.allclose(small.entries, large.entries[:6, :6]))
        self.assertFalse(small.exact_within_truncation)

    def test_lowering_domain(self):
        basis = RadialBasis(lam=0.8, nu_max=3)
        with self.assertRaises(DomainError):
            radial.me_r(basis, LOWER)
        with self.assertRaises(DomainError):
            radial.me_ddr(basis, LOWER)
        with self.assertRaises(DomainError):
            radial.me_inv_r(basis, RAISE)
        with self.assertRaises(ValueError):
            radial.me_r(basis, 'sideways')

    def test_mixed_degree_rescale(self):
        """A(X) mixes length degrees and cannot be rescaled."""
        op = radial.me_factorization(RadialBasis(lam=2.5, nu_max=3), 1.0, RAISE)
        self.assertIsNone(op.degree)
        with self.assertRaises(ValueError):
            radial.rescale(op, 2.0)

if __name__ == '__main__':
    unittest.main()
