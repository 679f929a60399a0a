"""
Tests for the groups module.
"""

import random
import unittest
import warnings
from fractions import Fraction

from deltajet.errors import BadReduction, NotOrdinary, PNotInDomain, PrecisionLossWarning
from deltajet.groups import (
    X011,
    EllipticCurveData,
    additive_formal_group,
    check_kernel_law,
    count_points_ap,
    dpsi_identity,
    elliptic_delta_character,
    elliptic_formal_group,
    gm_delta_character,
    hasse_bound_ok,
    kernel_law,
    lift_point,
    multiplicative_formal_group,
    psi_star,
    series_inverse,
    series_mul,
    series_reversion,
    weierstrass_omega,
)
from deltajet.padic import PadicCtx, teichmuller


class TestSeries(unittest.TestCase):
    """Test univariate series helpers."""

    def test_inverse(self):
        """Test (1 - q) * (1 + q + q^2 + ...) = 1."""
        inv = series_inverse([1, -1], 6)
        self.assertEqual(inv, [1] * 7)
        self.assertEqual(series_mul([1, -1], inv, 6), [1] + [0] * 6)

    def test_reversion(self):
        """Test that log(1+T) and exp(T)-1 are inverse."""
        log = [Fraction(0)] + [Fraction((-1) ** (n - 1), n) for n in range(1, 8)]
        exp = series_reversion(log, 7)
        self.assertEqual(exp[2], Fraction(1, 2))
        self.assertEqual(exp[3], Fraction(1, 6))


class TestFormalGroups(unittest.TestCase):
    """Test formal group laws and their logarithms."""

    def test_multiplicative_log(self):
        """Test ℓ(F(T1, T2)) = ℓ(T1) + ℓ(T2) for G_m."""
        self.assertTrue(multiplicative_formal_group(5, 8).log_check(4))

    def test_elliptic_log(self):
        """Test the logarithm of the X_0(11) formal group."""
        F = elliptic_formal_group(X011["a4"], X011["a6"], 5, 8)
        self.assertTrue(F.log_check(3))

    def test_omega_starts_at_one(self):
        """Test ω(T) = 1 + O(T^4) for a short Weierstrass model."""
        omega = weierstrass_omega(X011["a4"], X011["a6"], 6)
        self.assertEqual(omega[0], 1)
        self.assertEqual(omega[1:4], [0, 0, 0])


class TestKernelLaws(unittest.TestCase):
    """Test kernel laws of jet projections."""

    def test_additive(self):
        """Test that the order-1 kernel law of G_a is T1' + T2'."""
        law = kernel_law(additive_formal_group(5, 6), 1)
        ring = law.ring
        self.assertEqual(law.components[0], ring.var("T1", 1) + ring.var("T2", 1))

    def test_multiplicative(self):
        """Test associativity and units for G_m."""
        law = kernel_law(multiplicative_formal_group(3, 6), 1, degree=6)
        self.assertEqual(check_kernel_law(law), {"associative": True, "unital": True})

    def test_elliptic(self):
        """Test associativity and units for X_0(11) at p = 5."""
        F = elliptic_formal_group(X011["a4"], X011["a6"], 5, 6)
        law = kernel_law(F, 1, degree=6)
        checks = check_kernel_law(law)
        self.assertTrue(checks["associative"])
        self.assertTrue(checks["unital"])


class TestEllipticCurves(unittest.TestCase):
    """Test point counts and curve data."""

    def test_traces_of_x011(self):
        """Test a_p of X_0(11) by point counting."""
        expected = {5: 1, 7: -2, 13: 4, 17: -2, 19: 0, 23: -1, 29: 0, 31: 7}
        for p, a_p in expected.items():
            self.assertEqual(count_points_ap(X011["a4"], X011["a6"], p), a_p)
            self.assertTrue(hasse_bound_ok(a_p, p))

    def test_bad_reduction(self):
        """Test that p = 3 and p = 11 are refused for this model."""
        for p in (2, 3, 11):
            with self.assertRaises(BadReduction):
                EllipticCurveData(X011["a4"], X011["a6"], p)

    def test_ordinary(self):
        """Test the ordinary flag."""
        self.assertTrue(EllipticCurveData(X011["a4"], X011["a6"], 7).is_ordinary)
        self.assertFalse(EllipticCurveData(X011["a4"], X011["a6"], 19).is_ordinary)

    def test_lift_point(self):
        """Test Hensel lifting onto the curve."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 7)
        ctx = PadicCtx(7, 8)
        lifted = 0
        for x in range(7):
            try:
                P = lift_point(curve, ctx, x)
            except PNotInDomain:
                continue
            self.assertTrue(P.on_curve())
            lifted += 1
        self.assertGreater(lifted, 0)


class TestMultiplicativeCharacter(unittest.TestCase):
    """Test the δ-character of G_m."""

    def test_coefficients(self):
        """Test the coefficients (-1)^(n-1) p^(n-1)/n."""
        p = 5
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionLossWarning)
            psi = gm_delta_character(p, 10, 12)
        for n in range(1, 11):
            expected = Fraction((-1) ** (n - 1) * p ** (n - 1), n)
            got = psi.coefficient((n,))
            difference = got - expected
            self.assertEqual((difference.numerator % p ** 6) if difference else 0, 0)

    def test_additive_on_units(self):
        """Test ψ(αβ) = ψ(α) + ψ(β) on random units."""
        p = 5
        ctx = PadicCtx(p, 12)
        psi = gm_delta_character(p, 32, 12)
        rng = random.Random(5)
        for _ in range(15):
            a = ctx.random_element(rng, unit=True)
            b = ctx.random_element(rng, unit=True)
            self.assertTrue(psi_star(psi, a * b).equals(psi_star(psi, a) + psi_star(psi, b)))

    def test_kills_roots_of_unity(self):
        """Test ψ(ζ) = 0 for Teichmüller units."""
        ctx = PadicCtx(5, 10)
        psi = gm_delta_character(5, 32, 10)
        self.assertTrue(psi_star(psi, teichmuller(ctx, 2)).is_zero())

    def test_truncation_warning(self):
        """Test that a short truncation warns about lost digits."""
        with self.assertWarns(PrecisionLossWarning):
            gm_delta_character(5, 3, 12)


class TestEllipticCharacter(unittest.TestCase):
    """Test the order-2 δ-character of an ordinary curve."""

    def setUp(self):
        """Set up test fixtures."""
        self.curve = EllipticCurveData(X011["a4"], X011["a6"], 5)

    def test_integral_and_identity(self):
        """Test p·dψ = (φ*² - a_p φ* + p)ω to small degree."""
        psi = elliptic_delta_character(self.curve, truncation=8, precision=6, jet_degree=6)
        self.assertTrue(psi.series.is_integral())
        report = dpsi_identity(psi, 7)
        self.assertTrue(report.holds)

    def test_supersingular_refused(self):
        """Test that a_p ≡ 0 mod p is refused."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 19)
        with self.assertRaises(NotOrdinary):
            elliptic_delta_character(curve, truncation=4)

    def test_homomorphism_on_points(self):
        """Test ψ(P + Q) = ψ(P) + ψ(Q) on lifted points."""
        psi = elliptic_delta_character(self.curve, truncation=8, precision=6, jet_degree=6)
        ctx = PadicCtx(5, 8)
        points = []
        for x in range(5):
            try:
                points.append(lift_point(self.curve, ctx, x))
            except Exception:
                continue
        P, Q = points[0], points[-1]
        left = psi_star(psi, (P + Q).normalized())
        right = psi_star(psi, P) + psi_star(psi, Q)
        self.assertTrue(left.equals(right, 3))


if __name__ == '__main__':
    unittest.main()
