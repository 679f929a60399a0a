"""
Tests for the dseries module.
"""

import os
import tempfile
import unittest
from fractions import Fraction
from unittest import mock

from deltajet.config import Settings
from deltajet.errors import (
    ContextMismatch,
    DegreeBoundExceeded,
    DomainError,
    InsufficientPrecision,
    IntegralityFailure,
    NotOrdinary,
    TruncationOverflow,
)
from deltajet.dseries import (
    DeltaSeries,
    NewformData,
    classical_hecke,
    delta_on_series,
    dump_series,
    eta_product,
    f1_series,
    formal_sum_series,
    fourier_part,
    fsharp_expansion,
    fsharp_formula,
    hecke_pTm,
    is_delta_p_symmetric,
    is_primitive,
    load_series,
    modular_parametrization,
    newform_from_traces,
    psi_on_series,
    symmetric_solve,
    u_operator,
)
from deltajet.groups import X011, EllipticCurveData

X011_TRACES = {2: -2, 3: -1, 11: 1}


def x011_newform(K):
    return newform_from_traces(X011["a4"], X011["a6"], K, 11, X011_TRACES, "11a")


class TestDeltaSeries(unittest.TestCase):
    """Test truncated series in q, q', ..."""

    def test_printing(self):
        """Test the text form."""
        s = DeltaSeries.q(5, 1, 4, 2, 3) - 2 * DeltaSeries.q(5, 1, 4, 2, 3, order=1)
        self.assertEqual(str(s), "-2*q' + q + O(q^5)")
        self.assertEqual(str(DeltaSeries.zero(5, 1, 4, 2, 3)), "0 + O(q^5)")

    def test_caps(self):
        """Test that terms beyond M and D are dropped."""
        s = DeltaSeries(3, 1, 4, 2, 2, {(5, (0,)): 1, (0, (3,)): 1, (1, (1,)): 7})
        self.assertEqual(s.terms, {(1, (1,)): -2})

    def test_product_cap(self):
        """Test that q * q keeps q^2."""
        q = DeltaSeries.q(5, 0, 6, 2, 2)
        self.assertEqual((q * q).coefficient(2), 1)

    def test_context_mismatch(self):
        """Test that series over different primes do not combine."""
        with self.assertRaises(ContextMismatch):
            DeltaSeries.q(5, 1, 4, 2, 2) + DeltaSeries.q(3, 1, 4, 2, 2)

    def test_json_round_trip(self):
        """Test that a dumped series loads back."""
        s = f1_series(5, M=4, D=3, prec=3)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "f1.json")
            dump_series(s, path)
            t = load_series(path)
        self.assertEqual(t, s)
        self.assertEqual(s.to_json()["header"]["mode"], "padic")


class TestDeltaOnSeries(unittest.TestCase):
    """Test φ and δ on series."""

    def test_delta_q(self):
        """Test δq = q'."""
        q = DeltaSeries.q(3, 1, 10, 3, 4)
        dq = delta_on_series(q)
        self.assertEqual(dq.prec, 3)
        self.assertEqual(dq, DeltaSeries.q(3, 1, 10, 3, 3, order=1))

    def test_delta_constant(self):
        """Test δ(2) = -6 at p = 5."""
        two = DeltaSeries.constant(2, 5, 0, 5, 2, 4)
        self.assertEqual(delta_on_series(two).coefficient(0), -6)

    def test_needs_precision(self):
        """Test that δ refuses mod-p series."""
        with self.assertRaises(InsufficientPrecision):
            delta_on_series(DeltaSeries.q(3, 1, 10, 3, 1))


class TestF1(unittest.TestCase):
    """Test f¹ = Σ (-1)^(n-1) p^(n-1)/n (q'/q^p)^n."""

    def test_coefficients(self):
        """Test the first coefficients at p = 5."""
        p, prec = 5, 4
        f1 = f1_series(p, M=4, D=5, prec=prec)
        mod = p ** prec
        self.assertEqual(f1.coefficient(-5, (1,)), 1)
        self.assertEqual((2 * f1.coefficient(-10, (2,)) + 5) % mod, 0)
        self.assertEqual(f1.coefficient(-25, (5,)), 125)

    def test_primitive(self):
        """Test that f¹ has no q-part for U to see."""
        self.assertTrue(is_primitive(f1_series(5, M=4, D=3, prec=3)))
        self.assertTrue(fourier_part(f1_series(5, M=4, D=3, prec=3)).is_zero())

    def test_u_operator(self):
        """Test U(q^5 + q^7) = q at p = 5."""
        s = DeltaSeries(5, 0, 10, 1, 2, {(5, ()): 1, (7, ()): 1})
        self.assertEqual(u_operator(s).terms, {(1, ()): 1})
        with self.assertRaises(ValueError):
            u_operator(f1_series(5, M=4, D=3, prec=3))


class TestNewforms(unittest.TestCase):
    """Test newform coefficients for X_0(11)."""

    def test_eta_product(self):
        """Test η(q)^2 η(q^11)^2 against the prime traces."""
        K = 30
        coefficients = eta_product({1: 2, 11: 2}, K)
        self.assertEqual(tuple(coefficients[1:]), x011_newform(K).coefficients)
        self.assertEqual(coefficients[1:6], [1, -2, -1, 2, 1])

    def test_structure(self):
        """Test multiplicativity, Hasse bounds and the T(2) eigenvalue."""
        newform = x011_newform(30)
        self.assertTrue(newform.check_multiplicativity())
        self.assertTrue(newform.check_hasse())
        series = [0] + list(newform.coefficients[:20])
        self.assertEqual(classical_hecke(series, 2), [-2 * c for c in series[:11]])

    def test_normalization(self):
        """Test that a_1 must be 1 and only K coefficients are known."""
        with self.assertRaises(DomainError):
            NewformData((2, 1), 11)
        with self.assertRaises(TruncationOverflow):
            x011_newform(5).a(6)

    def test_missing_trace(self):
        """Test that a_2 cannot be counted on a short model."""
        with self.assertRaises(DomainError):
            newform_from_traces(X011["a4"], X011["a6"], 5, 11)


class TestFSharp(unittest.TestCase):
    """Test the δ-modular form attached to an ordinary curve."""

    def test_formula_matches_construction(self):
        """Test agreement at p = 5 for X_0(11)."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
        report = fsharp_expansion(curve, x011_newform(15), qdeg=10, D=5)
        self.assertTrue(report.agree, str(report.difference))
        self.assertEqual(report.formula.coefficient(0, (1, 0)), -1)
        self.assertEqual(report.formula.coefficient(5, (1, 0)), 2)
        self.assertEqual(report.formula.coefficient(0, (5, 0)), 1)

    def test_agreement_at_seven(self):
        """Test agreement at p = 7 through q^20."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 7)
        report = fsharp_expansion(curve, x011_newform(20), qdeg=20, D=7)
        self.assertTrue(report.agree, str(report.difference))
        self.assertEqual(report.construction.coefficient(0, (1, 0)), 2)
        self.assertEqual(report.construction.coefficient(1), 1)

    def test_construction_evaluates_character(self):
        """Test that the construction goes through the elliptic δ-character."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
        failing = mock.patch("deltajet.dseries.elliptic_delta_character",
                             side_effect=IntegralityFailure("character unavailable"))
        with failing, self.assertRaises(IntegralityFailure):
            fsharp_expansion(curve, x011_newform(15), qdeg=10, D=5)

    def test_construction_is_additive(self):
        """Test ψ(F(t, q)) = ψ(t) + ψ(q) for the formal group law of X_0(11)."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
        t = modular_parametrization(curve, x011_newform(10), 10).t
        q = [Fraction(0), Fraction(1)] + [Fraction(0)] * 9
        total = formal_sum_series(curve, t, q, 10)
        self.assertTrue(all(c.denominator % 5 for c in total))
        lhs = psi_on_series(curve, total, qdeg=10, D=5)
        rhs = psi_on_series(curve, t, qdeg=10, D=5) + psi_on_series(curve, q, qdeg=10, D=5)
        self.assertFalse(lhs.is_zero())
        self.assertTrue((lhs - rhs).is_zero(), str(lhs - rhs))

    def test_non_integral_parameter(self):
        """Test that t(q) with p in a denominator is refused."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
        with self.assertRaises(DomainError):
            psi_on_series(curve, [Fraction(0), Fraction(1), Fraction(1, 5), Fraction(0)], qdeg=3, D=2)

    def test_supersingular_formula(self):
        """Test that the middle term disappears when a_p = 0."""
        f = fsharp_formula(x011_newform(5), 19, 0, qdeg=5, D=19)
        self.assertEqual(f.coefficient(0, (1, 0)), 0)
        self.assertEqual(f.coefficient(0, (19, 0)), 1)
        self.assertEqual(f.coefficient(1), 1)

    def test_refusals(self):
        """Test supersingular primes and short newforms."""
        with self.assertRaises(NotOrdinary):
            fsharp_expansion(EllipticCurveData(X011["a4"], X011["a6"], 19), x011_newform(20), 10)
        curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
        with self.assertRaises(TruncationOverflow):
            fsharp_expansion(curve, x011_newform(8), qdeg=10)


class TestHecke(unittest.TestCase):
    """Test the mod-p operator built from symmetric δ-functions."""

    def test_q_to_q_power(self):
        """Test q -> q^p."""
        for p in (2, 3, 5):
            q = DeltaSeries.q(p, 0, p * p, p, 1)
            self.assertEqual(hecke_pTm(q, 0).terms, {(p, ()): 1})
            self.assertTrue(hecke_pTm(q, 1).is_zero())

    def test_q_squared(self):
        """Test q^2 -> q^4 at p = 2."""
        s = DeltaSeries(2, 0, 8, 4, 1, {(2, ()): 1})
        self.assertEqual(hecke_pTm(s, 0).terms, {(4, ()): 1})

    def test_constant(self):
        """Test that constants survive only for m = 0."""
        c = DeltaSeries.constant(2, 5, 0, 5, 1, 1)
        self.assertEqual(hecke_pTm(c, 0).coefficient(0), 2)
        self.assertTrue(hecke_pTm(c, 2).is_zero())

    def test_jet_variable(self):
        """Test q' -> q at p = 2, through Σ x_i' = s_1' + s_2."""
        qp = DeltaSeries.q(2, 1, 4, 2, 1, order=1)
        solution = symmetric_solve(qp)
        self.assertEqual(solution, {(((1, 1), 1),): 1, (((2, 0), 1),): 1})
        self.assertTrue(is_delta_p_symmetric(qp))
        self.assertEqual(hecke_pTm(qp, 1).terms, {(1, (0,)): 1})

    def test_linearity(self):
        """Test that the operator is additive."""
        q = DeltaSeries.q(2, 1, 4, 2, 1)
        qp = DeltaSeries.q(2, 1, 4, 2, 1, order=1)
        together = hecke_pTm(q + qp, 0)
        self.assertEqual(together, hecke_pTm(q, 0) + hecke_pTm(qp, 0))
        self.assertEqual(together.terms, {(1, (0,)): 1, (2, (0,)): 1})

    def test_refusals(self):
        """Test Laurent input and the unknowns cap."""
        with self.assertRaises(ValueError):
            symmetric_solve(f1_series(2, M=4, D=2, prec=1))
        qp = DeltaSeries.q(2, 1, 4, 2, 1, order=1)
        with self.assertRaises(DegreeBoundExceeded):
            symmetric_solve(qp, Settings(linear_unknowns_cap=1))


if __name__ == '__main__':
    unittest.main()
