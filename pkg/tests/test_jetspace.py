"""
Tests for the jetspace module.
"""

import json
import os
import random
import tempfile
import unittest

from deltajet.config import Settings
from deltajet.errors import CapExceeded, InsufficientPrecision, NotOnScheme, ParseError
from deltajet.groups import EllipticCurveData, X011, random_point
from deltajet.jetspace import (
    SchemePresentation,
    build_jet,
    check_limit_generators,
    dump_scheme,
    fibration_check,
    ideal_membership_mod_p,
    jet_of_point,
    load_scheme,
    pi_idempotency_check,
    torsion_scheme,
)
from deltajet.padic import PadicCtx
from deltajet.witt import witt_presentation


def multiplicative_group(p):
    return SchemePresentation.from_text(p, ["x", "y"], ["x*y - 1"], "G_m")


class TestBuildJet(unittest.TestCase):
    """Test presentations of jet spaces."""

    def test_relations_per_order(self):
        """Test that J^n has (n+1) times the relations of X."""
        X = multiplicative_group(5)
        for n in range(3):
            J = build_jet(X, n)
            self.assertEqual(len(J.relations), n + 1)
            self.assertEqual(len(J.variable_names), 2 * (n + 1))

    def test_orders_extend(self):
        """Test that J^(n+1) starts with the relations of J^n."""
        X = multiplicative_group(3)
        low, high = build_jet(X, 1), build_jet(X, 2)
        for f, g in zip(low.relations, high.relations):
            self.assertEqual(str(f), str(g))

    def test_mu2_first_jet(self):
        """Test the two relations of the first jet space of μ_2 at p = 2."""
        J = build_jet(torsion_scheme(2, 1), 1)
        self.assertEqual(len(J.relations), 2)
        self.assertEqual(J.relation(0, 0), J.ring.parse("x^2 + 2*x"))

    def test_empty_relations(self):
        """Test the affine line: no relations at any order."""
        X = SchemePresentation.from_text(5, ["x"], [], "A1")
        self.assertEqual(build_jet(X, 2).relations, ())

    def test_malformed_relation(self):
        """Test that parse errors surface."""
        with self.assertRaises(ParseError):
            SchemePresentation.from_text(5, ["x"], ["x**2"])


class TestJetOfPoint(unittest.TestCase):
    """Test jets of points against the jet relations."""

    def check_points(self, X, points, n):
        J = build_jet(X, n)
        for alpha in points:
            jet = jet_of_point(X, n, alpha)
            for f in J.relations:
                self.assertTrue(f.evaluate(list(jet)).is_zero())

    def test_multiplicative_group(self):
        """Test jets of units on G_m."""
        for p in (5, 7):
            ctx = PadicCtx(p, 10)
            rng = random.Random(p)
            points = []
            for _ in range(20):
                a = ctx.random_element(rng, unit=True)
                points.append([a, a.inverse()])
            self.check_points(multiplicative_group(p), points, 2)

    def test_additive_group(self):
        """Test jets on the affine line."""
        ctx = PadicCtx(5, 10)
        rng = random.Random(2)
        X = SchemePresentation.from_text(5, ["x"], [], "G_a")
        self.check_points(X, [[ctx.random_element(rng)] for _ in range(20)], 3)

    def test_elliptic_chart(self):
        """Test jets of points on the affine chart of a curve."""
        curve = EllipticCurveData(X011["a4"], X011["a6"], 7)
        X = SchemePresentation.from_text(
            7, ["x", "y"], [f"y^2 - x^3 + {-curve.a4}*x + {-curve.a6}"], "E")
        ctx = PadicCtx(7, 10)
        rng = random.Random(5)
        points = []
        for _ in range(10):
            P = random_point(curve, ctx, rng)
            points.append([P.X, P.Y])
        self.check_points(X, points, 1)

    def test_precision(self):
        """Test precision bookkeeping and its failure."""
        X = multiplicative_group(5)
        ctx = PadicCtx(5, 6)
        a = ctx.from_int(2)
        jet = jet_of_point(X, 2, [a, a.inverse()])
        self.assertEqual(jet[-1].prec, 4)
        with self.assertRaises(InsufficientPrecision):
            jet_of_point(X, 6, [a, a.inverse()])

    def test_not_on_scheme(self):
        """Test that off-scheme points are refused."""
        ctx = PadicCtx(5, 6)
        with self.assertRaises(NotOnScheme):
            jet_of_point(multiplicative_group(5), 1, [ctx.from_int(2), ctx.from_int(2)])

    def test_fibration(self):
        """Test the Jacobian criterion on G_m."""
        ctx = PadicCtx(5, 8)
        a = ctx.from_int(3)
        report = fibration_check(multiplicative_group(5), 2, [a, a.inverse()])
        self.assertTrue(report.holds)
        self.assertEqual(report.ranks, [1, 1])


class TestMembership(unittest.TestCase):
    """Test ideal membership modulo p."""

    def test_torsion_generators(self):
        """Test (x^(r))^p in the mod-p jet ideal of μ_p."""
        for p, n in ((2, 2), (2, 3), (3, 2)):
            checks = check_limit_generators(torsion_scheme(p, 1), n, 1)
            self.assertTrue(all(checks.values()), f"p={p}, n={n}: {checks}")

    def test_non_member(self):
        """Test that x' itself is not in the ideal."""
        J = build_jet(torsion_scheme(2, 1), 1)
        self.assertFalse(ideal_membership_mod_p(J.ring.var("x", 1), J))

    def test_relation_is_member(self):
        """Test that each relation lies in its own ideal."""
        J = build_jet(multiplicative_group(3), 1)
        for f in J.relations:
            self.assertTrue(ideal_membership_mod_p(f, J))

    def test_cap(self):
        """Test the variable cap."""
        J = build_jet(multiplicative_group(3), 2)
        with self.assertRaises(CapExceeded):
            ideal_membership_mod_p(J.ring.var("x"), J, Settings(groebner_max_vars=4))

    def test_pi_idempotent(self):
        """Test π^(2p) ≡ π^p for π = 1 - δv on W_1 at p = 2."""
        W = witt_presentation(1, 2)
        self.assertTrue(pi_idempotency_check(W, 2))


class TestSchemeFiles(unittest.TestCase):
    """Test scheme file load and dump."""

    def test_round_trip(self):
        """Test that a dumped scheme loads back."""
        X = multiplicative_group(7)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "gm.json")
            dump_scheme(X, path)
            Y = load_scheme(path)
            with open(path, "r", encoding="utf-8") as fh:
                self.assertEqual(json.load(fh)["prime"], 7)
        self.assertEqual(Y.variables, X.variables)
        self.assertEqual(str(Y.relations[0]), str(X.relations[0]))


if __name__ == '__main__':
    unittest.main()
