"""
Tests for the dlinear module.
"""

import itertools
import random
import unittest

from deltajet.config import Settings
from deltajet.errors import CapExceeded, InsufficientPrecision, NotInvertibleModP
from deltajet.dlinear import (
    DeltaFlow,
    DeltaMatrix,
    QuadraticMapData,
    SubringSpec,
    cayley_sample,
    check_flow_compatibility,
    delta_galois_group,
    delta_linear_residual,
    det_poly,
    galois_stability,
    ldelta,
    lie_delta_membership,
    matrix_ring,
    monomial_matrix,
    neg_delta,
    plus_delta,
    solve_delta_linear,
    solve_flow,
    star_delta,
)
from deltajet.padic import PadicCtx, teichmuller


class TestDeltaMatrix(unittest.TestCase):
    """Test matrix arithmetic over W(F_q)."""

    def setUp(self):
        """Set up test fixtures."""
        self.ctx = PadicCtx(5, 8)

    def test_det_and_inverse(self):
        """Test det and u * u^-1 = 1."""
        u = DeltaMatrix.from_ints(self.ctx, [[1, 2], [3, 4]])
        self.assertEqual(u.det().to_int(), -2)
        self.assertTrue((u * u.inverse()).equals(DeltaMatrix.identity(self.ctx, 2)))

    def test_json_round_trip(self):
        """Test that printed rows parse back."""
        rng = random.Random(3)
        for ctx in (self.ctx, PadicCtx(3, 5, 2)):
            u = DeltaMatrix.random(ctx, 2, rng)
            self.assertTrue(DeltaMatrix.from_json(ctx, u.to_json()["rows"]).equals(u))

    def test_delta_entrywise(self):
        """Test δ(2·1) = -6 on the diagonal at p = 5."""
        u = DeltaMatrix.identity(self.ctx, 2) * 2
        d = u.delta()
        self.assertEqual(d.rows[0][0].to_int(), -6)
        self.assertTrue(d.rows[0][1].is_zero())


class TestDeltaLieAlgebra(unittest.TestCase):
    """Test +_δ, ⋆_δ and the logarithmic derivative."""

    def setUp(self):
        """Set up test fixtures."""
        self.ctx = PadicCtx(5, 10)
        self.rng = random.Random(17)

    def test_negation(self):
        """Test a +_δ (-a) = 0."""
        for _ in range(5):
            a = DeltaMatrix.random(self.ctx, 2, self.rng)
            self.assertTrue(plus_delta(a, neg_delta(a)).is_zero())

    def test_cocycle_on_monomial_matrices(self):
        """Test lδ(ab) = (a ⋆_δ lδ(b)) +_δ lδ(a) on T·W."""
        for _ in range(5):
            a = monomial_matrix(self.ctx, 3, self.rng)
            b = monomial_matrix(self.ctx, 3, self.rng)
            left = ldelta(a * b)
            right = plus_delta(star_delta(a, ldelta(b)), ldelta(a))
            self.assertTrue(left.equals(right, 8))

    def unit(self, n):
        while True:
            a = DeltaMatrix.random(self.ctx, n, self.rng)
            if a.is_invertible_mod_p():
                return a

    def test_associativity(self):
        """Test (a +_δ b) +_δ c = a +_δ (b +_δ c) for n <= 4."""
        for n in range(1, 5):
            for _ in range(4):
                a, b, c = (DeltaMatrix.random(self.ctx, n, self.rng) for _ in range(3))
                self.assertTrue(plus_delta(plus_delta(a, b), c).equals(plus_delta(a, plus_delta(b, c))))

    def test_star_distributes(self):
        """Test a ⋆_δ (b +_δ c) = (a ⋆_δ b) +_δ (a ⋆_δ c)."""
        for n in (1, 2, 3):
            for _ in range(3):
                a = self.unit(n)
                b, c = DeltaMatrix.random(self.ctx, n, self.rng), DeltaMatrix.random(self.ctx, n, self.rng)
                left = star_delta(a, plus_delta(b, c))
                right = plus_delta(star_delta(a, b), star_delta(a, c))
                self.assertTrue(left.equals(right))

    def test_ldelta_inverts_solver(self):
        """Test lδ(u) = α for the solution of δu = α u^(p) with u ≡ 1."""
        for ctx in (PadicCtx(5, 8), PadicCtx(3, 6, 2)):
            rng = random.Random(ctx.q)
            alpha = DeltaMatrix.random(ctx, 2, rng)
            u = solve_delta_linear(alpha, DeltaMatrix.identity(ctx, 2))
            self.assertTrue(ldelta(u).equals(alpha, ctx.N - 1))

    def test_ldelta_of_scalar(self):
        """Test lδ(c·1) = δc / c^p on the diagonal."""
        c = self.ctx.from_int(2)
        value = ldelta(DeltaMatrix.identity(self.ctx, 2) * c).rows[0][0]
        self.assertTrue(value.equals(self.ctx.from_int(-6) * self.ctx.from_int(32).inverse(), 8))

    def test_ldelta_precision(self):
        """Test that lδ needs two digits."""
        ctx = PadicCtx(5, 1)
        with self.assertRaises(InsufficientPrecision):
            ldelta(DeltaMatrix.identity(ctx, 2))


class TestDeltaLinearEquations(unittest.TestCase):
    """Test the solver for δu = α u^(p)."""

    def test_residual_vanishes(self):
        """Test δu - α u^(p) = 0 at the working precision."""
        for ctx in (PadicCtx(5, 10), PadicCtx(3, 6, 2)):
            rng = random.Random(ctx.p)
            alpha = DeltaMatrix.random(ctx, 2, rng)
            u0 = DeltaMatrix.identity(ctx, 2)
            u = solve_delta_linear(alpha, u0)
            self.assertTrue(delta_linear_residual(alpha, u).is_zero())
            self.assertTrue(u.equals(u0, 1))

    def test_zero_alpha(self):
        """Test that α = 0 and u0 = 1 give u = 1."""
        ctx = PadicCtx(7, 6)
        u = solve_delta_linear(DeltaMatrix.zero(ctx, 2), DeltaMatrix.identity(ctx, 2))
        self.assertTrue(u.equals(DeltaMatrix.identity(ctx, 2)))

    def test_singular_start(self):
        """Test that u0 must be invertible mod p."""
        ctx = PadicCtx(5, 6)
        with self.assertRaises(NotInvertibleModP):
            solve_delta_linear(DeltaMatrix.zero(ctx, 2), DeltaMatrix.zero(ctx, 2))


class TestGaloisGroups(unittest.TestCase):
    """Test δ-Galois groups at finite precision."""

    def fourth_root_of_unity(self, ctx):
        for digits in itertools.product(range(ctx.p), repeat=ctx.ext_degree):
            if not any(digits):
                continue
            w = teichmuller(ctx, digits)
            if (w * w).equals(-1):
                return w
        self.fail("no fourth root of unity")

    def test_teichmuller_solution(self):
        """Test that u = [i] in W(F_9) has group {1, -1} over Z_3."""
        ctx = PadicCtx(3, 6, 2)
        u = DeltaMatrix(((self.fourth_root_of_unity(ctx),),))
        result = delta_galois_group(u)
        self.assertEqual(len(result.elements), 2)
        minus_one = DeltaMatrix.from_ints(ctx, [[-1]])
        self.assertTrue(any(c.equals(minus_one) for c in result.elements))
        self.assertTrue(galois_stability(u))
        self.assertEqual(result.to_json()["subring"], "Z_p")

    def test_group_closure(self):
        """Test that products and inverses stay in the group for u = g·diag(i^a, i^b)."""
        ctx = PadicCtx(3, 6, 2)
        rng = random.Random(11)
        w = self.fourth_root_of_unity(ctx)
        for _ in range(4):
            while True:
                g = DeltaMatrix.from_ints(ctx, [[rng.randrange(-9, 10) for _ in range(2)] for _ in range(2)])
                if g.is_invertible_mod_p():
                    break
            a, b = rng.randrange(4), rng.randrange(4)
            u = g * DeltaMatrix.from_ints(ctx, [[w ** a, 0], [0, w ** b]])
            elements = delta_galois_group(u).elements
            self.assertEqual(len(elements), 2 if a % 2 or b % 2 else 1)
            for c in elements:
                self.assertTrue(any(c.inverse().equals(e) for e in elements))
                for d in elements:
                    self.assertTrue(any((c * d).equals(e) for e in elements))

    def test_identity_over_prime_ring(self):
        """Test that over Z_p only the identity appears."""
        ctx = PadicCtx(5, 6)
        result = delta_galois_group(DeltaMatrix.identity(ctx, 2))
        self.assertEqual(len(result.elements), 1)
        self.assertTrue(result.elements[0].equals(DeltaMatrix.identity(ctx, 2)))

    def test_bad_subring(self):
        """Test that W(F_27) is not inside W(F_9)."""
        ctx = PadicCtx(3, 4, 2)
        with self.assertRaises(ValueError):
            delta_galois_group(DeltaMatrix.identity(ctx, 1), SubringSpec(3))


class TestFlows(unittest.TestCase):
    """Test δ-flows on classical groups."""

    def test_sample_in_group(self):
        """Test g^t q g = q for Cayley samples."""
        ctx = PadicCtx(5, 6)
        rng = random.Random(1)
        for group in ("Sp", "SO_even", "SO_odd"):
            H = QuadraticMapData(group, 1)
            q = H.q_matrix(ctx)
            g = cayley_sample(H, ctx, rng)
            gt = DeltaMatrix(tuple(zip(*g.rows)))
            self.assertTrue((gt * q * g).equals(q))

    def test_canonical_flow_on_sp2(self):
        """Test that the canonical flow is horizontal for Sp_2 only mod p."""
        report = check_flow_compatibility(DeltaFlow.canonical(2, 3), QuadraticMapData("Sp", 1), 2)
        self.assertFalse(report.horizontal)
        self.assertEqual(report.horizontal_digits, 1)
        self.assertIsNotNone(report.witness)

    def test_solved_flow_on_sp2(self):
        """Test a solved flow with denominator det^2 at p = 3."""
        H = QuadraticMapData("Sp", 1)
        flow = solve_flow(H, 3, 2, precision=2)
        report = check_flow_compatibility(flow, H, 2, samples=3)
        self.assertTrue(report.horizontal)
        self.assertTrue(report.s_horizontal)

    def test_scaled_flow_on_sp2(self):
        """Test Φ = λ x^(3) with λ = 1 + 15k/det^3 and 3k = det^3 - det(x^(3))."""
        ring = matrix_ring(2, 3)
        x = [ring.var_at(i) for i in range(4)]
        det = det_poly(ring, 2)
        k = (det ** 3 - (x[0] ** 3 * x[3] ** 3 - x[1] ** 3 * x[2] ** 3)).divide_by_p()
        numerators = ((5 * k * x[0] ** 3, 5 * k * x[1] ** 3), (5 * k * x[2] ** 3, 5 * k * x[3] ** 3))
        flow = DeltaFlow(2, ring, numerators, 3)
        report = check_flow_compatibility(flow, QuadraticMapData("Sp", 1), 2)
        self.assertTrue(report.horizontal, report.witness)
        self.assertTrue(report.symmetric)
        self.assertTrue(report.s_horizontal)

    def test_asymmetric_flow(self):
        """Test that Δ = [[1, 0], [0, 0]] breaks the symmetry square on Sp_2."""
        flow = DeltaFlow.from_text(2, 3, [["1", "0"], ["0", "0"]])
        report = check_flow_compatibility(flow, QuadraticMapData("Sp", 1), 2)
        self.assertFalse(report.symmetric)
        self.assertTrue(check_flow_compatibility(DeltaFlow.canonical(2, 3), QuadraticMapData("Sp", 1), 2).symmetric)

    def test_flow_cap(self):
        """Test the unknowns cap."""
        with self.assertRaises(CapExceeded):
            solve_flow(QuadraticMapData("Sp", 1), 3, 2, settings=Settings(linear_unknowns_cap=10))

    def test_lie_membership(self):
        """Test membership in the δ-Lie algebra of Sp_2."""
        ctx = PadicCtx(5, 6)
        H = QuadraticMapData("Sp", 1)
        self.assertTrue(lie_delta_membership(DeltaMatrix.zero(ctx, 2), H))
        self.assertFalse(lie_delta_membership(DeltaMatrix.identity(ctx, 2), H))

    def test_flow_from_text(self):
        """Test a flow given by numerators."""
        flow = DeltaFlow.from_text(2, 5, [["x11", "0"], ["0", "0"]])
        ctx = PadicCtx(5, 6)
        a = DeltaMatrix.from_ints(ctx, [[2, 0], [0, 1]])
        self.assertEqual(flow.phi_of(a).rows[0][0].to_int(), 32 + 10)
        self.assertEqual(flow.to_json()["entries"][0][0], "x11")


if __name__ == '__main__':
    unittest.main()
