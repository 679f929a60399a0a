#!/usr/bin/env python3
"""
Demonstration of deltajet.

Walks through p-derivations, jet spaces, δ-characters, δ-modular forms,
δ-linear equations and Witt vectors with small, fixed examples.
"""

import random
import sys
import time

from deltajet import (
    DeltaFlow,
    DeltaJetError,
    DeltaMatrix,
    DeltaRing,
    EllipticCurveData,
    PadicCtx,
    QuadraticMapData,
    SchemePresentation,
    WittVector,
    build_jet,
    check_flow_compatibility,
    delta,
    elliptic_delta_character,
    f1_series,
    fermat_quotient,
    fsharp_expansion,
    gm_delta_character,
    jet_of_point,
    psi_star,
    solve_delta_linear,
    teichmuller,
)
from deltajet.dlinear import delta_linear_residual
from deltajet.dseries import newform_from_traces
from deltajet.groups import X011, lift_point
from deltajet.witt import w1_hom_check


def print_header(text):
    """Print a section header."""
    print(f"\n{'='*60}")
    print(f" {text}")
    print(f"{'='*60}")


def demo_numbers():
    print_header("1. Fermat quotients")
    ctx = PadicCtx(5, 10)
    for n in (2, 3, 7):
        print(f"  δ({n}) at p = 5: {fermat_quotient(ctx.from_int(n))}")
    w = teichmuller(ctx, 2)
    print(f"  Teichmüller lift of 2: {w}")
    print(f"  δ of it: {fermat_quotient(w)}")


def demo_jets():
    print_header("2. Jet spaces")
    ring = DeltaRing(("x", "y"), 1, 3)
    print(f"  δ(x*y) at p = 3: {delta(ring.parse('x*y'))}")
    X = SchemePresentation.from_text(5, ["x", "y"], ["x*y - 1"], "G_m")
    J = build_jet(X, 2)
    print(f"\n  J^2(G_m) over Z_5, variables {J.variable_names}:")
    for f in J.relations:
        text = str(f)
        print(f"    {text[:70]}{' ...' if len(text) > 70 else ''}")
    a = PadicCtx(5, 8).from_int(3)
    jet = jet_of_point(X, 2, [a, a.inverse()])
    print(f"\n  Jet of (3, 1/3): {', '.join(str(v) for v in jet[:3])}, ...")


def demo_characters():
    print_header("3. δ-characters")
    ctx = PadicCtx(5, 10)
    psi = gm_delta_character(5, 32, 10)
    a, b = ctx.from_int(2), ctx.from_int(3)
    print(f"  G_m: ψ(2) + ψ(3) = {psi_star(psi, a) + psi_star(psi, b)}")
    print(f"       ψ(6)        = {psi_star(psi, a * b)}")

    curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
    print(f"\n  X_0(11) at p = 5: a_p = {curve.a_p}, ordinary = {curve.is_ordinary}")
    start = time.time()
    psi = elliptic_delta_character(curve, truncation=8, precision=6, jet_degree=6)
    print(f"  order-2 character: {len(psi.series.terms)} terms, "
          f"{psi.guaranteed_digits} guaranteed digits ({time.time() - start:.2f}s)")
    point_ctx = PadicCtx(5, 8)
    for x in range(5):
        try:
            P = lift_point(curve, point_ctx, x)
        except DeltaJetError:
            continue
        print(f"  ψ at the point with x ≡ {x}: {psi_star(psi, P)}")
        break


def demo_modular_forms():
    print_header("4. δ-modular forms")
    print(f"  f¹ at p = 3: {f1_series(3, M=0, D=3, prec=3)}")
    newform = newform_from_traces(X011["a4"], X011["a6"], 15, 11, {2: -2, 3: -1, 11: 1}, "11a")
    print(f"  newform 11a: {list(newform.coefficients[:10])} ...")
    curve = EllipticCurveData(X011["a4"], X011["a6"], 5)
    start = time.time()
    report = fsharp_expansion(curve, newform, qdeg=10, D=5)
    print(f"  f♯ mod 5: {report.formula}")
    print(f"  construction agrees: {'✓' if report.agree else '✗'} ({time.time() - start:.2f}s)")
    return report.agree


def demo_linear():
    print_header("5. δ-linear equations")
    ctx = PadicCtx(3, 6, 2)
    rng = random.Random(42)
    alpha = DeltaMatrix.random(ctx, 2, rng)
    u = solve_delta_linear(alpha, DeltaMatrix.identity(ctx, 2))
    print(f"  α = {alpha}")
    print(f"  u = {u}")
    ok = delta_linear_residual(alpha, u).is_zero()
    print(f"  δu = α u^(p): {'✓' if ok else '✗'}")
    report = check_flow_compatibility(DeltaFlow.canonical(2, 3), QuadraticMapData("Sp", 1), 2)
    print(f"  canonical flow on Sp_2 horizontal to {report.horizontal_digits} digit(s)")
    return ok


def demo_witt():
    print_header("6. Witt vectors")
    v = WittVector.parse("[0, 1]", 2)
    print(f"  [0, 1] * [0, 1] at p = 2: {v * v}")
    ctx = PadicCtx(3, 8)
    rng = random.Random(7)
    report = w1_hom_check([ctx.random_element(rng) for _ in range(5)])
    print(f"  a -> (a, δa) on {report.pairs} pairs: {'✓' if report.holds else '✗'}")
    return report.holds


if __name__ == "__main__":
    print("deltajet - arithmetic jet spaces and p-derivations")
    print()

    demo_numbers()
    demo_jets()
    demo_characters()
    results = [demo_modular_forms(), demo_linear(), demo_witt()]

    print("\n" + "="*60)
    print("Demo complete!")

    sys.exit(0 if all(results) else 1)
