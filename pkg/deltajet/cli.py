"""
Command-line front end.

One subcommand per operation; every command writes a JSON result with its
run manifest to --out (or stdout). Exit codes: 0 ok, 1 internal error,
2 precision, 3 parse, 4 domain precondition, 5 cap exceeded.
"""

import argparse
import json
import logging
import random
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config import Settings
from .dlinear import (
    DeltaFlow,
    DeltaMatrix,
    QuadraticMapData,
    SubringSpec,
    check_flow_compatibility,
    delta_galois_group,
    delta_linear_residual,
    ldelta,
    solve_delta_linear,
)
from .dseries import (
    NewformData,
    eta_product,
    f1_series,
    fsharp_expansion,
    hecke_pTm,
    load_series,
    u_operator,
)
from .errors import DeltaJetError, DomainError, InexactDivision, ParseError
from .groups import (
    EllipticCurveData,
    additive_formal_group,
    check_kernel_law,
    count_points_ap,
    dpsi_identity,
    elliptic_delta_character,
    gm_delta_character,
    hasse_bound_ok,
    kernel_law,
    lift_point,
    multiplicative_formal_group,
    psi_star,
)
from .jetspace import build_jet, ideal_membership_mod_p, jet_of_point, load_scheme
from .manifest import RunManifest, Stopwatch, render
from .padic import PadicCtx, PadicElem, fermat_quotient, teichmuller
from .witt import (
    WittVector,
    comonad_map,
    ghost,
    w1_hom_check,
    witt_add,
    witt_mul,
    witt_presentation,
)

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, Settings, RunManifest], Any]


# input helpers


def _read_json(path: str, manifest: RunManifest, name: str) -> Any:
    manifest.add_input_file(name, path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", exc.doc.splitlines()[exc.lineno - 1]
                             if exc.doc else "", exc.colno - 1)


def _order(args: argparse.Namespace) -> int:
    return 1 if args.order is None else args.order


def _ctx(settings: Settings) -> PadicCtx:
    return PadicCtx(settings.p, settings.N, settings.ext_degree)


def _element(ctx: PadicCtx, text: str) -> PadicElem:
    try:
        return ctx.parse(text)
    except ValueError:
        raise ParseError("expected an integer, a fraction or a bracketed digit list", text, 0)


def _elements(ctx: PadicCtx, text: str) -> List[PadicElem]:
    return [_element(ctx, part) for part in text.split(";") if part.strip()]


def _matrix(ctx: PadicCtx, data: Any) -> DeltaMatrix:
    rows = data["rows"] if isinstance(data, dict) else data
    try:
        return DeltaMatrix.from_json(ctx, rows)
    except ValueError:
        raise ParseError(f"bad matrix entries {rows!r}")


def _curve(args: argparse.Namespace, settings: Settings, manifest: RunManifest) -> Tuple[EllipticCurveData, dict]:
    if args.curve:
        data = _read_json(args.curve, manifest, "curve")
    else:
        data = {"a4": args.a4, "a6": args.a6}
    try:
        return EllipticCurveData.from_json(data, settings.p), data
    except KeyError as exc:
        raise ParseError(f"curve data needs {exc.args[0]!r}")
    except (TypeError, ValueError):
        raise ParseError(f"curve coefficients must be integers, got a4={data.get('a4')!r} a6={data.get('a6')!r}")


def _newform(data: dict, K: int) -> NewformData:
    try:
        if "newform" in data and data["newform"]:
            return NewformData(tuple(int(c) for c in data["newform"]), int(data.get("level", 0)) or 1, 2,
                               data.get("label", ""))
        if "eta" in data:
            coeffs = eta_product({int(d): int(e) for d, e in data["eta"].items()}, K)
            return NewformData(tuple(coeffs[1:]), int(data["level"]), 2, data.get("label", ""))
    except KeyError as exc:
        raise ParseError(f"an 'eta' product needs {exc.args[0]!r}")
    except (TypeError, ValueError, AttributeError):
        raise ParseError("malformed newform data in curve file")
    raise ParseError("curve file needs 'newform' coefficients or an 'eta' product")


# commands


def cmd_delta(args, settings, manifest):
    a = _element(_ctx(settings), args.value)
    result = fermat_quotient(a)
    return {"value": str(result), "element": result.to_json()}


def cmd_teich(args, settings, manifest):
    ctx = _ctx(settings)
    result = teichmuller(ctx, _element(ctx, args.value).coeffs)
    return {"value": str(result), "element": result.to_json()}


def cmd_jet(args, settings, manifest):
    manifest.add_input_file("scheme", args.scheme)
    X = load_scheme(args.scheme)
    return build_jet(X, _order(args)).to_json()


def cmd_jet_point(args, settings, manifest):
    manifest.add_input_file("scheme", args.scheme)
    X = load_scheme(args.scheme)
    ctx = PadicCtx(X.p, settings.N, settings.ext_degree)
    jet = jet_of_point(X, _order(args), _elements(ctx, args.point))
    J = build_jet(X, _order(args))
    return {"vars": J.variable_names, "jet": [str(a) for a in jet]}


def cmd_member(args, settings, manifest):
    manifest.add_input_file("scheme", args.scheme)
    J = build_jet(load_scheme(args.scheme), _order(args))
    g = J.ring.parse(args.poly)
    return {"poly": str(g), "order": _order(args), "member": ideal_membership_mod_p(g, J, settings)}


def cmd_kernel_law(args, settings, manifest):
    M = args.degree
    if args.group == "additive":
        F = additive_formal_group(settings.p, M)
    elif args.group == "multiplicative":
        F = multiplicative_formal_group(settings.p, M)
    else:
        curve, _ = _curve(args, settings, manifest)
        F = curve.formal_group(M)
    law = kernel_law(F, _order(args), min(M, settings.D))
    return {"group": F.name, "order": law.order, "degree": law.degree,
            "components": [str(c) for c in law.components], "checks": check_kernel_law(law)}


def cmd_ap(args, settings, manifest):
    curve, _ = _curve(args, settings, manifest)
    a_p = count_points_ap(curve.a4, curve.a6, curve.p)
    return {"p": curve.p, "a_p": a_p, "points": curve.p + 1 - a_p,
            "hasse": hasse_bound_ok(a_p, curve.p), "ordinary": a_p % curve.p != 0}


def _character(args, settings, manifest):
    if args.group == "multiplicative":
        return gm_delta_character(settings.p, settings.M, settings.N), None
    curve, _ = _curve(args, settings, manifest)
    return elliptic_delta_character(curve, settings.M, settings.N, settings.D), curve


def cmd_psi(args, settings, manifest):
    psi, _ = _character(args, settings, manifest)
    result = {"kind": psi.kind, "order": psi.order, "truncation": psi.truncation,
              "guaranteed_digits": psi.guaranteed_digits, "series": str(psi.series)}
    if psi.kind == "elliptic":
        report = dpsi_identity(psi, min(settings.M - 1, 20))
        result["dpsi_identity"] = {"holds": report.holds, "loss": report.loss,
                                   "degree": report.degree}
    return result


def cmd_psi_eval(args, settings, manifest):
    psi, curve = _character(args, settings, manifest)
    ctx = _ctx(settings)
    if curve is None:
        value = psi_star(psi, _element(ctx, args.value))
    else:
        value = psi_star(psi, lift_point(curve, ctx, _element(ctx, args.value).to_int()))
    return {"value": str(value), "element": value.to_json()}


def cmd_f1(args, settings, manifest):
    return f1_series(settings.p, settings.M, settings.D, settings.N, max(settings.r, 1)).to_json()


def cmd_fsharp(args, settings, manifest):
    curve, data = _curve(args, settings, manifest)
    qdeg = args.qdeg if args.qdeg is not None else 20
    newform = _newform(data, qdeg + settings.D)
    report = fsharp_expansion(curve, newform, qdeg, settings.D)
    result = report.to_json()
    result["max_difference"] = max((abs(c) for c in report.difference.terms.values()), default=0)
    return result


def cmd_ldelta(args, settings, manifest):
    ctx = _ctx(settings)
    a = _matrix(ctx, _read_json(args.matrix, manifest, "matrix"))
    flow = None
    if args.flow:
        data = _read_json(args.flow, manifest, "flow")
        flow = DeltaFlow.from_text(int(data["n"]), settings.p, data["entries"], int(data.get("det_power", 0)))
    return ldelta(a, flow).to_json()


def cmd_solve_linear(args, settings, manifest):
    ctx = _ctx(settings)
    alpha = _matrix(ctx, _read_json(args.alpha, manifest, "alpha"))
    if args.n is not None and alpha.n != args.n:
        raise ParseError(f"alpha is {alpha.n}x{alpha.n} but --n is {args.n}")
    try:
        u0 = DeltaMatrix.identity(ctx, alpha.n) * _element(ctx, args.u0)
    except ParseError:
        u0 = _matrix(ctx, _read_json(args.u0, manifest, "u0"))
    u = solve_delta_linear(alpha, u0, settings.N)
    result = u.to_json()
    result["residual_zero"] = delta_linear_residual(alpha, u).is_zero()
    return result


def cmd_galois(args, settings, manifest):
    ctx = _ctx(settings)
    u = _matrix(ctx, _read_json(args.matrix, manifest, "matrix"))
    return delta_galois_group(u, SubringSpec(args.subring_degree), settings).to_json()


def cmd_flow_check(args, settings, manifest):
    H = QuadraticMapData(args.group, args.rank)
    if args.flow:
        data = _read_json(args.flow, manifest, "flow")
        flow = DeltaFlow.from_text(H.n, settings.p, data["entries"], int(data.get("det_power", 0)))
    else:
        flow = DeltaFlow.canonical(H.n, settings.p)
    return check_flow_compatibility(flow, H, args.precision, args.samples, args.seed).to_json()


def _witt(text: str, settings: Settings, length: int) -> WittVector:
    w = WittVector.parse(text, settings.p)
    if w.length != length:
        raise ParseError(f"expected {length} components, got {w.length}", text, 0)
    return w


def cmd_witt(args, settings, manifest):
    p, length = settings.p, args.len
    if args.op in ("add", "mul"):
        u, v = _witt(args.u, settings, length), _witt(args.v, settings, length)
        value = witt_add(u, v) if args.op == "add" else witt_mul(u, v)
        return {"value": str(value), "vector": value.to_json()}
    if args.op == "ghost":
        return {"ghost": list(ghost(_witt(args.u, settings, length)))}
    if args.op == "present":
        X = witt_presentation(args.m, p, args.samples, args.seed, settings)
        result = X.to_json()
        result["complete"] = args.m <= 1
        return result
    if args.op == "comonad":
        w = _witt(args.u, settings, args.outer + args.inner + 1)
        nested = comonad_map(w, args.outer, args.inner, settings)
        return {"value": "[" + ", ".join(str(c) for c in nested.components) + "]"}
    rng = random.Random(args.seed)
    ctx = _ctx(settings)
    sample = [ctx.random_element(rng) for _ in range(args.samples)]
    return w1_hom_check(sample).to_json()


def cmd_hecke_p(args, settings, manifest):
    manifest.add_input_file("series", args.series)
    return hecke_pTm(load_series(args.series), args.m, settings).to_json()


def cmd_u_op(args, settings, manifest):
    manifest.add_input_file("series", args.series)
    return u_operator(load_series(args.series)).to_json()


# parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime")
    common.add_argument("--N", type=int, help="p-adic working precision")
    common.add_argument("--ext-degree", dest="ext_degree", type=int, help="unramified extension degree")
    common.add_argument("--qdeg", type=int, help="q- or T-degree truncation")
    common.add_argument("--jetdeg", type=int, help="degree cap in positive-order variables")
    common.add_argument("--order", type=int, help="jet order (default 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="result file (stdout when omitted)")
    common.add_argument("--config", help="JSON file of setting overrides")
    common.add_argument("--verbose", action="store_true")
    return common


def _curve_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--curve", help="curve file with a4, a6 (and newform data)")
    parser.add_argument("--a4", type=int, default=0)
    parser.add_argument("--a6", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deltajet", description="Arithmetic jets and p-derivations")
    parser.add_argument("--version", action="version", version=f"deltajet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    add("delta", cmd_delta, "Fermat quotient of a p-adic number").add_argument("--value", required=True)
    add("teich", cmd_teich, "Teichmüller representative").add_argument("--value", required=True)
    add("jet", cmd_jet, "relations of a jet space").add_argument("--scheme", required=True)
    p = add("jet-point", cmd_jet_point, "jet of a point")
    p.add_argument("--scheme", required=True)
    p.add_argument("--point", required=True, help="coordinates separated by ';'")
    p = add("member", cmd_member, "ideal membership mod p in a jet ring")
    p.add_argument("--scheme", required=True)
    p.add_argument("--poly", required=True)
    p = add("kernel-law", cmd_kernel_law, "kernel law of a jet projection")
    p.add_argument("--group", choices=("additive", "multiplicative", "elliptic"), required=True)
    p.add_argument("--degree", type=int, default=8, help="truncation of the formal group law")
    _curve_args(p)
    _curve_args(add("ap", cmd_ap, "trace of Frobenius by point counting"))
    for name, handler, text in (("psi", cmd_psi, "δ-character series"),
                                ("psi-eval", cmd_psi_eval, "δ-character at a point")):
        p = add(name, handler, text)
        p.add_argument("--group", choices=("multiplicative", "elliptic"), required=True)
        p.add_argument("--value", default="2", help="unit of Z_p, or x-coordinate of a curve point")
        _curve_args(p)
    add("f1", cmd_f1, "the series f¹")
    _curve_args(add("fsharp", cmd_fsharp, "f♯ expansion mod p"))
    p = add("ldelta", cmd_ldelta, "logarithmic δ-derivative of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--flow")
    p = add("solve-linear", cmd_solve_linear, "solve δu = αu^(p)")
    p.add_argument("--alpha", required=True)
    p.add_argument("--u0", default="1", help="scalar multiple of 1, or a matrix file")
    p.add_argument("--n", type=int)
    p = add("galois", cmd_galois, "δ-Galois group of a solution matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--subring-degree", dest="subring_degree", type=int, default=1)
    p = add("flow-check", cmd_flow_check, "compatibility of a flow with a quadratic map")
    p.add_argument("--group", choices=("GL", "Sp", "SO_even", "SO_odd"), required=True)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--flow")
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--samples", type=int, default=5)
    p = add("witt", cmd_witt, "Witt vector arithmetic")
    p.add_argument("op", choices=("add", "mul", "ghost", "present", "comonad", "w1check"))
    p.add_argument("--len", type=int, default=2)
    p.add_argument("--u", default="[0, 0]")
    p.add_argument("--v", default="[0, 0]")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--outer", type=int, default=1)
    p.add_argument("--inner", type=int, default=1)
    p.add_argument("--samples", type=int, default=8)
    p = add("hecke-p", cmd_hecke_p, "the operator pT_m(p) mod p")
    p.add_argument("--series", required=True)
    p.add_argument("--m", type=int, default=0)
    add("u-op", cmd_u_op, "the U-operator").add_argument("--series", required=True)
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    try:
        settings = Settings.load(args.config)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"config {args.config}: {exc}")
    return settings.merged(p=args.p, N=args.N, ext_degree=args.ext_degree, M=args.qdeg,
                           D=args.jetdeg, r=args.order)


def _params(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    params = settings.as_dict()
    for key, value in sorted(vars(args).items()):
        if key not in ("handler", "config", "out", "verbose") and key not in params:
            params[key] = value
    return params


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = _settings(args)
        manifest = RunManifest(args.command, _params(args, settings), {}, __version__)
        with Stopwatch(manifest):
            result = args.handler(args, settings, manifest)
    except DeltaJetError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        logger.error("invalid input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return DomainError.exit_code
    except InexactDivision as exc:
        logger.error("internal error: %s", exc)
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    text = render(result, manifest)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        logger.info("%s written to %s (manifest %s)", args.command, args.out, manifest.digest[:12])
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
