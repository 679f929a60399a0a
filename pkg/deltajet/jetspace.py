"""
Arithmetic jet spaces of affine schemes.

X = Spec R[x]/(f) is given by its variables and relations. Its n-th jet space
is presented by the variables x, x', ..., x^(n) and the relations
f, δf, ..., δ^n f, listed order by order, so that the presentation at order
n+1 extends the one at order n.

Ideal membership is decided modulo p with sympy Gröbner bases over F_p.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Poly, groebner, symbols

from .config import DEFAULTS, Settings
from .deltapoly import DeltaPoly, DeltaRing, delta
from .errors import (
    CapExceeded,
    DegreeBoundExceeded,
    InsufficientPrecision,
    NonIntegralInput,
    NotOnScheme,
)
from .linalg import rank_mod_p
from .padic import PadicElem, fermat_quotient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemePresentation:
    """Spec R[x]/(f): relations are integral polynomials in the order-0 variables."""

    ring: DeltaRing
    relations: Tuple[DeltaPoly, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.ring.max_order != 0:
            object.__setattr__(self, "ring", self.ring.with_order(0))
        relations = tuple(self.ring.embed(f) for f in self.relations)
        for f in relations:
            if not f.is_integral():
                raise NonIntegralInput(f"relation {f} is not integral")
        object.__setattr__(self, "relations", relations)

    @classmethod
    def from_text(cls, p: int, variables: Sequence[str], relations: Sequence[str],
                  label: str = "") -> "SchemePresentation":
        ring = DeltaRing(tuple(variables), 0, p)
        return cls(ring, tuple(ring.parse(text) for text in relations), label)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.ring.base_vars

    def to_json(self) -> dict:
        return {
            "prime": self.p,
            "vars": list(self.variables),
            "relations": [str(f) for f in self.relations],
            "label": self.label,
        }


@dataclass(frozen=True)
class JetPresentation:
    """J^n(X): relations[j*k + i] is δ^j applied to the i-th relation of X."""

    scheme: SchemePresentation
    order: int
    ring: DeltaRing
    relations: Tuple[DeltaPoly, ...] = field(default=())

    def relation(self, i: int, j: int) -> DeltaPoly:
        return self.relations[j * len(self.scheme.relations) + i]

    @property
    def variable_names(self) -> List[str]:
        return [self.ring.var_name(k) for k in range(self.ring.nvars)]

    def to_json(self) -> dict:
        return {
            "prime": self.ring.p,
            "order": self.order,
            "label": self.scheme.label,
            "vars": self.variable_names,
            "relations": [str(f) for f in self.relations],
        }


def build_jet(X: SchemePresentation, n: int) -> JetPresentation:
    """Relations f, δf, ..., δ^n f of the n-th jet space."""
    if n < 0:
        raise ValueError("jet order must be non-negative")
    ring = X.ring.with_order(n)
    layers = [[ring.embed(f) for f in X.relations]]
    for _ in range(n):
        layers.append([delta(f) for f in layers[-1]])
    relations = tuple(f for layer in layers for f in layer)
    logger.debug("built J^%d(%s) with %d relations", n, X.label or "X", len(relations))
    return JetPresentation(X, n, ring, relations)


def point_on_scheme(X: SchemePresentation, alpha: Sequence[PadicElem]) -> bool:
    values = [f.evaluate(list(alpha)) for f in X.relations]
    return all(v.is_zero() if isinstance(v, PadicElem) else v == 0 for v in values)


def jet_of_point(X: SchemePresentation, n: int, alpha: Sequence[PadicElem]) -> Tuple[PadicElem, ...]:
    """
    (α, δα, ..., δ^n α), flattened order by order like the jet variables.

    The result has precision min(α.prec) - n and satisfies the relations of
    build_jet(X, n) at that precision.
    """
    alpha = list(alpha)
    if len(alpha) != X.ring.d:
        raise ValueError(f"expected {X.ring.d} coordinates, got {len(alpha)}")
    if alpha and min(a.prec for a in alpha) < n + 1:
        raise InsufficientPrecision(f"jets of order {n} need precision at least {n + 1}")
    if not point_on_scheme(X, alpha):
        raise NotOnScheme(f"point does not satisfy the relations of {X.label or 'X'}")
    layers = [alpha]
    for _ in range(n):
        layers.append([fermat_quotient(a) for a in layers[-1]])
    return tuple(a for layer in layers for a in layer)


# ideal membership modulo p


def _sympy_gens(ring: DeltaRing):
    return tuple(symbols([ring.var_name(k) for k in range(ring.nvars)]))


def to_sympy_mod_p(f: DeltaPoly, gens) -> Poly:
    if not f.is_integral():
        raise NonIntegralInput(f"{f} is not integral, it has no class modulo p")
    p = f.ring.p
    rep = {mono: c % p for mono, c in f.raw_terms.items() if c % p}
    return Poly.from_dict(rep or {f.ring.unit_monomial: 0}, *gens, modulus=p)


def ideal_membership_mod_p(g: DeltaPoly, J: JetPresentation,
                           settings: Settings = DEFAULTS) -> bool:
    """Decide g mod p ∈ (relations of J) mod p with a Gröbner basis over F_p."""
    ring = J.ring
    g = ring.embed(g)
    if ring.nvars > settings.groebner_max_vars:
        raise CapExceeded(
            f"{ring.nvars} variables exceed the Gröbner cap {settings.groebner_max_vars}")
    for f in list(J.relations) + [g]:
        if f.total_degree() > settings.groebner_max_degree:
            raise DegreeBoundExceeded(
                f"degree {f.total_degree()} exceeds the Gröbner cap {settings.groebner_max_degree}")
    if ring.nvars == 0:
        constants = [f.constant_term() % ring.p for f in J.relations]
        return g.constant_term() % ring.p == 0 or any(constants)
    gens = _sympy_gens(ring)
    target = to_sympy_mod_p(g, gens)
    if target.is_zero:
        return True
    generators = [to_sympy_mod_p(f, gens) for f in J.relations]
    generators = [f for f in generators if not f.is_zero]
    if not generators:
        return False
    logger.debug("Gröbner basis mod %d of %d relations in %d variables",
                 ring.p, len(generators), len(gens))
    basis = groebner(generators, *gens, modulus=ring.p, order="grevlex")
    return basis.contains(target)


# fibration and limit-ring checks


@dataclass
class FibrationReport:
    """Ranks mod p of the blocks ∂(δ^j f)/∂x^(j) at a jet point."""

    order: int
    expected_rank: int
    ranks: List[int]

    @property
    def holds(self) -> bool:
        return all(r == self.expected_rank for r in self.ranks)


def fibration_check(X: SchemePresentation, n: int, alpha: Sequence[PadicElem]) -> FibrationReport:
    """
    Jacobian criterion at a point: δ^j f can be solved for x^(j) mod p for
    every 1 <= j <= n exactly when each block has full rank len(f).
    """
    J = build_jet(X, n)
    point = jet_of_point(X, n, alpha)
    if point and point[0].ctx.ext_degree != 1:
        raise ValueError("fibration_check works with points over Z_p")
    ring = J.ring
    k = len(X.relations)
    ranks = []
    for j in range(1, n + 1):
        rows = []
        for i in range(k):
            f = J.relation(i, j)
            row = {}
            for l, name in enumerate(X.variables):
                value = f.derivative(ring.index(name, j)).evaluate(list(point))
                row[l] = value.coeffs[0] % ring.p
            rows.append(row)
        ranks.append(rank_mod_p(rows, ring.d, ring.p))
    return FibrationReport(n, k, ranks)


def torsion_scheme(p: int, nu: int) -> SchemePresentation:
    """μ_{p^ν} in the formal coordinate x = u - 1: relation (1+x)^(p^ν) - 1."""
    ring = DeltaRing(("x",), 0, p)
    x = ring.var("x")
    return SchemePresentation(ring, ((1 + x) ** (p ** nu) - 1,), f"mu_{p}^{nu}")


def limit_ring_generators(X: SchemePresentation, n: int, nu: int) -> List[DeltaPoly]:
    """The predicted generators (x^(r))^(p^ν), r < n, of the mod-p jet ideal."""
    ring = X.ring.with_order(n)
    q = X.p ** nu
    return [ring.var(name, r) ** q for r in range(n) for name in X.variables]


def check_limit_generators(X: SchemePresentation, n: int, nu: int,
                           settings: Settings = DEFAULTS) -> Dict[str, bool]:
    """Membership of each predicted generator, keyed by its printed form."""
    J = build_jet(X, n)
    return {str(g): ideal_membership_mod_p(g, J, settings) for g in limit_ring_generators(X, n, nu)}


def pi_idempotency_check(W: SchemePresentation, n: int = 2,
                         settings: Settings = DEFAULTS) -> bool:
    """
    For the presentation R[v]/(v^2 - p v) of W_1: π = 1 - δv satisfies
    π^(2p) ≡ π^p in the mod-p jet ring of order n.
    """
    if n < 1:
        raise ValueError("π involves v', so the jet order must be at least 1")
    J = build_jet(W, n)
    v1 = J.ring.var(W.variables[0], 1)
    pi = 1 - v1
    p = W.p
    return ideal_membership_mod_p(pi ** (2 * p) - pi ** p, J, settings)


# scheme files


def load_scheme(path: str) -> SchemePresentation:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return scheme_from_json(data)


def scheme_from_json(data: dict) -> SchemePresentation:
    return SchemePresentation.from_text(
        int(data["prime"]), data.get("vars", []), data.get("relations", []), data.get("label", ""))


def dump_scheme(X: SchemePresentation, path: Optional[str] = None) -> str:
    text = json.dumps(X.to_json(), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
