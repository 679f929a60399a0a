"""
δ-polynomial algebra.

A DeltaRing fixes base variables x_1..x_d, a jet order n and a prime p; its
polynomials live in R{x} = R[x, x', ..., x^(n)] localized at p. Coefficients
are integers over one common power of p. Optional caps turn the ring into a
truncated one:

    degree_cap       drop monomials of degree > M in the order-0 variables
    jet_degree_cap   drop monomials of degree > D in the positive-order ones
    coeff_precision  keep coefficients modulo p^K

The jet-degree cap is an exact quotient (its ideal is stable under φ and δ).
Truncating in the order-0 degree is only p-adically approximate and is meant
for power series that are later evaluated or restricted at points of the
formal neighbourhood, where high-degree terms carry high powers of p.

The Frobenius lift sends x^(j) to (x^(j))^p + p x^(j+1) and the p-derivation is
δf = (φ(f) - f^p)/p.
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    ContextMismatch,
    DegreeBoundExceeded,
    InexactDivision,
    InsufficientPrecision,
    NonIntegralInput,
    NotPrime,
    OrderOverflow,
    ParseError,
)
from .linalg import solve_rational
from .padic import PadicElem, balanced, is_prime

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

_PRIMES = {"'": 1, "′": 1, "″": 2, "‴": 3}


def _min_prec(*values: Optional[int]) -> Optional[int]:
    known = [v for v in values if v is not None]
    return min(known) if known else None


def split_p_power(n: int, p: int) -> Tuple[int, int]:
    """Write n = p^v * u with u prime to p; returns (v, u)."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class DeltaRing:
    """
    The polynomial ring in x^(j), j <= max_order, for the given base variables.

    Variable x_i of order j has index j*d + i, so the first d indices are the
    order-0 variables.
    """

    base_vars: Tuple[str, ...]
    max_order: int
    p: int
    degree_cap: Optional[int] = None
    jet_degree_cap: Optional[int] = None
    coeff_precision: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "base_vars", tuple(self.base_vars))
        if len(set(self.base_vars)) != len(self.base_vars):
            raise ValueError(f"variable names must be distinct: {self.base_vars}")
        if self.max_order < 0:
            raise ValueError("max_order must be non-negative")
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")

    @property
    def d(self) -> int:
        return len(self.base_vars)

    @property
    def nvars(self) -> int:
        return self.d * (self.max_order + 1)

    def index(self, name: str, order: int = 0) -> int:
        if name not in self.base_vars:
            raise KeyError(f"unknown variable {name!r}")
        if not 0 <= order <= self.max_order:
            raise OrderOverflow(f"order {order} exceeds jet order {self.max_order}")
        return order * self.d + self.base_vars.index(name)

    def order_of(self, index: int) -> int:
        return index // self.d

    def var_name(self, index: int) -> str:
        order, i = divmod(index, self.d)
        return self.base_vars[i] + "'" * order

    def degrees(self, mono: Monomial) -> Tuple[int, int]:
        """(degree in order-0 variables, degree in positive-order variables)"""
        d = self.d
        return sum(mono[:d]), sum(mono[d:])

    def admissible(self, mono: Monomial) -> bool:
        if self.degree_cap is None and self.jet_degree_cap is None:
            return True
        low, high = self.degrees(mono)
        if self.degree_cap is not None and low > self.degree_cap:
            return False
        if self.jet_degree_cap is not None and high > self.jet_degree_cap:
            return False
        return True

    def with_order(self, max_order: int) -> "DeltaRing":
        return replace(self, max_order=max_order)

    def with_caps(self, **caps) -> "DeltaRing":
        return replace(self, **caps)

    # constructors

    @property
    def unit_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def zero(self, prec: Optional[int] = None) -> "DeltaPoly":
        return DeltaPoly.build(self, {}, 0, prec)

    def one(self) -> "DeltaPoly":
        return self.const(1)

    def const(self, c: Scalar, prec: Optional[int] = None) -> "DeltaPoly":
        """A constant; denominators prime to p need a coefficient precision."""
        c = Fraction(c)
        den, unit = split_p_power(c.denominator, self.p)
        num = c.numerator
        if unit != 1:
            prec = self.coeff_precision if prec is None else prec
            if prec is None:
                raise NonIntegralInput(
                    f"coefficient {c} has a denominator prime to p; set coeff_precision")
            num = num * pow(unit, -1, self.p ** (prec + den))
        return DeltaPoly.build(self, {self.unit_monomial: num}, den, prec)

    def var(self, name: str, order: int = 0) -> "DeltaPoly":
        return self.var_at(self.index(name, order))

    def var_at(self, index: int) -> "DeltaPoly":
        mono = tuple(1 if k == index else 0 for k in range(self.nvars))
        return DeltaPoly.build(self, {mono: 1}, 0, None)

    def gens(self, order: int = 0) -> List["DeltaPoly"]:
        return [self.var(name, order) for name in self.base_vars]

    def from_terms(self, terms: Mapping[Monomial, Scalar], prec: Optional[int] = None) -> "DeltaPoly":
        """Build from {monomial: rational coefficient}."""
        return poly_sum(self, [self.const(c, prec).monomial_times(m) for m, c in terms.items()])

    def embed(self, f: "DeltaPoly") -> "DeltaPoly":
        """Move f into this ring (same base variables, any orders and caps)."""
        if f.ring == self:
            return f
        if f.ring.base_vars != self.base_vars or f.ring.p != self.p:
            raise ContextMismatch("rings have different variables or primes")
        terms = {}
        for mono, c in f.raw_terms.items():
            if any(mono[self.nvars:]):
                raise OrderOverflow(f"polynomial has order above {self.max_order}")
            terms[tuple(mono[:self.nvars]) + (0,) * (self.nvars - len(mono))] = c
        return DeltaPoly.build(self, terms, f.den, f.prec)

    def parse(self, text: str) -> "DeltaPoly":
        return _Parser(self, text).parse()


class DeltaPoly:
    """
    A polynomial of a DeltaRing: integer numerators over p^den.

    When the value is only known modulo p^prec (truncated rings), numerators
    are kept balanced modulo p^(prec + den).
    """

    __slots__ = ("ring", "raw_terms", "den", "prec")

    def __init__(self, ring: DeltaRing, raw_terms: Dict[Monomial, int], den: int, prec: Optional[int]):
        self.ring = ring
        self.raw_terms = raw_terms
        self.den = den
        self.prec = prec

    @classmethod
    def build(cls, ring: DeltaRing, terms: Mapping[Monomial, int], den: int = 0,
              prec: Optional[int] = None) -> "DeltaPoly":
        p = ring.p
        if prec is None:
            prec = ring.coeff_precision
        elif ring.coeff_precision is not None:
            prec = min(prec, ring.coeff_precision)
        mod = None
        if prec is not None:
            if prec < 1:
                raise InsufficientPrecision(f"coefficient precision dropped to {prec}")
            mod = p ** (prec + den)
        out = {}
        for mono, c in terms.items():
            if not c or not ring.admissible(mono):
                continue
            if mod is not None:
                c = balanced(c, mod)
                if not c:
                    continue
            out[mono] = c
        while den > 0 and out and all(c % p == 0 for c in out.values()):
            out = {m: c // p for m, c in out.items()}
            den -= 1
        if not out:
            den = 0
        return cls(ring, out, den, prec)

    # views

    @property
    def terms(self) -> Dict[Monomial, Tuple[int, int]]:
        """{monomial: (numerator, k)} with each coefficient numerator/p^k reduced."""
        p = self.ring.p
        view = {}
        for mono, c in self.raw_terms.items():
            k = self.den
            while k > 0 and c % p == 0:
                c //= p
                k -= 1
            view[mono] = (c, k)
        return view

    def coefficient(self, mono: Monomial) -> Fraction:
        return Fraction(self.raw_terms.get(tuple(mono), 0), self.ring.p ** self.den)

    def constant_term(self) -> Fraction:
        return self.coefficient(self.ring.unit_monomial)

    def is_zero(self) -> bool:
        return not self.raw_terms

    def is_integral(self) -> bool:
        return self.den == 0

    def order(self) -> int:
        """Highest jet order of a variable that occurs (0 for constants)."""
        top = 0
        for mono in self.raw_terms:
            for i, e in enumerate(mono):
                if e:
                    top = max(top, self.ring.order_of(i))
        return top

    def total_degree(self) -> int:
        return max((sum(m) for m in self.raw_terms), default=0)

    def variables(self) -> List[int]:
        present = set()
        for mono in self.raw_terms:
            present.update(i for i, e in enumerate(mono) if e)
        return sorted(present)

    # arithmetic

    def _coerce(self, other) -> "DeltaPoly":
        if isinstance(other, DeltaPoly):
            if other.ring != self.ring:
                raise ContextMismatch("polynomials belong to different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other, None if self.prec is None else self.prec + self.den)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_sum(self.ring, [self, other])

    __radd__ = __add__

    def __neg__(self):
        return DeltaPoly(self.ring, {m: -c for m, c in self.raw_terms.items()}, self.den, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_sum(self.ring, [self, -other])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_sum(self.ring, [other, -self])

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        candidates = []
        if self.prec is not None:
            candidates.append(self.prec - other.den)
        if other.prec is not None:
            candidates.append(other.prec - self.den)
        prec = min(candidates) if candidates else None
        den = self.den + other.den
        mod = None if prec is None else ring.p ** (prec + den)
        cap0, cap1 = ring.degree_cap, ring.jet_degree_cap
        capped = cap0 is not None or cap1 is not None
        right = [(mb, cb, ring.degrees(mb)) for mb, cb in other.raw_terms.items()]
        acc: Dict[Monomial, int] = {}
        for ma, ca in self.raw_terms.items():
            low_a, high_a = ring.degrees(ma)
            for mb, cb, (low_b, high_b) in right:
                if capped:
                    if cap0 is not None and low_a + low_b > cap0:
                        continue
                    if cap1 is not None and high_a + high_b > cap1:
                        continue
                mono = tuple(a + b for a, b in zip(ma, mb))
                acc[mono] = acc.get(mono, 0) + ca * cb
        if mod is not None:
            acc = {m: c % mod for m, c in acc.items()}
        return DeltaPoly.build(ring, acc, den, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.ring.one()
        if self.prec is not None:
            result = self.ring.const(1, self.prec + self.den)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ContextMismatch:
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def scale_p(self, k: int) -> "DeltaPoly":
        """Multiply by p^-k (k may be negative)."""
        prec = None if self.prec is None else self.prec - k
        if k >= 0:
            return DeltaPoly.build(self.ring, self.raw_terms, self.den + k, prec)
        step = self.ring.p ** (-k)
        terms = {m: c * step for m, c in self.raw_terms.items()}
        return DeltaPoly.build(self.ring, terms, self.den, prec)

    def divide_by_p(self) -> "DeltaPoly":
        return self.scale_p(1)

    def monomial_times(self, mono: Monomial) -> "DeltaPoly":
        terms = {tuple(a + b for a, b in zip(m, mono)): c for m, c in self.raw_terms.items()}
        return DeltaPoly.build(self.ring, terms, self.den, self.prec)

    def reduce_mod(self, e: int) -> "DeltaPoly":
        """The class modulo p^e of an integral polynomial."""
        if not self.is_integral():
            raise NonIntegralInput("only integral polynomials reduce modulo p^e")
        return DeltaPoly.build(self.ring, self.raw_terms, 0, e)

    def truncate(self, degree: Optional[int] = None, jet_degree: Optional[int] = None) -> "DeltaPoly":
        ring = self.ring.with_caps(degree_cap=degree, jet_degree_cap=jet_degree)
        return DeltaPoly.build(ring, self.raw_terms, self.den, self.prec)

    # calculus

    def derivative(self, index: int) -> "DeltaPoly":
        terms = {}
        for mono, c in self.raw_terms.items():
            e = mono[index]
            if e:
                lowered = mono[:index] + (e - 1,) + mono[index + 1:]
                terms[lowered] = terms.get(lowered, 0) + e * c
        return DeltaPoly.build(self.ring, terms, self.den, self.prec)

    def substitute(self, images: Mapping[int, "DeltaPoly"], target: Optional[DeltaRing] = None) -> "DeltaPoly":
        """
        Replace variable i by images[i].

        Variables without an image are kept, which requires the target ring to
        be this polynomial's ring.
        """
        target = self.ring if target is None else target
        cache: Dict[Tuple[int, int], DeltaPoly] = {}

        def power(i: int, e: int) -> DeltaPoly:
            if (i, e) not in cache:
                if e == 1:
                    if i in images:
                        base = images[i]
                        if isinstance(base, (int, Fraction)):
                            base = target.const(base)
                    elif target == self.ring:
                        base = target.var_at(i)
                    else:
                        raise ContextMismatch(f"no image for {self.ring.var_name(i)}")
                    cache[(i, 1)] = base
                else:
                    half = power(i, e // 2)
                    square = half * half
                    cache[(i, e)] = square * power(i, 1) if e % 2 else square
            return cache[(i, e)]

        num_prec = None if self.prec is None else self.prec + self.den
        parts = []
        for mono, c in self.raw_terms.items():
            term = target.const(c, num_prec)
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            parts.append(term)
        return poly_sum(target, parts).scale_p(self.den)

    def evaluate(self, point: Union[Sequence, Mapping[int, object]]):
        """
        Value at a point given per variable index (PadicElem, int or Fraction).

        p-adic values are divided by p^den exactly and keep the precision the
        operands support.
        """
        if not isinstance(point, Mapping):
            point = dict(enumerate(point))
        total = None
        padic = None
        for value in point.values():
            if isinstance(value, PadicElem):
                padic = value
                break
        for mono, c in self.raw_terms.items():
            term = c
            for i, e in enumerate(mono):
                if e:
                    if i not in point:
                        raise KeyError(f"no value for {self.ring.var_name(i)}")
                    term = term * point[i] ** e
            total = term if total is None else total + term
        if padic is not None:
            total = padic.ctx.zero(padic.prec) + (0 if total is None else total)
            if self.prec is not None and self.prec + self.den < total.prec:
                total = total.with_prec(self.prec + self.den)
            return total.divide_by_p(self.den) if self.den else total
        total = Fraction(0 if total is None else total)
        return total / self.ring.p ** self.den

    # printing

    def sorted_terms(self) -> List[Tuple[Monomial, int]]:
        """Graded lexicographic order, highest first."""
        return sorted(self.raw_terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True)

    def __str__(self):
        if not self.raw_terms:
            return "0"
        pieces = []
        for mono, (num, k) in sorted(self.terms.items(), key=lambda it: (sum(it[0]), it[0]), reverse=True):
            factors = []
            for i, e in enumerate(mono):
                if e:
                    name = self.ring.var_name(i)
                    factors.append(name if e == 1 else f"{name}^{e}")
            magnitude = abs(num)
            coefficient = []
            if magnitude != 1 or not factors:
                coefficient.append(str(magnitude))
            if k:
                coefficient.append(f"p^-{k}")
            body = "*".join(coefficient + factors)
            sign = "-" if num < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"DeltaPoly({self})"


def poly_sum(ring: DeltaRing, polys: Iterable[DeltaPoly]) -> DeltaPoly:
    polys = list(polys)
    if not polys:
        return ring.zero()
    den = max(f.den for f in polys)
    prec = _min_prec(*(f.prec for f in polys))
    acc: Dict[Monomial, int] = {}
    for f in polys:
        scale = ring.p ** (den - f.den)
        for mono, c in f.raw_terms.items():
            acc[mono] = acc.get(mono, 0) + c * scale
    return DeltaPoly.build(ring, acc, den, prec)


# the Frobenius lift, the p-derivation and friends


def phi_images(ring: DeltaRing, indices: Iterable[int]) -> Dict[int, DeltaPoly]:
    images = {}
    for i in indices:
        if ring.order_of(i) >= ring.max_order:
            raise OrderOverflow(
                f"φ of {ring.var_name(i)} needs jet order {ring.max_order + 1}")
        images[i] = ring.var_at(i) ** ring.p + ring.p * ring.var_at(i + ring.d)
    return images


def phi(f: DeltaPoly) -> DeltaPoly:
    """Ring endomorphism x^(j) -> (x^(j))^p + p x^(j+1)."""
    return f.substitute(phi_images(f.ring, f.variables()))


def delta(f: DeltaPoly) -> DeltaPoly:
    """δf = (φ(f) - f^p)/p for an integral polynomial."""
    if not f.is_integral():
        raise NonIntegralInput("δ is defined on integral polynomials only")
    result = (phi(f) - f ** f.ring.p).divide_by_p()
    if not result.is_integral():
        raise InexactDivision(f"φ(f) - f^p is not divisible by p for f = {f}")
    return result


def delta_iterates(f: DeltaPoly, n: int) -> List[DeltaPoly]:
    """[f, δf, ..., δ^n f]"""
    out = [f]
    for _ in range(n):
        out.append(delta(out[-1]))
    return out


def c_p(f: DeltaPoly, g: DeltaPoly) -> DeltaPoly:
    """C_p(f, g) = (f^p + g^p - (f+g)^p)/p."""
    p = f.ring.p
    return (f ** p + g ** p - (f + g) ** p).divide_by_p()


def prolong_derivation(xi: Mapping[str, DeltaPoly], f: DeltaPoly, n: int) -> DeltaPoly:
    """
    Apply the unique derivation commuting with φ that restricts to xi on the
    base variables.

    From ξ(φ(y)) = φ(ξ(y)) with φ(y) = y^p + p y':
        ξ(y') = (φ(ξ(y)) - p y^(p-1) ξ(y)) / p
    """
    ring = f.ring
    if n > ring.max_order:
        raise OrderOverflow(f"prolongation order {n} exceeds ring order {ring.max_order}")
    if f.order() > n:
        raise OrderOverflow(f"polynomial of order {f.order()} at prolongation order {n}")
    p = ring.p
    images: Dict[int, DeltaPoly] = {}
    for name in ring.base_vars:
        if name not in xi:
            raise KeyError(f"no image for base variable {name}")
        current = xi[name]
        if isinstance(current, (int, Fraction)):
            current = ring.const(current)
        images[ring.index(name)] = current
        for j in range(1, n + 1):
            y = ring.var(name, j - 1)
            current = (phi(current) - p * y ** (p - 1) * current).divide_by_p()
            images[ring.index(name, j)] = current
    parts = [f.derivative(i) * images[i] for i in f.variables()]
    result = poly_sum(ring, parts)
    logger.debug("prolonged derivation to order %d: %s", n, result)
    return result


@dataclass
class SymmetryReport:
    """Outcome of a symmetry test; witness is the first offending image."""

    holds: bool
    mode: str
    images: List[DeltaPoly] = field(default_factory=list)
    witness: Optional[DeltaPoly] = None
    failing_index: Optional[int] = None


def monomials_up_to(nvars: int, degree: int) -> List[Monomial]:
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            mono = [0] * nvars
            for i in combo:
                mono[i] += 1
            out.append(tuple(mono))
    return out


def in_span(target: DeltaPoly, generators: Sequence[DeltaPoly], multiplier_degree: int = 0,
            degree_cap: Optional[int] = None) -> Optional[List[Fraction]]:
    """
    Coefficients c with target = Σ c_(j,m) m·g_j over monomials m of degree
    <= multiplier_degree, or None when target is outside that span.
    """
    ring = target.ring
    multipliers = monomials_up_to(ring.nvars, multiplier_degree)
    columns = [g.monomial_times(m) for g in generators for m in multipliers]
    if degree_cap is not None:
        for poly in [target] + columns:
            if poly.total_degree() > degree_cap:
                raise DegreeBoundExceeded(
                    f"membership test needs degree {poly.total_degree()} > {degree_cap}")
    index: Dict[Monomial, int] = {}
    for poly in [target] + columns:
        for mono in poly.raw_terms:
            index.setdefault(mono, len(index))
    rows: List[Dict[int, Fraction]] = [dict() for _ in index]
    for j, col in enumerate(columns):
        for mono in col.raw_terms:
            rows[index[mono]][j] = col.coefficient(mono)
    rhs = [Fraction(0)] * len(index)
    for mono in target.raw_terms:
        rhs[index[mono]] = target.coefficient(mono)
    return solve_rational(rows, rhs, len(columns))


def is_variational_symmetry(xi: Mapping[str, DeltaPoly], generators: Sequence[DeltaPoly], n: int,
                            mode: str = "variational", multiplier_degree: int = 0,
                            degree_cap: Optional[int] = None) -> SymmetryReport:
    """
    Test ξ^(n) against the module L spanned by generators.

    variational: ξ^(n) kills every generator.
    infinitesimal: every image lies in L[1/p], decided in the span of
        m·g over monomials m of degree <= multiplier_degree.
    """
    if mode not in ("variational", "infinitesimal"):
        raise ValueError(f"unknown mode {mode!r}")
    images = [prolong_derivation(xi, g, n) for g in generators]
    for k, image in enumerate(images):
        if mode == "variational":
            ok = image.is_zero()
        else:
            ok = in_span(image, generators, multiplier_degree, degree_cap) is not None
        if not ok:
            return SymmetryReport(False, mode, images, image, k)
    return SymmetryReport(True, mode, images)


# text form


class _Parser:
    """Recursive descent over: expr := term (+|- term)*, term := factor (*|/ factor)*."""

    def __init__(self, ring: DeltaRing, text: str):
        self.ring = ring
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise ParseError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> DeltaPoly:
        if not self.text.strip():
            self.error("empty polynomial")
        result = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return result

    def expr(self) -> DeltaPoly:
        sign = 1
        if self.peek() and self.peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        result = self.term()
        if sign < 0:
            result = -result
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> DeltaPoly:
        result = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            start = self.pos
            rhs = self.factor()
            if op == "*":
                result = result * rhs
            else:
                if rhs.variables() or rhs.is_zero():
                    self.pos = start
                    self.error("can only divide by a nonzero constant")
                result = result * self.ring.const(1 / rhs.constant_term())
        return result

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.text[start:self.pos] in ("", "-"):
            self.pos = start
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def factor(self) -> DeltaPoly:
        ch = self.peek()
        if not ch:
            self.error("unexpected end of input")
        start = self.pos
        is_p_literal = False
        if ch == "(":
            self.pos += 1
            base = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
        elif ch.isdigit():
            base = self.ring.const(self.integer())
        elif ch.isalpha() or ch == "_":
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            order = 0
            while self.pos < len(self.text) and self.text[self.pos] in _PRIMES:
                order += _PRIMES[self.text[self.pos]]
                self.pos += 1
            if name in self.ring.base_vars:
                if order > self.ring.max_order:
                    self.pos = start
                    self.error(f"order {order} exceeds jet order {self.ring.max_order}")
                base = self.ring.var(name, order)
            elif name == "p" and order == 0:
                is_p_literal = True
                base = self.ring.const(self.ring.p)
            else:
                self.pos = start
                self.error(f"unknown variable {name!r}")
        else:
            self.error(f"unexpected {ch!r}")
        if self.peek() == "^":
            self.pos += 1
            exponent = self.integer()
            if exponent < 0:
                if not is_p_literal:
                    self.error("negative exponents are only allowed on p")
                return self.ring.one().scale_p(-exponent)
            return base ** exponent
        return base
