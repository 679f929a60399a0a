"""
Formal groups, kernel laws and δ-characters.

Formal group laws are bivariate series in T1, T2 kept as DeltaPoly values of a
truncated ring. The additive and multiplicative laws are exact polynomials;
the law of a short Weierstrass curve y^2 = x^3 + a4 x + a6 is expanded in the
parameter z = -x/y from the chord through two points of the formal group.

The order-1 δ-character of G_m is the series Σ (-1)^(n-1) p^(n-1)/n u^n in
u = x'/x^p. The order-2 δ-character of an ordinary curve is

    ψ = (ℓ(φ²T) - a_p ℓ(φT) + p ℓ(T)) / p,    φT = T^p + pT',

with ℓ the formal logarithm; its coefficients must come out p-integral.
"""

import logging
import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .config import DEFAULTS
from .deltapoly import DeltaPoly, DeltaRing, delta, phi, poly_sum, split_p_power
from .errors import (
    BadReduction,
    IntegralityFailure,
    NotOrdinary,
    PNotInDomain,
    PrecisionLossWarning,
    TruncationOverflow,
)
from .padic import PadicCtx, PadicElem, fermat_quotient

logger = logging.getLogger(__name__)


# univariate series, as coefficient lists indexed by degree


def series_mul(a: Sequence, b: Sequence, degree: int) -> List:
    out = [0] * (degree + 1)
    for i, ai in enumerate(a[:degree + 1]):
        if ai:
            for j, bj in enumerate(b[:degree + 1 - i]):
                out[i + j] += ai * bj
    return out


def series_inverse(a: Sequence, degree: int) -> List[Fraction]:
    """1/a for a series with a[0] != 0."""
    inv = [Fraction(0)] * (degree + 1)
    inv[0] = Fraction(1) / a[0]
    for n in range(1, degree + 1):
        acc = sum(a[k] * inv[n - k] for k in range(1, min(n, len(a) - 1) + 1))
        inv[n] = -acc * inv[0]
    return inv


def series_reversion(f: Sequence[Fraction], degree: int) -> List[Fraction]:
    """g with g(f(T)) = T, for f = T + O(T^2)."""
    g = [Fraction(0)] * (degree + 1)
    if degree >= 1:
        g[1] = Fraction(1)
    powers = [[Fraction(1)] + [Fraction(0)] * degree]
    for _ in range(degree):
        powers.append(series_mul(powers[-1], f, degree))
    for n in range(2, degree + 1):
        total = sum(g[k] * powers[k][n] for k in range(1, n))
        g[n] = -total / powers[n][n]
    return g


def compose_series(coeffs: Sequence, g: DeltaPoly) -> DeltaPoly:
    """Σ c_n g^n in g's ring, powers built one factor at a time."""
    ring = g.ring
    parts = []
    power = None
    for n, c in enumerate(coeffs):
        power = ring.one() if n == 0 else (g if n == 1 else power * g)
        if c:
            parts.append(ring.const(c) * power)
    return poly_sum(ring, parts)


# formal group laws


@dataclass(frozen=True)
class FormalGroupData:
    """
    A one-dimensional formal group law truncated at total degree M.

    omega holds the invariant differential ω(T) = Σ omega[n] T^n dT, so that
    the logarithm is ℓ(T) = Σ omega[n-1]/n T^n.
    """

    name: str
    p: int
    M: int
    law: DeltaPoly
    omega: Tuple[int, ...]
    a4: Optional[int] = None
    a6: Optional[int] = None

    @property
    def log(self) -> List[Fraction]:
        coeffs = [Fraction(0)] * (self.M + 1)
        for n in range(1, self.M + 1):
            coeffs[n] = Fraction(self.omega[n - 1], n)
        return coeffs

    def exp(self) -> List[Fraction]:
        return series_reversion(self.log, self.M)

    def add(self, t1: PadicElem, t2: PadicElem) -> PadicElem:
        """The law evaluated at two points of the formal group (valuation >= 1)."""
        return self.law.evaluate([t1, t2])

    def multiply(self, m: int, t: PadicElem) -> PadicElem:
        """[m](t) for m >= 0."""
        result = t.ctx.zero(t.prec)
        for _ in range(m):
            result = self.add(result, t)
        return result

    def log_at(self, x: PadicElem) -> PadicElem:
        """ℓ(x) for v(x) >= 1; terms x^n/n are divided by p^v(n) exactly."""
        if x.is_unit():
            raise PNotInDomain("the formal logarithm needs a point of positive valuation")
        total = x.ctx.zero(x.prec)
        power = None
        for n in range(1, self.M + 1):
            power = x if n == 1 else power * x
            c = self.omega[n - 1]
            if not c:
                continue
            v, unit = split_p_power(n, self.p)
            term = power.divide_by_p(v) if v else power
            total = total + term * x.ctx.from_fraction(Fraction(c, unit), term.prec)
        return total

    def log_check(self, precision: int) -> bool:
        """ℓ(F(T1,T2)) = ℓ(T1) + ℓ(T2) up to degree M, modulo p^precision."""
        ring = self.law.ring.with_caps(coeff_precision=precision + _max_p_power(self.M, self.p))
        F = ring.embed(self.law)
        T1, T2 = ring.var("T1"), ring.var("T2")
        log = self.log
        difference = compose_series(log, F) - compose_series(log, T1) - compose_series(log, T2)
        return difference.is_zero()


def _max_p_power(M: int, p: int) -> int:
    v = 0
    while p ** (v + 1) <= M:
        v += 1
    return v


def _law_ring(p: int, M: int) -> DeltaRing:
    return DeltaRing(("T1", "T2"), 0, p, degree_cap=M)


def additive_formal_group(p: int, M: int = DEFAULTS.M) -> FormalGroupData:
    ring = _law_ring(p, M)
    law = ring.var("T1") + ring.var("T2")
    return FormalGroupData("additive", p, M, law, (1,) + (0,) * M)


def multiplicative_formal_group(p: int, M: int = DEFAULTS.M) -> FormalGroupData:
    ring = _law_ring(p, M)
    T1, T2 = ring.var("T1"), ring.var("T2")
    omega = tuple((-1) ** n for n in range(M + 1))
    return FormalGroupData("multiplicative", p, M, T1 + T2 + T1 * T2, omega)


def weierstrass_w(a4: int, a6: int, M: int) -> List[int]:
    """w(z) with w = z^3 + a4 z w^2 + a6 w^3, so that x = z/w and y = -1/w."""
    w = [0] * (M + 1)
    if M >= 3:
        w[3] = 1
    for _ in range(M // 2 + 2):
        w2 = series_mul(w, w, M)
        w3 = series_mul(w2, w, M)
        nxt = [0] * (M + 1)
        if M >= 3:
            nxt[3] = 1
        for n in range(M):
            nxt[n + 1] += a4 * w2[n]
        for n in range(M + 1):
            nxt[n] += a6 * w3[n]
        if nxt == w:
            break
        w = nxt
    return w


def weierstrass_omega(a4: int, a6: int, M: int) -> List[int]:
    """ω(z) = 1 + z u'(z)/(2u(z)) where w = z^3 u; integral for integral a4, a6."""
    w = weierstrass_w(a4, a6, M + 3)
    u = w[3:] + [0] * 3
    u = u[:M + 1]
    du = [(n + 1) * u[n + 1] for n in range(M)] + [0]
    z_du = [0] + du[:M]
    ratio = series_mul(z_du, series_inverse(u, M), M)
    omega = [Fraction(c) / 2 for c in ratio]
    omega[0] += 1
    if any(c.denominator != 1 for c in omega):
        raise IntegralityFailure("invariant differential has non-integral coefficients")
    return [int(c) for c in omega]


def elliptic_formal_group(a4: int, a6: int, p: int, M: int = DEFAULTS.M) -> FormalGroupData:
    """
    F(z1, z2) = z1 + z2 + (2 a4 λ ν + 3 a6 λ^2 ν)/(1 + a4 λ^2 + a6 λ^3)

    with λ the slope of the chord through (z1, w(z1)), (z2, w(z2)) and
    ν = w(z1) - λ z1.
    """
    ring = _law_ring(p, M)
    T1, T2 = ring.var("T1"), ring.var("T2")
    w = weierstrass_w(a4, a6, M)
    lam = ring.zero()
    for n in range(3, M + 1):
        if w[n]:
            lam = lam + w[n] * ring.from_terms(
                {(i, n - 1 - i): 1 for i in range(n)})
    nu = compose_series(w, T1) - lam * T1
    lam2 = lam * lam
    denominator_tail = a4 * lam2 + a6 * lam2 * lam
    inverse = ring.one()
    term = ring.one()
    for _ in range(M // 4 + 1):
        term = -(term * denominator_tail)
        if term.is_zero():
            break
        inverse = inverse + term
    numerator = (2 * a4 * lam + 3 * a6 * lam2) * nu
    law = T1 + T2 + numerator * inverse
    logger.debug("elliptic formal group law to degree %d: %d terms", M, len(law.raw_terms))
    return FormalGroupData("elliptic", p, M, law, tuple(weierstrass_omega(a4, a6, M)), a4, a6)


# kernel laws of the jet projections


@dataclass(frozen=True)
class KernelLaw:
    """
    components[j-1] = δ^j F restricted to T1 = T2 = 0, a series in the
    positive-order variables T1', ..., T1^(n), T2', ..., T2^(n).
    """

    order: int
    degree: int
    ring: DeltaRing
    components: Tuple[DeltaPoly, ...]

    def apply(self, first: Sequence, second: Sequence, target: DeltaRing) -> List[DeltaPoly]:
        images = {}
        for j in range(1, self.order + 1):
            images[self.ring.index("T1", j)] = first[j - 1]
            images[self.ring.index("T2", j)] = second[j - 1]
        return [c.substitute(images, target) for c in self.components]


def _restricted_delta(g: DeltaPoly) -> DeltaPoly:
    """δg restricted to T1 = T2 = 0 without expanding the T-dependence."""
    ring = g.ring
    p = ring.p
    images = {}
    zero = {}
    for i in range(ring.nvars):
        order = ring.order_of(i)
        if order == 0:
            images[i] = p * ring.var_at(i + ring.d)
            zero[i] = 0
        elif order < ring.max_order:
            images[i] = ring.var_at(i) ** p + p * ring.var_at(i + ring.d)
    restricted = g.substitute(zero)
    return (g.substitute(images) - restricted ** p).divide_by_p()


def kernel_law(F: FormalGroupData, n: int, degree: Optional[int] = None,
               precision: Optional[int] = None) -> KernelLaw:
    """
    The composition law of ker(J^n(G) -> Ĝ), truncated at total degree
    `degree` in the kernel coordinates and known modulo p^precision.
    """
    degree = F.M if degree is None else degree
    if degree > F.M:
        raise TruncationOverflow(f"kernel law of degree {degree} needs the group law beyond {F.M}")
    if n < 1:
        raise ValueError("the kernel law needs jet order at least 1")
    precision = max(1, F.M - n) if precision is None else precision
    ring = DeltaRing(("T1", "T2"), n, F.p, degree_cap=F.M, jet_degree_cap=degree,
                     coeff_precision=precision + n)
    layers = [ring.embed(F.law)]
    components = []
    for j in range(1, n + 1):
        components.append(_restricted_delta(layers[-1]))
        if j < n:
            layers.append(delta(layers[-1]))
    logger.debug("kernel law of %s at order %d, degree %d", F.name, n, degree)
    return KernelLaw(n, degree, ring, tuple(components))


def check_kernel_law(law: KernelLaw) -> Dict[str, bool]:
    """Associativity and two-sided unit, as identities of truncated series."""
    n = law.order
    prec = min(c.prec for c in law.components if c.prec is not None) if law.components else None
    target = DeltaRing(("A", "B", "C"), n, law.ring.p, jet_degree_cap=law.degree, coeff_precision=prec)
    a = [target.var("A", j) for j in range(1, n + 1)]
    b = [target.var("B", j) for j in range(1, n + 1)]
    c = [target.var("C", j) for j in range(1, n + 1)]
    zeros = [0] * n
    left = law.apply(law.apply(a, b, target), c, target)
    right = law.apply(a, law.apply(b, c, target), target)
    return {
        "associative": all(x == y for x, y in zip(left, right)),
        "unital": (all(x == y for x, y in zip(law.apply(a, zeros, target), a))
                   and all(x == y for x, y in zip(law.apply(zeros, a, target), a))),
    }


# elliptic curves


def count_points_ap(a4: int, a6: int, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for y^2 = x^3 + a4 x + a6, by enumeration."""
    if (4 * a4 ** 3 + 27 * a6 ** 2) % p == 0 or p == 2:
        raise BadReduction(f"y^2 = x^3 + {a4}x + {a6} has bad reduction at {p}")
    count = 1
    for x in range(p):
        g = (x ** 3 + a4 * x + a6) % p
        if g == 0:
            count += 1
        elif pow(g, (p - 1) // 2, p) == 1:
            count += 2
    return p + 1 - count


def hasse_bound_ok(a_p: int, p: int) -> bool:
    return a_p * a_p <= 4 * p


@dataclass(frozen=True)
class EllipticCurveData:
    """
    y^2 = x^3 + a4 x + a6 with good reduction at p.

    a_p is counted when not given; newform holds a_1..a_K when the curve is
    attached to a weight-2 newform.
    """

    a4: int
    a6: int
    p: int
    a_p: Optional[int] = None
    newform: Tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.p == 2 or (4 * self.a4 ** 3 + 27 * self.a6 ** 2) % self.p == 0:
            raise BadReduction(f"y^2 = x^3 + {self.a4}x + {self.a6} has bad reduction at {self.p}")
        if self.a_p is None:
            object.__setattr__(self, "a_p", count_points_ap(self.a4, self.a6, self.p))
        object.__setattr__(self, "newform", tuple(self.newform))

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a4 ** 3 + 27 * self.a6 ** 2)

    @property
    def is_ordinary(self) -> bool:
        return self.a_p % self.p != 0

    @property
    def point_count(self) -> int:
        return self.p + 1 - self.a_p

    def rhs(self, x):
        return x ** 3 + self.a4 * x + self.a6

    def formal_group(self, M: int = DEFAULTS.M) -> FormalGroupData:
        return elliptic_formal_group(self.a4, self.a6, self.p, M)

    @classmethod
    def from_json(cls, data: dict, p: Optional[int] = None) -> "EllipticCurveData":
        return cls(int(data["a4"]), int(data["a6"]), int(p if p is not None else data["p"]),
                   data.get("a_p"), tuple(data.get("newform", ())), data.get("label", ""))


# Curve with a rational 5-torsion point, short model of X_0(11).
X011 = {"a4": -13392, "a6": -1080432, "label": "11a1"}


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """(X : Y : Z) on y^2 z = x^3 + a4 x z^2 + a6 z^3 over Z_p / p^N."""

    curve: EllipticCurveData
    X: PadicElem
    Y: PadicElem
    Z: PadicElem

    @classmethod
    def identity(cls, curve: EllipticCurveData, ctx: PadicCtx) -> "ProjectivePoint":
        return cls(curve, ctx.zero(), ctx.one(), ctx.zero())

    def normalized(self) -> "ProjectivePoint":
        """Divide out the common power of p."""
        v = min(c.valuation() for c in (self.X, self.Y, self.Z))
        if v == 0:
            return self
        return ProjectivePoint(self.curve, self.X.divide_by_p(v), self.Y.divide_by_p(v),
                               self.Z.divide_by_p(v))

    def is_identity(self) -> bool:
        return self.X.is_zero() and self.Z.is_zero()

    def reduces_to_identity(self) -> bool:
        q = self.normalized()
        return q.Z.valuation() >= 1 and q.X.valuation() >= 1

    def on_curve(self) -> bool:
        X, Y, Z = self.X, self.Y, self.Z
        a4, a6 = self.curve.a4, self.curve.a6
        return (Y * Y * Z - X ** 3 - a4 * X * Z * Z - a6 * Z ** 3).is_zero()

    def parameter(self) -> PadicElem:
        """z = -x/y of a point in the kernel of reduction."""
        q = self.normalized()
        if not q.reduces_to_identity():
            raise PNotInDomain("point does not reduce to the identity mod p")
        return -(q.X / q.Y)

    def __add__(self, other: "ProjectivePoint") -> "ProjectivePoint":
        if self.is_identity():
            return other
        if other.is_identity():
            return self
        X1, Y1, Z1, X2, Y2, Z2 = self.X, self.Y, self.Z, other.X, other.Y, other.Z
        u = Y2 * Z1 - Y1 * Z2
        v = X2 * Z1 - X1 * Z2
        if u.is_zero() and v.is_zero():
            return self.double()
        vv = v * v
        vvv = v * vv
        R = vv * X1 * Z2
        A = u * u * Z1 * Z2 - vvv - 2 * R
        return ProjectivePoint(self.curve, v * A, u * (R - A) - vvv * Y1 * Z2, vvv * Z1 * Z2)

    def double(self) -> "ProjectivePoint":
        a4 = self.curve.a4
        X, Y, Z = self.X, self.Y, self.Z
        XX = X * X
        w = a4 * Z * Z + 3 * XX
        s = 2 * Y * Z
        ss = s * s
        R = Y * s
        RR = R * R
        B = (X + R) * (X + R) - XX - RR
        h = w * w - 2 * B
        return ProjectivePoint(self.curve, h * s, w * (B - h) - 2 * RR, s * ss)

    def multiple_in_kernel(self, cap: Optional[int] = None) -> Tuple[int, "ProjectivePoint"]:
        """Smallest m >= 1 with m·P in the kernel of reduction, and m·P."""
        if self.reduces_to_identity():
            return 1, self
        cap = cap or self.curve.p + 2 + 2 * math.isqrt(self.curve.p)
        current = self
        for m in range(2, cap + 1):
            current = self.double() if m == 2 else current + self
            current = current.normalized()
            if current.reduces_to_identity():
                return m, current
        raise PNotInDomain(f"no multiple up to {cap} reduces to the identity")


def lift_point(curve: EllipticCurveData, ctx: PadicCtx, x: int) -> ProjectivePoint:
    """Hensel-lift a point with abscissa x whose ordinate is a unit mod p."""
    p = curve.p
    g = curve.rhs(x) % p
    if g == 0 or pow(g, (p - 1) // 2, p) != 1:
        raise PNotInDomain(f"x = {x} has no unit ordinate mod {p}")
    y0 = next(y for y in range(1, p) if (y * y - g) % p == 0)
    X = ctx.from_int(x)
    target = curve.rhs(X)
    y = ctx.from_int(y0)
    for _ in range(ctx.N.bit_length() + 1):
        y = y - (y * y - target) / (2 * y)
    return ProjectivePoint(curve, X, y, ctx.one())


def random_point(curve: EllipticCurveData, ctx: PadicCtx, rng: random.Random) -> ProjectivePoint:
    while True:
        x = rng.randrange(curve.p)
        g = curve.rhs(x) % curve.p
        if g and pow(g, (curve.p - 1) // 2, curve.p) == 1:
            return lift_point(curve, ctx, x + curve.p * rng.randrange(curve.p ** (ctx.N - 1)))


def kernel_point(curve: EllipticCurveData, F: FormalGroupData, t: PadicElem) -> ProjectivePoint:
    """The point (t : -1 : w(t)) with formal parameter t."""
    if t.is_unit():
        raise PNotInDomain("a formal parameter must have positive valuation")
    w = weierstrass_w(curve.a4, curve.a6, F.M)
    value = t.ctx.zero(t.prec)
    for n, c in enumerate(w):
        if c:
            value = value + c * t ** n
    return ProjectivePoint(curve, t, -t.ctx.one(t.prec), value)


# δ-characters


@dataclass(frozen=True)
class DeltaCharacter:
    """
    A δ-character given by a series.

    multiplicative: order 1, series in u = x'/x^p.
    elliptic: order 2, series in T, T', T'' (formal parameter and its jets).
    """

    kind: str
    order: int
    p: int
    series: DeltaPoly
    truncation: int
    guaranteed_digits: int
    formal_group: Optional[FormalGroupData] = None
    a_p: Optional[int] = None

    def coefficient(self, mono: Sequence[int]) -> Fraction:
        return self.series.coefficient(tuple(mono))

    def evaluate(self, jet: Sequence[PadicElem]) -> PadicElem:
        """Value at a jet (x, δx) for G_m or (t, δt, δ²t) for a curve."""
        if self.kind == "multiplicative":
            x, dx = jet[0], jet[1]
            u = dx * x.inverse() ** self.p
            value = self.series.evaluate([u])
            return value.with_prec(min(value.prec, self.guaranteed_digits))
        t, t1, t2 = jet[0], jet[1], jet[2]
        p = self.p
        first = t ** p + p * t1
        second = first ** p + p * (t1 ** p + p * t2)
        F = self.formal_group
        total = F.log_at(second) - self.a_p * F.log_at(first) + p * F.log_at(t)
        return total.divide_by_p()


def gm_delta_character(p: int, truncation: int = DEFAULTS.M,
                       precision: int = DEFAULTS.N) -> DeltaCharacter:
    """Σ_{n<=M} (-1)^(n-1) p^(n-1)/n u^n with coefficients modulo p^precision."""
    ring = DeltaRing(("u",), 0, p, coeff_precision=precision)
    u = ring.var("u")
    parts = []
    for n in range(1, truncation + 1):
        parts.append(ring.const(Fraction((-1) ** (n - 1) * p ** (n - 1), n)) * u ** n)
    series = poly_sum(ring, parts)
    dropped = min(n - 1 - split_p_power(n, p)[0] for n in range(truncation + 1, truncation + 2 * p + 8))
    guaranteed = min(dropped, precision)
    if guaranteed < precision:
        warnings.warn(
            f"G_m δ-character truncated at degree {truncation} is exact to {guaranteed} digits only",
            PrecisionLossWarning)
    return DeltaCharacter("multiplicative", 1, p, series, truncation, guaranteed)


def elliptic_delta_character(curve: EllipticCurveData, truncation: int = DEFAULTS.M,
                             precision: int = DEFAULTS.N,
                             jet_degree: int = DEFAULTS.D) -> DeltaCharacter:
    """
    ψ = (ℓ(φ²T) - a_p ℓ(φT) + p ℓ(T))/p as a series in T, T', T''.

    T-degree is truncated at `truncation` and the degree in T', T'' at
    `jet_degree`; coefficients are kept modulo p^precision. A non-integral
    coefficient raises IntegralityFailure.
    """
    if not curve.is_ordinary:
        raise NotOrdinary(f"a_{curve.p} = {curve.a_p} is divisible by p")
    p = curve.p
    F = curve.formal_group(truncation)
    ring = DeltaRing(("T",), 2, p, degree_cap=truncation, jet_degree_cap=jet_degree,
                     coeff_precision=precision)
    T = ring.var("T")
    phi_t = phi(T)
    phi2_t = phi(phi_t)
    log = F.log
    total = compose_series(log, phi2_t) - curve.a_p * compose_series(log, phi_t) + p * compose_series(log, T)
    psi = total.divide_by_p()
    if not psi.is_integral():
        raise IntegralityFailure(
            f"ψ has a coefficient with denominator p^{psi.den}; check a_p or whether the curve is a canonical lift")
    logger.debug("elliptic δ-character: %d terms, coefficient precision %s", len(psi.raw_terms), psi.prec)
    return DeltaCharacter("elliptic", 2, p, psi, truncation, psi.prec, F, curve.a_p)


def psi_star(psi: DeltaCharacter, P: Union[PadicElem, ProjectivePoint],
             multiplier: Optional[int] = None) -> PadicElem:
    """
    ψ_*(P) for a unit P of G_m or a point of the curve.

    Points outside the kernel of reduction are moved into it by m·P with
    m prime to p, and ψ(m·P)/m is returned.
    """
    if psi.kind == "multiplicative":
        return psi.evaluate([P, fermat_quotient(P)])
    if multiplier is None:
        m, Q = P.multiple_in_kernel()
    else:
        m = multiplier
        Q = P
        for _ in range(m - 1):
            Q = Q + P
        Q = Q.normalized()
        if not Q.reduces_to_identity():
            raise PNotInDomain(f"{m}·P does not reduce to the identity")
    if m % psi.p == 0:
        raise PNotInDomain(f"the translation order {m} is divisible by p")
    t = Q.parameter()
    if t.is_zero():
        return t.ctx.zero(t.prec)
    jet = [t, fermat_quotient(t)]
    jet.append(fermat_quotient(jet[1]))
    value = psi.evaluate(jet)
    return value / m if m != 1 else value


@dataclass
class DPsiReport:
    """Both sides of p·dψ = (φ*² - a_p φ* + p)ω as (dT, dT', dT'') components."""

    lhs: Tuple[DeltaPoly, ...]
    rhs: Tuple[DeltaPoly, ...]
    degree: int
    precision: int
    loss: int
    holds: bool


def dpsi_identity(psi: DeltaCharacter, degree: int = 20) -> DPsiReport:
    if psi.kind != "elliptic":
        raise ValueError("the dψ identity concerns elliptic δ-characters")
    ring = psi.series.ring
    if degree >= ring.degree_cap:
        raise TruncationOverflow(f"degree {degree} needs ψ beyond T-degree {ring.degree_cap}")
    p = psi.p
    T = ring.var("T")
    phi_t = phi(T)
    phi2_t = phi(phi_t)
    omega = list(psi.formal_group.omega)
    pulled = [(compose_series(omega, phi2_t), phi2_t, 1),
              (compose_series(omega, phi_t), phi_t, -psi.a_p),
              (compose_series(omega, T), T, p)]
    jet_degree = ring.jet_degree_cap - 1 if ring.jet_degree_cap is not None else None
    lhs, rhs = [], []
    for k in range(3):
        left = p * psi.series.derivative(k)
        right = sum((scale * w * g.derivative(k) for w, g, scale in pulled), ring.zero())
        lhs.append(left.truncate(degree, jet_degree))
        rhs.append(right.truncate(degree, jet_degree))
    precs = [f.prec for f in lhs + rhs if f.prec is not None]
    precision = min(precs) if precs else ring.coeff_precision
    holds = all(a == b for a, b in zip(lhs, rhs))
    loss = (ring.coeff_precision or precision) - precision
    return DPsiReport(tuple(lhs), tuple(rhs), degree, precision, loss, holds)
