"""
δ-Fourier series: truncated Laurent series in q with polynomial dependence
on q', ..., q^(r).

Coefficients live in Z_p and are kept modulo p^prec (prec = 1 is the mod-p
mode). δ acts through δq = q', δq^(j) = q^(j+1) and the identity Frobenius on
coefficients. Every series carries its caps: q-exponents up to M, degree in
q', ..., q^(r) up to D. Results of arithmetic carry the tightest caps the
operands support.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .config import DEFAULTS, Settings
from .deltapoly import DeltaPoly, DeltaRing, delta_iterates, poly_sum, split_p_power
from .errors import (
    ContextMismatch,
    DegreeBoundExceeded,
    DomainError,
    InexactDivision,
    InsufficientPrecision,
    NonIntegralParametrization,
    NotDeltaPSymmetric,
    NotOrdinary,
    OrderOverflow,
    TruncationOverflow,
)
from .groups import (
    EllipticCurveData,
    count_points_ap,
    elliptic_delta_character,
    series_inverse,
    series_mul,
    series_reversion,
    weierstrass_omega,
    weierstrass_w,
)
from .linalg import solve_mod_p
from .padic import balanced, is_prime

logger = logging.getLogger(__name__)

Key = Tuple[int, Tuple[int, ...]]


@dataclass(frozen=True, eq=False)
class DeltaSeries:
    """
    Σ c(a, b) q^a (q')^b1 ... (q^(r))^br with a <= M and b1 + ... + br <= D.

    terms maps (a, (b1, ..., br)) to a balanced representative modulo p^prec.
    """

    p: int
    r: int
    M: int
    D: int
    prec: int
    terms: Mapping[Key, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.prec < 1:
            raise InsufficientPrecision(f"series precision dropped to {self.prec}")
        mod = self.p ** self.prec
        clean: Dict[Key, int] = {}
        for (a, b), c in self.terms.items():
            b = tuple(b)
            if len(b) != self.r:
                raise ValueError(f"jet exponent {b} does not match order {self.r}")
            if a <= self.M and sum(b) <= self.D:
                clean[(a, b)] = clean.get((a, b), 0) + c
        clean = {k: balanced(c, mod) for k, c in clean.items()}
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c})

    __hash__ = None

    @property
    def mode(self) -> str:
        return "modp" if self.prec == 1 else "padic"

    @property
    def qmin(self) -> int:
        return min((a for a, _ in self.terms), default=0)

    @classmethod
    def zero(cls, p: int, r: int, M: int, D: int, prec: int) -> "DeltaSeries":
        return cls(p, r, M, D, prec, {})

    @classmethod
    def q(cls, p: int, r: int, M: int, D: int, prec: int, order: int = 0) -> "DeltaSeries":
        """q^(order) as a series."""
        if order > r:
            raise OrderOverflow(f"q^({order}) needs order {order}, have {r}")
        if order == 0:
            return cls(p, r, M, D, prec, {(1, (0,) * r): 1})
        b = tuple(1 if k == order - 1 else 0 for k in range(r))
        return cls(p, r, M, D, prec, {(0, b): 1})

    @classmethod
    def constant(cls, c: int, p: int, r: int, M: int, D: int, prec: int) -> "DeltaSeries":
        return cls(p, r, M, D, prec, {(0, (0,) * r): c})

    @classmethod
    def from_poly(cls, f: DeltaPoly, M: int, D: int, prec: int) -> "DeltaSeries":
        """From an integral polynomial of a ring with the single base variable q."""
        if f.ring.d != 1:
            raise ValueError("series come from rings with one base variable")
        if not f.is_integral():
            raise InexactDivision(f"{f} has a p in a denominator")
        r = f.ring.max_order
        return cls(f.ring.p, r, M, D, prec,
                   {(mono[0], tuple(mono[1:])): c for mono, c in f.raw_terms.items()})

    def _like(self, terms: Mapping[Key, int], **caps) -> "DeltaSeries":
        values = {"M": self.M, "D": self.D, "prec": self.prec}
        values.update(caps)
        return DeltaSeries(self.p, self.r, values["M"], values["D"], values["prec"], terms)

    def _check(self, other: "DeltaSeries"):
        if other.p != self.p or other.r != self.r:
            raise ContextMismatch(
                f"series over p={self.p}, r={self.r} and p={other.p}, r={other.r}")

    def __add__(self, other):
        if isinstance(other, int):
            other = DeltaSeries.constant(other, self.p, self.r, self.M, self.D, self.prec)
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return self._like(terms, M=min(self.M, other.M), D=min(self.D, other.D),
                          prec=min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self._like({k: c * other for k, c in self.terms.items()})
        self._check(other)
        # unknown terms above one cap meet the lowest terms of the other factor
        M = min(self.M + other.qmin, other.M + self.qmin)
        D = min(self.D, other.D)
        terms: Dict[Key, int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                a = a1 + a2
                b = tuple(x + y for x, y in zip(b1, b2))
                if a > M or sum(b) > D:
                    continue
                terms[(a, b)] = terms.get((a, b), 0) + c1 * c2
        return self._like(terms, M=M, D=D, prec=min(self.prec, other.prec))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = DeltaSeries.constant(1, self.p, self.r, self.M, self.D, self.prec)
        for _ in range(e):
            result = result * self
        return result

    def reduce(self, prec: int) -> "DeltaSeries":
        if prec > self.prec:
            raise InsufficientPrecision(f"cannot raise series precision {self.prec} to {prec}")
        return self._like(self.terms, prec=prec)

    def truncate(self, M: Optional[int] = None, D: Optional[int] = None) -> "DeltaSeries":
        return self._like(self.terms, M=self.M if M is None else min(M, self.M),
                          D=self.D if D is None else min(D, self.D))

    def coefficient(self, a: int, b: Sequence[int] = ()) -> int:
        b = tuple(b) or (0,) * self.r
        return self.terms.get((a, b), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def equals(self, other: "DeltaSeries") -> bool:
        """Agreement on the common caps and precision."""
        self._check(other)
        M, D = min(self.M, other.M), min(self.D, other.D)
        prec = min(self.prec, other.prec)
        difference = (self - other).truncate(M, D).reduce(prec)
        return difference.is_zero()

    def __eq__(self, other):
        if not isinstance(other, DeltaSeries):
            return NotImplemented
        return self.equals(other)

    def sorted_terms(self) -> List[Tuple[Key, int]]:
        return sorted(self.terms.items())

    def __str__(self):
        if not self.terms:
            return f"0 + O(q^{self.M + 1})"
        parts = []
        for (a, b), c in self.sorted_terms():
            factors = []
            if a:
                factors.append("q" if a == 1 else f"q^{a}")
            for k, e in enumerate(b):
                if e:
                    name = "q" + "'" * (k + 1)
                    factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ") + f" + O(q^{self.M + 1})"

    def to_json(self) -> dict:
        return {
            "header": {"p": self.p, "mode": self.mode, "M": self.M, "D": self.D,
                       "r": self.r, "prec": self.prec},
            "terms": [[a, list(b), c] for (a, b), c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DeltaSeries":
        h = data["header"]
        return cls(int(h["p"]), int(h["r"]), int(h["M"]), int(h["D"]), int(h.get("prec", 1)),
                   {(int(a), tuple(int(e) for e in b)): int(c) for a, b, c in data.get("terms", [])})


def load_series(path: str) -> DeltaSeries:
    with open(path, "r", encoding="utf-8") as fh:
        return DeltaSeries.from_json(json.load(fh))


def dump_series(s: DeltaSeries, path: Optional[str] = None) -> str:
    text = json.dumps(s.to_json(), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


# δ on series


def _exact_cap(s: DeltaSeries) -> int:
    """A q-cap that outlasts every negative power met while applying φ to s."""
    p = s.p
    return p * (abs(s.M) + 1) + p * (abs(s.qmin) + 1) * (s.D + 2)


def _phi_q_power(s: DeltaSeries, a: int, cache: Dict[int, DeltaSeries]) -> DeltaSeries:
    """φ(q)^a, with φ(q)^-1 = Σ_k (-p)^k (q')^k q^(-p(k+1)) cut at jet degree D."""
    if a in cache:
        return cache[a]
    p, r = s.p, s.r
    big_M = _exact_cap(s)
    if a >= 0:
        base = DeltaSeries(p, r, big_M, s.D, s.prec, {(p, (0,) * r): 1})
        base = base + DeltaSeries.q(p, r, big_M, s.D, s.prec, 1) * p
        value = base ** a
    else:
        terms = {}
        for k in range(s.D + 1):
            terms[(-p * (k + 1), (k,) + (0,) * (r - 1))] = (-p) ** k
        value = DeltaSeries(p, r, big_M, s.D, s.prec, terms) ** (-a)
    cache[a] = value
    return value


def frobenius_series(s: DeltaSeries) -> DeltaSeries:
    """φ(s): q -> q^p + p q', q^(j) -> (q^(j))^p + p q^(j+1)."""
    p, r = s.p, s.r
    for (a, b) in s.terms:
        if r == 0 and a:
            raise OrderOverflow("φ(q) involves q', so the series needs order at least 1")
        if r and b[-1]:
            raise OrderOverflow(f"δ of a series in q^({r}) needs order {r + 1}")
    # unknown terms q^n, n > M, reach exponent p(n - k) with a factor p^k, k <= min(D, prec - 1)
    spill = min(s.D, s.prec - 1)
    M = p * (s.M + 1 - spill) - 1
    big_M = _exact_cap(s)
    cache: Dict[int, DeltaSeries] = {0: DeltaSeries.constant(1, p, r, big_M, s.D, s.prec)}
    jets = []
    for k in range(r):
        image = DeltaSeries(p, r, big_M, s.D, s.prec,
                            {(0, tuple(p if i == k else 0 for i in range(r))): 1})
        if k + 1 < r:
            image = image + p * DeltaSeries.q(p, r, big_M, s.D, s.prec, k + 2)
        jets.append(image)
    total = DeltaSeries.zero(p, r, big_M, s.D, s.prec)
    for (a, b), c in s.terms.items():
        term = _phi_q_power(s, a, cache)
        for k, e in enumerate(b):
            if e:
                term = term * jets[k] ** e
        total = total + c * term
    return total.truncate(M=M)


def delta_on_series(s: DeltaSeries) -> DeltaSeries:
    """δs = (φ(s) - s^p)/p at precision prec - 1."""
    if s.prec < 2:
        raise InsufficientPrecision("δ on series needs precision at least 2")
    p = s.p
    image = frobenius_series(s)
    power = s ** p
    M = min(image.M, power.M)
    if M < s.qmin:
        raise TruncationOverflow(f"no reliable terms remain after δ (cap {M})")
    difference = (image - power).truncate(M=M)
    terms = {}
    for k, c in difference.terms.items():
        if c % p:
            raise InexactDivision(f"φ(s) - s^p is not divisible by p at {k}")
        terms[k] = c // p
    return difference._like(terms, prec=s.prec - 1)


# the f¹ series and the U-operator


def f1_series(p: int, M: int = DEFAULTS.M, D: int = DEFAULTS.D, prec: int = DEFAULTS.N,
              r: int = 1) -> DeltaSeries:
    """Σ_{n<=D} (-1)^(n-1) p^(n-1)/n (q'/q^p)^n."""
    if r < 1:
        raise OrderOverflow("f¹ involves q', so r must be at least 1")
    mod = p ** prec
    terms = {}
    for n in range(1, D + 1):
        v, unit = split_p_power(n, p)
        exponent = n - 1 - v
        if exponent >= prec:
            continue
        c = (-1) ** (n - 1) * p ** exponent * pow(unit, -1, mod)
        terms[(-p * n, tuple(n if k == 0 else 0 for k in range(r)))] = c
    return DeltaSeries(p, r, M, D, prec, terms)


def fourier_part(s: DeltaSeries) -> DeltaSeries:
    """Set q' = ... = q^(r) = 0."""
    return s._like({k: c for k, c in s.terms.items() if not any(k[1])})


def u_operator(s: DeltaSeries) -> DeltaSeries:
    """Σ c_n q^n -> Σ c_(np) q^n on a series in q alone."""
    if any(any(b) for _, b in s.terms):
        raise ValueError("the U-operator acts on series in q only")
    p = s.p
    terms = {(a // p, b): c for (a, b), c in s.terms.items() if a % p == 0}
    return s._like(terms, M=s.M // p)


def is_primitive(s: DeltaSeries) -> bool:
    """The q-part of s is killed by U."""
    return u_operator(fourier_part(s)).is_zero()


# newforms


@dataclass(frozen=True)
class NewformData:
    """a_1, ..., a_K of a weight-2 newform of the given level."""

    coefficients: Tuple[int, ...]
    level: int
    weight: int = 2
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if not self.coefficients or self.coefficients[0] != 1:
            raise DomainError("a newform is normalized with a_1 = 1")

    @property
    def K(self) -> int:
        return len(self.coefficients)

    def a(self, n: int) -> int:
        if not 1 <= n <= self.K:
            raise TruncationOverflow(f"a_{n} is beyond the {self.K} known coefficients")
        return self.coefficients[n - 1]

    def check_multiplicativity(self) -> bool:
        return all(self.a(m * n) == self.a(m) * self.a(n)
                   for m in range(2, self.K + 1) for n in range(m + 1, self.K // m + 1)
                   if gcd(m, n) == 1)

    def check_hasse(self) -> bool:
        return all(self.a(ell) ** 2 <= 4 * ell for ell in range(2, self.K + 1)
                   if is_prime(ell) and self.level % ell)

    def q_expansion(self, p: int, M: int, prec: int, r: int = 0) -> DeltaSeries:
        return DeltaSeries(p, r, M, DEFAULTS.D, prec,
                           {(n, (0,) * r): self.a(n) for n in range(1, min(M, self.K) + 1)})

    def to_json(self) -> dict:
        return {"level": self.level, "weight": self.weight, "label": self.label,
                "coefficients": list(self.coefficients)}

    @classmethod
    def from_json(cls, data: dict) -> "NewformData":
        return cls(tuple(data["coefficients"]), int(data["level"]), int(data.get("weight", 2)),
                   data.get("label", ""))


def eta_product(exponents: Mapping[int, int], degree: int) -> List[int]:
    """
    q^(Σ d e / 24) Π_d Π_n (1 - q^(dn))^e as coefficients c_0..c_degree.

    The leading exponent must be an integer.
    """
    lead = sum(d * e for d, e in exponents.items())
    if lead % 24:
        raise DomainError(f"eta quotient has fractional leading exponent {lead}/24")
    lead //= 24
    body = [0] * (degree + 1)
    body[0] = 1
    for d, e in exponents.items():
        for n in range(1, degree // d + 1):
            factor = [0] * (degree + 1)
            factor[0] = 1
            factor[d * n] = -1
            if e < 0:
                factor = [int(c) for c in series_inverse(factor, degree)]
            for _ in range(abs(e)):
                body = series_mul(body, factor, degree)
    out = [0] * (degree + 1)
    for n in range(degree + 1 - lead):
        out[n + lead] = body[n]
    return out


def newform_from_traces(a4: int, a6: int, K: int, level: int,
                        traces: Optional[Mapping[int, int]] = None, label: str = "") -> NewformData:
    """
    a_1..a_K from prime traces: counted on y^2 = x^3 + a4 x + a6 unless given
    in `traces` (required for primes dividing the level and for p = 2).
    Prime powers follow a_(l^(k+1)) = a_l a_(l^k) - l a_(l^(k-1)) at good
    primes and a_(l^k) = a_l^k at bad ones.
    """
    traces = dict(traces or {})
    a = [0] * (K + 1)
    a[1] = 1
    for ell in range(2, K + 1):
        if not is_prime(ell):
            continue
        if ell in traces:
            a_l = traces[ell]
        elif level % ell == 0 or ell == 2:
            raise DomainError(f"a_{ell} must be supplied for the prime {ell}")
        else:
            a_l = count_points_ap(a4, a6, ell)
        good = level % ell != 0
        prev, cur, power = 1, a_l, ell
        while power <= K:
            a[power] = cur
            prev, cur = cur, (a_l * cur - ell * prev) if good else a_l * cur
            power *= ell
    for n in range(2, K + 1):
        if is_prime_power(n):
            continue
        m = smallest_prime_power_factor(n)
        a[n] = a[m] * a[n // m]
    return NewformData(tuple(a[1:]), level, 2, label)


def is_prime_power(n: int) -> bool:
    return smallest_prime_power_factor(n) == n


def smallest_prime_power_factor(n: int) -> int:
    """The full power of the smallest prime dividing n (n >= 2)."""
    ell = next(d for d in range(2, n + 1) if n % d == 0)
    power = ell
    while n % (power * ell) == 0:
        power *= ell
    return power


def classical_hecke(coefficients: Sequence[int], ell: int, weight: int = 2) -> List[int]:
    """T(ℓ) on Σ c_n q^n: b_n = c_(nℓ) + ℓ^(k-1) c_(n/ℓ)."""
    degree = (len(coefficients) - 1) // ell
    out = []
    for n in range(degree + 1):
        b = coefficients[n * ell]
        if n % ell == 0:
            b += ell ** (weight - 1) * coefficients[n // ell]
        out.append(b)
    return out


# f♯ for a newform attached to an ordinary curve


def fsharp_formula(newform: NewformData, p: int, a_p: int, qdeg: int = 20,
                   D: int = DEFAULTS.D, r: int = 2) -> DeltaSeries:
    """
    Σ_{(n,p)=1} (a_n/n) q^n - a_p (Σ a_m q^(mp)) (q'/q^p) + (Σ a_m q^(mp²)) (q'/q^p)^p  mod p
    """
    terms: Dict[Key, int] = {}
    zero = (0,) * r
    prime_jet = tuple(1 if k == 0 else 0 for k in range(r))
    p_jet = tuple(p if k == 0 else 0 for k in range(r))
    for n in range(1, qdeg + 1):
        if n % p:
            terms[(n, zero)] = terms.get((n, zero), 0) + newform.a(n) * pow(n, -1, p)
    for m in range(1, qdeg // p + 2):
        exponent = m * p - p
        if exponent <= qdeg:
            terms[(exponent, prime_jet)] = terms.get((exponent, prime_jet), 0) - a_p * newform.a(m)
    for m in range(1, qdeg // (p * p) + 2):
        exponent = m * p * p - p * p
        if exponent <= qdeg:
            terms[(exponent, p_jet)] = terms.get((exponent, p_jet), 0) + newform.a(m)
    return DeltaSeries(p, r, qdeg, D, 1, terms)


@dataclass
class Parametrization:
    """z(q) = Σ a_n q^n / n, t(q) = exp_E(z(q)), x = t/w(t), y = -1/w(t) (Laurent, shifted)."""

    z: List[Fraction]
    t: List[Fraction]
    x: List[Fraction]
    y: List[Fraction]
    x_shift: int = 2
    y_shift: int = 3


def modular_parametrization(curve: EllipticCurveData, newform: NewformData,
                            degree: int = 20) -> Parametrization:
    """The formal parameter of the curve along the newform; p-integrality is checked."""
    p = curve.p
    z = [Fraction(0)] + [Fraction(newform.a(n), n) for n in range(1, degree + 1)]
    omega = weierstrass_omega(curve.a4, curve.a6, degree)
    log = [Fraction(0)] + [Fraction(omega[n - 1], n) for n in range(1, degree + 1)]
    exp = series_reversion(log, degree)
    t = compose_fraction_series(exp, z, degree)
    for n, c in enumerate(t):
        if c.denominator % p == 0:
            raise NonIntegralParametrization(f"t(q) has coefficient {c} at q^{n}, not {p}-integral")
    w = weierstrass_w(curve.a4, curve.a6, degree + 3)
    u = [Fraction(c) for c in w[3:degree + 4]]
    t_over_q = t[1:] + [Fraction(0)]
    u_of_t = compose_fraction_series(u, t, degree)
    cube = series_mul(series_mul(t_over_q, t_over_q, degree), t_over_q, degree)
    inv = series_inverse(series_mul(cube, u_of_t, degree), degree)
    y = [-c for c in inv]
    x = series_mul(t_over_q, inv, degree)
    logger.debug("modular parametrization of %s to degree %d", curve.label or "E", degree)
    return Parametrization(z, t, x, y)


def compose_fraction_series(f: Sequence[Fraction], g: Sequence[Fraction], degree: int) -> List[Fraction]:
    """f(g(q)) for g = O(q)."""
    out = [Fraction(0)] * (degree + 1)
    power = [Fraction(1)] + [Fraction(0)] * degree
    for n, c in enumerate(f[:degree + 1]):
        if n:
            power = series_mul(power, g, degree)
        if c:
            for k in range(degree + 1):
                out[k] += c * power[k]
    return out


def formal_sum_series(curve: EllipticCurveData, t1: Sequence[Fraction], t2: Sequence[Fraction],
                      degree: int) -> List[Fraction]:
    """F(t1(q), t2(q)) = exp(ℓ(t1) + ℓ(t2)) for the formal group of the curve."""
    F = curve.formal_group(degree)
    log1 = compose_fraction_series(F.log, [Fraction(c) for c in t1], degree)
    log2 = compose_fraction_series(F.log, [Fraction(c) for c in t2], degree)
    return compose_fraction_series(F.exp(), [a + b for a, b in zip(log1, log2)], degree)


def _evaluate_on_jet(series: DeltaPoly, jet: Sequence[DeltaPoly]) -> DeltaPoly:
    """series(T, T', T'') at T^(k) = jet[k]; Horner in T'' and T' over powers of jet[0]."""
    t0, t1, t2 = jet
    ring = t0.ring
    blocks: Dict[Tuple[int, int], Dict[int, int]] = {}
    for (a, b, c), coeff in series.raw_terms.items():
        blocks.setdefault((b, c), {})[a] = coeff
    top_a = max((mono[0] for mono in series.raw_terms), default=0)
    powers = [ring.one()]
    for _ in range(top_a):
        powers.append(powers[-1] * t0)
    top_b = max((b for b, _ in blocks), default=0)
    top_c = max((c for _, c in blocks), default=0)
    result = ring.zero()
    for c in range(top_c, -1, -1):
        inner = ring.zero()
        for b in range(top_b, -1, -1):
            block = blocks.get((b, c), {})
            inner = inner * t1 + poly_sum(ring, [powers[a] * coeff for a, coeff in block.items()])
        result = result * t2 + inner
    return result.scale_p(series.den)


def psi_on_series(curve: EllipticCurveData, t: Sequence[Fraction], qdeg: int = 20,
                  D: int = DEFAULTS.D) -> DeltaSeries:
    """
    ψ(t, δt, δ²t) mod p for a p-integral t(q) = O(q), with δq = q'.

    Mod p, every monomial of δt and δ²t has positive jet degree or q-degree
    at least p, so ψ is needed to jet degree D + qdeg//p only.
    """
    p = curve.p
    if t and t[0]:
        raise ValueError("t(q) must vanish at q = 0")
    cap = max(qdeg, 2)
    if len(t) <= cap:
        raise TruncationOverflow(f"t(q) is known to q^{len(t) - 1}, need q^{cap}")
    ring = DeltaRing(("q",), 2, p, degree_cap=cap, jet_degree_cap=D, coeff_precision=3)
    t0 = ring.from_terms({(n, 0, 0): Fraction(c) for n, c in enumerate(t[:cap + 1]) if n and c})
    if not t0.is_integral():
        raise NonIntegralParametrization(f"t(q) is not {p}-integral")
    jet = [f.reduce_mod(1) for f in delta_iterates(t0, 2)]
    psi = elliptic_delta_character(curve, truncation=cap, precision=3, jet_degree=D + cap // p)
    value = _evaluate_on_jet(psi.series.reduce_mod(1), jet)
    logger.debug("ψ along t(q): %d character terms, %d series terms",
                 len(psi.series.raw_terms), len(value.raw_terms))
    return DeltaSeries.from_poly(value.truncate(degree=qdeg, jet_degree=D), qdeg, D, 1)


def fsharp_construction(curve: EllipticCurveData, param: Parametrization, qdeg: int = 20,
                        D: int = DEFAULTS.D) -> DeltaSeries:
    """The elliptic δ-character at the jet of t(q) along the modular parametrization."""
    return psi_on_series(curve, param.t, qdeg, D)


@dataclass
class FSharpReport:
    formula: DeltaSeries
    construction: DeltaSeries
    difference: DeltaSeries

    @property
    def agree(self) -> bool:
        return self.difference.is_zero()

    def to_json(self) -> dict:
        return {"agree": self.agree, "formula": self.formula.to_json(),
                "construction": self.construction.to_json(),
                "difference": self.difference.to_json()}


def fsharp_expansion(curve: EllipticCurveData, newform: NewformData, qdeg: int = 20,
                     D: int = DEFAULTS.D) -> FSharpReport:
    """Closed formula and construction of f♯ mod p, and their difference."""
    p = curve.p
    if newform.level % p == 0:
        raise NonIntegralParametrization(f"p = {p} divides the level {newform.level}")
    if not curve.is_ordinary:
        raise NotOrdinary(f"a_{p} = {curve.a_p} is divisible by p")
    if newform.K < qdeg:
        raise TruncationOverflow(f"{newform.K} coefficients cannot reach q-degree {qdeg}")
    if newform.K >= p and newform.a(p) != curve.a_p:
        raise DomainError(f"newform a_{p} = {newform.a(p)} but the curve has a_{p} = {curve.a_p}")
    param = modular_parametrization(curve, newform, max(qdeg, 2))
    formula = fsharp_formula(newform, p, curve.a_p, qdeg, D)
    construction = fsharp_construction(curve, param, qdeg, D)
    difference = (formula - construction).truncate(M=qdeg, D=D)
    logger.info("f♯ mod %d to q^%d: %d formula terms, difference %s",
                p, qdeg, len(formula.terms), "zero" if difference.is_zero() else "non-zero")
    return FSharpReport(formula, construction, difference)


# the mod-p Hecke operator "pT_m(p)"


def _monomials_of_weight(weights: Sequence[int], target: int, max_factors: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    current: List[int] = []

    def rec(i: int, remaining: int, left: int):
        if remaining == 0:
            out.append(tuple(current) + (0,) * (len(weights) - i))
            return
        if i == len(weights) or left == 0:
            return
        w = weights[i]
        for e in range(min(remaining // w, left) + 1):
            current.append(e)
            rec(i + 1, remaining - e * w, left - e)
            current.pop()

    rec(0, target, max_factors)
    return out


@lru_cache(maxsize=None)
def _symmetric_setup(p: int, r: int):
    """x_1..x_p to order r and the images δ^k(e_j(x)) mod p of the s-variables."""
    ring = DeltaRing(tuple(f"x{i}" for i in range(1, p + 1)), r, p)
    xs = [ring.var_at(i) for i in range(p)]
    e = [ring.one()] + [ring.zero()] * p
    for x in xs:
        for j in range(p, 0, -1):
            e[j] = e[j] + e[j - 1] * x
    s_vars: List[Tuple[int, int]] = []
    images: List[DeltaPoly] = []
    for j in range(1, p + 1):
        for k, f in enumerate(delta_iterates(e[j], r)):
            s_vars.append((j, k))
            images.append(f.reduce_mod(1))
    return ring, s_vars, images


def _symmetrized(f: DeltaSeries, ring: DeltaRing) -> DeltaPoly:
    """Σ_i f(x_i, x_i', ..., x_i^(r)) mod p."""
    p, r = f.p, f.r
    terms: Dict[Tuple[int, ...], int] = {}
    for (a, b), c in f.terms.items():
        for i in range(p):
            mono = [0] * ring.nvars
            mono[ring.index(f"x{i + 1}", 0)] += a
            for k, e in enumerate(b):
                mono[ring.index(f"x{i + 1}", k + 1)] += e
            key = tuple(mono)
            terms[key] = terms.get(key, 0) + c
    return DeltaPoly.build(ring, terms, 0, 1)


def symmetric_solve(f: DeltaSeries, settings: Settings = DEFAULTS) -> Dict[Tuple[Tuple[int, int], ...], int]:
    """
    f_(p): a polynomial G in s_j^(k) with G(δ^k e_j(x)) ≡ Σ_i f(x_i, ...) mod p.

    Returned as {((j, k), exponent) pairs: coefficient}. The system splits by
    weight, s_j^(k) having weight j p^k.
    """
    p, r = f.p, f.r
    if f.qmin < 0:
        raise ValueError("the symmetric solve needs a power series in q")
    ring, s_vars, images = _symmetric_setup(p, r)
    weights = [j * p ** k for j, k in s_vars]
    F = _symmetrized(f.reduce(1), ring)

    def weight_of(mono: Tuple[int, ...]) -> int:
        return sum(e * p ** ring.order_of(i) for i, e in enumerate(mono))

    by_weight: Dict[int, Dict[Tuple[int, ...], int]] = {}
    for mono, c in F.raw_terms.items():
        by_weight.setdefault(weight_of(mono), {})[mono] = c % p
    for (a, b), c in f.terms.items():
        # weights of f's own terms must be searched even when Σ_i cancels them mod p
        w = a + sum(e * p ** (k + 1) for k, e in enumerate(b))
        by_weight.setdefault(w, {})
    solution: Dict[Tuple[Tuple[int, int], ...], int] = {}
    power_cache: Dict[Tuple[int, int], DeltaPoly] = {}

    def power(i: int, e: int) -> DeltaPoly:
        if (i, e) not in power_cache:
            power_cache[(i, e)] = images[i] ** e
        return power_cache[(i, e)]

    for w in sorted(by_weight):
        candidates = _monomials_of_weight(weights, w, settings.sym_degree)
        if len(candidates) > settings.linear_unknowns_cap:
            raise DegreeBoundExceeded(
                f"{len(candidates)} symmetric monomials of weight {w} exceed the cap")
        columns = []
        for mu in candidates:
            value = ring.one().reduce_mod(1)
            for i, e in enumerate(mu):
                if e:
                    value = value * power(i, e)
            columns.append(value)
        target = by_weight[w]
        keys = sorted(set(target) | {m for col in columns for m in col.raw_terms})
        index = {m: n for n, m in enumerate(keys)}
        rows: List[Dict[int, int]] = [dict() for _ in keys]
        for col, value in enumerate(columns):
            for mono, c in value.raw_terms.items():
                if c % p:
                    rows[index[mono]][col] = c % p
        rhs = [target.get(m, 0) for m in keys]
        x = solve_mod_p(rows, rhs, len(candidates), p)
        if x is None:
            raise NotDeltaPSymmetric(
                f"no polynomial in the symmetric δ-functions of degree <= {settings.sym_degree} "
                f"matches weight {w}")
        for mu, c in zip(candidates, x):
            if c:
                solution[tuple((s_vars[i], e) for i, e in enumerate(mu) if e)] = c
        logger.debug("symmetric solve: weight %d, %d unknowns", w, len(candidates))
    return solution


def is_delta_p_symmetric(f: DeltaSeries, settings: Settings = DEFAULTS) -> bool:
    try:
        symmetric_solve(f, settings)
    except NotDeltaPSymmetric:
        return False
    return True


@lru_cache(maxsize=None)
def _q_power_jets(p: int, r: int) -> List[DeltaPoly]:
    """δ^k(q^p) mod p for k <= r."""
    ring = DeltaRing(("q",), r, p)
    return [g.reduce_mod(1) for g in delta_iterates(ring.var("q") ** p, r)]


def hecke_pTm(f: DeltaSeries, m: int, settings: Settings = DEFAULTS) -> DeltaSeries:
    """
    "pT_m(p)" f = f_(p)(0, ..., 0, q, ..., 0, ..., 0, q^(r)) + p^m f(q^p, ..., δ^r(q^p)) mod p.

    In each block s_1^(k), ..., s_p^(k) the last variable receives q^(k) and the
    others 0. The second term survives only for m = 0.
    """
    p, r = f.p, f.r
    f = f.reduce(1)
    G = symmetric_solve(f, settings)
    reliable = min(f.M, p * (f.D + 1) - 1)
    M = reliable // p
    D = min(f.D, reliable // (p * p)) if r else f.D
    terms: Dict[Key, int] = {}
    for mono, c in G.items():
        if any(j != p for (j, _), _ in mono):
            continue
        exps = [0] * (r + 1)
        for (_, k), e in mono:
            exps[k] += e
        key = (exps[0], tuple(exps[1:]))
        terms[key] = terms.get(key, 0) + c
    result = DeltaSeries(p, r, M, D, 1, terms)
    if m == 0:
        ring = DeltaRing(("q",), r, p, degree_cap=M, jet_degree_cap=D)
        jets = [ring.embed(g) for g in _q_power_jets(p, r)]
        parts = ring.zero()
        for (a, b), c in f.terms.items():
            term = ring.const(c) * jets[0] ** a
            for k, e in enumerate(b):
                if e:
                    term = term * jets[k + 1] ** e
            parts = parts + term
        result = result + DeltaSeries.from_poly(parts.reduce_mod(1), M, D, 1)
    return result
