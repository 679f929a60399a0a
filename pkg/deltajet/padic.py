"""
Truncated p-adic arithmetic for deltajet.

Elements of W(F_q)/p^N (q = p^m) are stored as polynomials of degree < m in
a generator t of the unramified extension, with integer coefficients reduced
modulo p^prec. Every element knows its precision and operations never report
more digits than the operands support:

    a + b, a * b      -> min(a.prec, b.prec)
    a / u (u a unit)  -> min(a.prec, u.prec)
    a.divide_by_p()   -> a.prec - 1
    fermat_quotient   -> a.prec - 1

The Frobenius lift on the extension sends t to the Hensel-lifted root of the
defining polynomial congruent to t^p. It is computed once, when the context is
created.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from sympy import Poly, symbols

from .errors import (
    ContextMismatch,
    InsufficientPrecision,
    NotDivisibleByP,
    NotInvertible,
    NotPrime,
)

logger = logging.getLogger(__name__)

_t = symbols("t")


def is_prime(n: int) -> bool:
    """Trial division; the primes used here are small."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def balanced(n: int, modulus: int) -> int:
    """Representative of n mod modulus in (-modulus/2, modulus/2]."""
    n %= modulus
    return n - modulus if 2 * n > modulus else n


def valuation(n: int, p: int, cap: int) -> int:
    """p-adic valuation of an integer, capped (0 has valuation cap)."""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


# Polynomial arithmetic in (Z/modulus)[t]/(f), f monic of degree m, stored
# low-to-high.


def _reduce(coeffs: Sequence[int], f: Sequence[int], modulus: int) -> Tuple[int, ...]:
    m = len(f) - 1
    work = list(coeffs)
    for k in range(len(work) - 1, m - 1, -1):
        c = work[k]
        if c:
            for i in range(m):
                work[k - m + i] -= c * f[i]
            work[k] = 0
    work += [0] * (m - len(work))
    return tuple(x % modulus for x in work[:m])


def _poly_mul(a: Sequence[int], b: Sequence[int], f: Sequence[int], modulus: int):
    if len(a) == 1:
        return ((a[0] * b[0]) % modulus,)
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _reduce(prod, f, modulus)


def _poly_pow(a, e: int, f, modulus: int):
    result = _reduce([1], f, modulus)
    base = tuple(x % modulus for x in a)
    while e:
        if e & 1:
            result = _poly_mul(result, base, f, modulus)
        base = _poly_mul(base, base, f, modulus)
        e >>= 1
    return result


def _poly_eval(poly: Sequence[int], x, f, modulus: int):
    """Evaluate an integer polynomial (low-to-high) at a ring element x."""
    m = len(f) - 1
    acc = (0,) * m
    for c in reversed(poly):
        acc = _poly_mul(acc, x, f, modulus)
        acc = (acc[0] + c,) + tuple(acc[1:])
        acc = tuple(v % modulus for v in acc)
    return acc


def _poly_inverse(a, p: int, f, prec: int):
    """Inverse of a unit by Newton iteration from the residue-field inverse."""
    m = len(f) - 1
    q = p ** m
    x = _poly_pow(a, q - 2, f, p)
    if not any(x):
        raise NotInvertible("element is not a unit")
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p ** k
        ax = _poly_mul(a, x, f, mod)
        two_minus = tuple((-c) % mod for c in ax)
        two_minus = ((two_minus[0] + 2) % mod,) + two_minus[1:]
        x = _poly_mul(x, two_minus, f, mod)
    return x


def find_irreducible(p: int, m: int) -> Tuple[int, ...]:
    """First monic irreducible polynomial of degree m over F_p, low-to-high."""
    for index in range(p ** m):
        low = []
        n = index
        for _ in range(m):
            low.append(n % p)
            n //= p
        coeffs = low + [1]
        if Poly(list(reversed(coeffs)), _t, modulus=p).is_irreducible:
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {m} over F_{p}")


@dataclass(frozen=True)
class PadicCtx:
    """
    Working ring W(F_{p^m}) / p^N.

    Args:
        p: prime
        N: working precision (digits)
        ext_degree: degree m of the unramified extension
        ext_modulus: monic lift of an irreducible polynomial of degree m,
            coefficients low-to-high; chosen automatically when omitted
    """

    p: int
    N: int
    ext_degree: int = 1
    ext_modulus: Optional[Tuple[int, ...]] = None
    _frob_image: Tuple[int, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.N < 1:
            raise ValueError("precision N must be at least 1")
        if self.ext_degree < 1:
            raise ValueError("extension degree must be at least 1")
        m = self.ext_degree
        if m == 1:
            object.__setattr__(self, "ext_modulus", None)
            object.__setattr__(self, "_frob_image", (0,))
            return
        modulus = self.ext_modulus
        if modulus is None:
            modulus = find_irreducible(self.p, m)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("ext_modulus must be monic of degree ext_degree")
        if not Poly([c % self.p for c in reversed(modulus)], _t, modulus=self.p).is_irreducible:
            raise ValueError("ext_modulus is not irreducible mod p")
        object.__setattr__(self, "ext_modulus", modulus)
        object.__setattr__(self, "_frob_image", self._lift_frobenius())

    @property
    def q(self) -> int:
        return self.p ** self.ext_degree

    @property
    def modulus_poly(self) -> Tuple[int, ...]:
        return self.ext_modulus if self.ext_modulus is not None else (0, 1)

    def _lift_frobenius(self) -> Tuple[int, ...]:
        """Hensel-lift the root of the modulus congruent to t^p."""
        p, f = self.p, self.ext_modulus
        m = self.ext_degree
        gen = tuple(1 if i == 1 else 0 for i in range(m))
        theta = _poly_pow(gen, p, f, p)
        derivative = [i * f[i] for i in range(1, len(f))]
        k = 1
        while k < self.N:
            k = min(2 * k, self.N)
            mod = p ** k
            value = _poly_eval(f, theta, f, mod)
            slope = _poly_eval(derivative, theta, f, mod)
            step = _poly_mul(value, _poly_inverse(slope, p, f, k), f, mod)
            theta = tuple((a - b) % mod for a, b in zip(theta, step))
        logger.debug("Frobenius lift for p=%d m=%d: t -> %s", p, m, theta)
        return tuple(c % p ** self.N for c in theta)

    # constructors

    def element(self, coeffs: Union[int, Sequence[int]], prec: Optional[int] = None) -> "PadicElem":
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        coeffs = tuple(int(c) for c in coeffs)
        coeffs = coeffs + (0,) * (self.ext_degree - len(coeffs))
        if len(coeffs) != self.ext_degree:
            raise ValueError("too many coefficients for the extension degree")
        return PadicElem(self, coeffs, self.N if prec is None else prec)

    def from_int(self, n: int, prec: Optional[int] = None) -> "PadicElem":
        return self.element(n, prec)

    def from_fraction(self, value: Fraction, prec: Optional[int] = None) -> "PadicElem":
        """Rational with denominator prime to p."""
        value = Fraction(value)
        prec = self.N if prec is None else prec
        if value.denominator % self.p == 0:
            raise NotInvertible(f"denominator of {value} is divisible by p")
        mod = self.p ** prec
        return self.element(value.numerator * pow(value.denominator, -1, mod), prec)

    def zero(self, prec: Optional[int] = None) -> "PadicElem":
        return self.element(0, prec)

    def one(self, prec: Optional[int] = None) -> "PadicElem":
        return self.element(1, prec)

    def generator(self) -> "PadicElem":
        """The class of t (equals 0 on Z_p, where there is no generator)."""
        if self.ext_degree == 1:
            raise ValueError("Z_p has no extension generator")
        return self.element((0, 1))

    def random_element(self, rng: random.Random, prec: Optional[int] = None,
                       unit: bool = False) -> "PadicElem":
        prec = self.N if prec is None else prec
        mod = self.p ** prec
        while True:
            a = self.element([rng.randrange(mod) for _ in range(self.ext_degree)], prec)
            if not unit or a.is_unit():
                return a

    def parse(self, text: str, prec: Optional[int] = None) -> "PadicElem":
        """Decimal digit string, or a bracketed list of them for m > 1."""
        text = text.strip()
        if text.startswith("["):
            parts = [s for s in text.strip("[]").split(",") if s.strip()]
            return self.element([int(s) for s in parts], prec)
        if "/" in text:
            return self.from_fraction(Fraction(text), prec)
        return self.element(int(text), prec)


def _ensure_ctx(a: "PadicElem", b: "PadicElem") -> None:
    if a.ctx != b.ctx:
        raise ContextMismatch("elements belong to different p-adic contexts")


@dataclass(frozen=True, eq=False)
class PadicElem:
    """An element of W(F_q) known modulo p^prec."""

    ctx: PadicCtx
    coeffs: Tuple[int, ...]
    prec: int

    def __post_init__(self):
        if not 1 <= self.prec <= self.ctx.N:
            raise InsufficientPrecision(
                f"precision {self.prec} outside 1..{self.ctx.N}")
        mod = self.ctx.p ** self.prec
        object.__setattr__(self, "coeffs", tuple(c % mod for c in self.coeffs))

    __hash__ = None

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def modulus(self) -> int:
        return self.ctx.p ** self.prec

    def _coerce(self, other) -> "PadicElem":
        if isinstance(other, PadicElem):
            _ensure_ctx(self, other)
            return other
        if isinstance(other, int):
            return self.ctx.element(other, self.prec)
        if isinstance(other, Fraction):
            return self.ctx.from_fraction(other, self.prec)
        return NotImplemented

    # ring operations

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        return PadicElem(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicElem(self.ctx, tuple(-a for a in self.coeffs), self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        mod = self.ctx.p ** prec
        coeffs = _poly_mul(self.coeffs, other.coeffs, self.ctx.modulus_poly, mod)
        return PadicElem(self.ctx, coeffs, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if self.ctx.ext_degree == 1:
            return PadicElem(self.ctx, (pow(self.coeffs[0], e, self.modulus),), self.prec)
        return PadicElem(self.ctx, _poly_pow(self.coeffs, e, self.ctx.modulus_poly, self.modulus),
                         self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def inverse(self) -> "PadicElem":
        """Multiplicative inverse of a unit, at the same precision."""
        if not self.is_unit():
            raise NotInvertible("element is not a p-adic unit")
        if self.ctx.ext_degree == 1:
            return PadicElem(self.ctx, (pow(self.coeffs[0], -1, self.modulus),), self.prec)
        inv = _poly_inverse(self.coeffs, self.p, self.ctx.modulus_poly, self.prec)
        return PadicElem(self.ctx, inv, self.prec)

    def divide_by_p(self, k: int = 1) -> "PadicElem":
        """Exact division by p^k, consuming k digits."""
        if self.prec <= k:
            raise InsufficientPrecision(
                f"dividing by p^{k} needs precision > {k}, have {self.prec}")
        step = self.p ** k
        if any(c % step for c in self.coeffs):
            raise NotDivisibleByP(f"element is not divisible by p^{k}")
        return PadicElem(self.ctx, tuple(c // step for c in self.coeffs), self.prec - k)

    def with_prec(self, prec: int) -> "PadicElem":
        if prec > self.prec:
            raise InsufficientPrecision(f"cannot raise precision {self.prec} to {prec}")
        return PadicElem(self.ctx, self.coeffs, prec)

    # predicates

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def valuation(self) -> int:
        """min over coefficient valuations; prec when the element is 0."""
        return min(valuation(c, self.p, self.prec) for c in self.coeffs)

    def equals(self, other, prec: Optional[int] = None) -> bool:
        """Equality modulo p^min(precisions) (or a smaller prec if given)."""
        other = self._coerce(other)
        common = min(self.prec, other.prec)
        if prec is not None:
            common = min(common, prec)
        mod = self.p ** common
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __eq__(self, other):
        if not isinstance(other, (PadicElem, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    # Frobenius and the p-derivation

    def frobenius(self) -> "PadicElem":
        if self.ctx.ext_degree == 1:
            return self
        theta = self.ctx._frob_image
        value = _poly_eval(self.coeffs, theta, self.ctx.modulus_poly, self.modulus)
        return PadicElem(self.ctx, value, self.prec)

    def fermat_quotient(self) -> "PadicElem":
        return fermat_quotient(self)

    def residue(self) -> Tuple[int, ...]:
        return tuple(c % self.p for c in self.coeffs)

    def to_int(self) -> int:
        """Balanced integer representative (Z_p only)."""
        if self.ctx.ext_degree != 1:
            raise ValueError("to_int is only defined on Z_p")
        return balanced(self.coeffs[0], self.modulus)

    def digits(self) -> Tuple[str, ...]:
        return tuple(str(balanced(c, self.modulus)) for c in self.coeffs)

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.ctx.N, "m": self.ctx.ext_degree,
                "prec": self.prec, "digits": list(self.digits())}

    def __str__(self):
        body = self.digits()[0] if self.ctx.ext_degree == 1 else "[" + ", ".join(self.digits()) + "]"
        return f"{body} + O({self.p}^{self.prec})"

    def __repr__(self):
        return f"PadicElem({self})"


def frobenius(a: PadicElem) -> PadicElem:
    """Identity on Z_p; the Frobenius lift on unramified extensions."""
    return a.frobenius()


def fermat_quotient(a: PadicElem) -> PadicElem:
    """δ(a) = (φ(a) - a^p)/p at precision a.prec - 1."""
    if a.prec < 2:
        raise InsufficientPrecision("the Fermat quotient needs precision at least 2")
    return (a.frobenius() - a ** a.p).divide_by_p()


def teichmuller(ctx: PadicCtx, c: Union[int, Iterable[int]]) -> PadicElem:
    """The root of x^q = x congruent to c mod p, at full precision."""
    x = ctx.element(c if isinstance(c, int) else tuple(c))
    x = ctx.element(x.residue())
    for _ in range(ctx.N):
        x = x ** ctx.q
    return x
