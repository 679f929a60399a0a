"""
p-typical Witt vectors of finite length.

A vector (a_0, ..., a_m) has ghost components w_k = sum_{j<=k} p^j a_j^(p^(k-j)).
Sums, products, negatives, the Frobenius F and the comonad map are given by
universal integral polynomials, derived once per (p, length) by inverting the
ghost map over Q[X, Y] and checking that every division by p was exact.

Components may be PadicElem, exact Python integers, or Witt vectors
themselves (the nested vectors produced by comonad_map).
"""

import itertools
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, List, Optional, Sequence, Tuple

from .config import DEFAULTS, Settings
from .deltapoly import DeltaPoly, DeltaRing, poly_sum
from .errors import (
    CapExceeded,
    InexactDivision,
    LengthMismatch,
    ParseError,
    PresentationUnverified,
)
from .jetspace import SchemePresentation
from .padic import PadicCtx, PadicElem

logger = logging.getLogger(__name__)


def _scalar(n: int, like: Any):
    """The integer n in the coefficient ring of `like`."""
    if isinstance(like, PadicElem):
        return like.ctx.element(n, like.prec)
    if isinstance(like, WittVector):
        return WittVector.from_int(n, like.p, like.length, like.components[0])
    return n


def _same(a: Any, b: Any) -> bool:
    if isinstance(a, PadicElem):
        return a.equals(b)
    return a == b


@dataclass(frozen=True, eq=False)
class WittVector:
    """(a_0, ..., a_m) in W_m(R)."""

    p: int
    components: Tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("a Witt vector has at least one component")

    __hash__ = None

    @property
    def length(self) -> int:
        return len(self.components)

    @property
    def m(self) -> int:
        return self.length - 1

    @classmethod
    def from_int(cls, n: int, p: int, length: int, like: Any = None) -> "WittVector":
        """The image of n under Z -> W_m(Z) -> W_m(R); ghost components (n, ..., n)."""
        comps: List[int] = []
        for k in range(length):
            rest = n - sum(p ** j * comps[j] ** (p ** (k - j)) for j in range(k))
            if rest % p ** k:
                raise InexactDivision(f"integer ghost inversion failed at component {k}")
            comps.append(rest // p ** k)
        return cls(p, tuple(_scalar(c, like) for c in comps))

    @classmethod
    def zero(cls, p: int, length: int, like: Any = None) -> "WittVector":
        return cls(p, tuple(_scalar(0, like) for _ in range(length)))

    @classmethod
    def one(cls, p: int, length: int, like: Any = None) -> "WittVector":
        return cls.from_int(1, p, length, like)

    @classmethod
    def basis(cls, p: int, length: int, i: int, like: Any = None) -> "WittVector":
        """v_i = (0, ..., 0, 1, 0, ..., 0) with the 1 in position i."""
        return cls(p, tuple(_scalar(1 if k == i else 0, like) for k in range(length)))

    @classmethod
    def parse(cls, text: str, p: int, ctx: Optional[PadicCtx] = None) -> "WittVector":
        """Bracketed component list such as "[0, 1]"; integers unless a context is given."""
        stripped = text.strip()
        if not (stripped.startswith("[") and stripped.endswith("]")):
            raise ParseError("expected a bracketed component list", text, 0)
        comps = []
        offset = text.index("[") + 1
        for part in stripped[1:-1].split(","):
            token = part.strip()
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"bad component {token!r}", text, offset + part.find(token))
            comps.append(ctx.element(value) if ctx is not None else value)
            offset += len(part) + 1
        return cls(p, tuple(comps))

    def _coerce(self, other) -> "WittVector":
        if isinstance(other, int):
            return WittVector.from_int(other, self.p, self.length, self.components[0])
        if not isinstance(other, WittVector):
            raise TypeError(f"cannot combine a Witt vector with {type(other).__name__}")
        if other.p != self.p or other.length != self.length:
            raise LengthMismatch(
                f"Witt vectors of lengths {self.length}, {other.length} (p={self.p}, {other.p})")
        return other

    def __add__(self, other):
        return witt_add(self, self._coerce(other))

    __radd__ = __add__

    def __mul__(self, other):
        return witt_mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_add(self, witt_neg(self._coerce(other)))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = WittVector.one(self.p, self.length, self.components[0])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.p == other.p and self.length == other.length
                and all(_same(a, b) for a, b in zip(self.components, other.components)))

    def truncate(self, length: int) -> "WittVector":
        return WittVector(self.p, self.components[:length])

    def to_json(self) -> dict:
        return {"p": self.p, "length": self.length,
                "components": [_component_json(a) for a in self.components]}

    def __str__(self):
        return "[" + ", ".join(_component_text(a) for a in self.components) + "]"

    def __repr__(self):
        return f"WittVector(p={self.p}, {self})"


def _component_text(a: Any) -> str:
    if isinstance(a, PadicElem):
        digits = a.digits()
        return digits[0] if len(digits) == 1 else "[" + ", ".join(digits) + "]"
    return str(a)


def _component_json(a: Any):
    if isinstance(a, WittVector):
        return a.to_json()["components"]
    return _component_text(a)


def ghost(w: WittVector) -> Tuple[Any, ...]:
    """(w_0, ..., w_m) with w_k = sum_{j<=k} p^j a_j^(p^(k-j))."""
    p = w.p
    out = []
    for k in range(w.length):
        terms = [p ** j * w.components[j] ** (p ** (k - j)) for j in range(k + 1)]
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        out.append(total)
    return tuple(out)


# universal polynomials


def _ghost_poly(xs: Sequence[DeltaPoly], k: int, p: int) -> DeltaPoly:
    return poly_sum(xs[0].ring, [p ** j * xs[j] ** (p ** (k - j)) for j in range(k + 1)])


def _invert_ghosts(ring: DeltaRing, ghosts: Sequence[DeltaPoly]) -> List[DeltaPoly]:
    """Components whose ghost vector is the given one; divisions by p may be inexact."""
    p = ring.p
    comps: List[DeltaPoly] = []
    for k, g in enumerate(ghosts):
        lower = poly_sum(ring, [p ** j * comps[j] ** (p ** (k - j)) for j in range(k)])
        comps.append((g - lower).scale_p(k))
    return comps


def _assert_integral(polys: Sequence[DeltaPoly], what: str) -> Tuple[DeltaPoly, ...]:
    for k, f in enumerate(polys):
        if not f.is_integral():
            raise InexactDivision(f"{what}: component {k} has a p in the denominator")
    return tuple(polys)


def _check_length(length: int, settings: Settings = DEFAULTS):
    if length > settings.witt_max_length:
        raise CapExceeded(f"Witt length {length} exceeds the cap {settings.witt_max_length}")


def _pair_ring(p: int, length: int) -> DeltaRing:
    names = tuple(f"X{k}" for k in range(length)) + tuple(f"Y{k}" for k in range(length))
    return DeltaRing(names, 0, p)


@lru_cache(maxsize=None)
def universal_polynomials(p: int, length: int, op: str) -> Tuple[DeltaPoly, ...]:
    """
    Integral polynomials in X_0..X_m, Y_0..Y_m for op in {"add", "mul", "neg",
    "frob"}; "frob" has length - 1 components.
    """
    ring = _pair_ring(p, length)
    X = [ring.var_at(k) for k in range(length)]
    Y = [ring.var_at(length + k) for k in range(length)]
    if op == "add":
        ghosts = [_ghost_poly(X, k, p) + _ghost_poly(Y, k, p) for k in range(length)]
    elif op == "mul":
        ghosts = [_ghost_poly(X, k, p) * _ghost_poly(Y, k, p) for k in range(length)]
    elif op == "neg":
        ghosts = [-_ghost_poly(X, k, p) for k in range(length)]
    elif op == "frob":
        ghosts = [_ghost_poly(X, k + 1, p) for k in range(length - 1)]
    else:
        raise ValueError(f"unknown Witt operation {op!r}")
    logger.debug("deriving universal Witt %s polynomials for p=%d, length %d", op, p, length)
    return _assert_integral(_invert_ghosts(ring, ghosts), f"Witt {op}")


def _apply(f: DeltaPoly, values: Sequence[Any], like: Any):
    """Evaluate an integral polynomial at arbitrary ring elements."""
    powers = {}
    total = None
    for mono, c in f.sorted_terms():
        term = None
        for i, e in enumerate(mono):
            if e:
                if (i, e) not in powers:
                    powers[(i, e)] = values[i] ** e
                term = powers[(i, e)] if term is None else term * powers[(i, e)]
        term = _scalar(c, like) if term is None else c * term
        total = term if total is None else total + term
    return _scalar(0, like) if total is None else total


def _binary(op: str, u: WittVector, v: WittVector) -> WittVector:
    v = u._coerce(v)
    _check_length(u.length)
    polys = universal_polynomials(u.p, u.length, op)
    values = list(u.components) + list(v.components)
    like = u.components[0]
    return WittVector(u.p, tuple(_apply(f, values, like) for f in polys))


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    return _binary("add", u, v)


def witt_mul(u: WittVector, v: WittVector) -> WittVector:
    return _binary("mul", u, v)


def witt_neg(u: WittVector) -> WittVector:
    _check_length(u.length)
    polys = universal_polynomials(u.p, u.length, "neg")
    values = list(u.components) * 2
    return WittVector(u.p, tuple(_apply(f, values, u.components[0]) for f in polys))


def frobenius_vector(u: WittVector) -> WittVector:
    """F: W_m -> W_(m-1), shifting ghost components down by one."""
    if u.length < 2:
        raise LengthMismatch("F needs a vector of length at least 2")
    _check_length(u.length)
    polys = universal_polynomials(u.p, u.length, "frob")
    values = list(u.components) * 2
    return WittVector(u.p, tuple(_apply(f, values, u.components[0]) for f in polys))


def verschiebung(u: WittVector) -> WittVector:
    """V: W_m -> W_(m+1), (a_0, ..., a_m) -> (0, a_0, ..., a_m)."""
    return WittVector(u.p, (_scalar(0, u.components[0]),) + u.components)


def teichmuller_vector(a: Any, p: int, length: int) -> WittVector:
    """[a] = (a, 0, ..., 0)"""
    return WittVector(p, (a,) + tuple(_scalar(0, a) for _ in range(length - 1)))


def delta_vector(a: PadicElem, length: int) -> WittVector:
    """
    The image of a under the δ-ring map W(F_q) -> W_m(W(F_q)) with ghost
    components (a, φ(a), φ^2(a), ...); its first two components are (a, δa).

    Component k costs k digits of precision.
    """
    p = a.p
    comps: List[PadicElem] = []
    image = a
    for k in range(length):
        if k:
            image = image.frobenius()
        rest = image
        for j in range(k):
            rest = rest - p ** j * comps[j] ** (p ** (k - j))
        comps.append(rest.divide_by_p(k) if k else rest)
    return WittVector(p, tuple(comps))


@dataclass
class W1Report:
    """Outcome of comparing a -> (a, δa) against Witt arithmetic on sampled pairs."""

    pairs: int
    additive: bool
    multiplicative: bool
    failures: List[Tuple[int, int, str]]

    @property
    def holds(self) -> bool:
        return self.additive and self.multiplicative

    def to_json(self) -> dict:
        return {"pairs": self.pairs, "additive": self.additive,
                "multiplicative": self.multiplicative,
                "failures": [list(f) for f in self.failures]}


def w1_hom_check(sample: Sequence[PadicElem]) -> W1Report:
    """Check that a -> (a, δa) respects sums and products for every sampled pair."""
    vectors = [delta_vector(a, 2) for a in sample]
    additive = multiplicative = True
    failures = []
    for i, j in itertools.combinations_with_replacement(range(len(sample)), 2):
        a, b = sample[i], sample[j]
        if not delta_vector(a + b, 2) == witt_add(vectors[i], vectors[j]):
            additive = False
            failures.append((i, j, "add"))
        if not delta_vector(a * b, 2) == witt_mul(vectors[i], vectors[j]):
            multiplicative = False
            failures.append((i, j, "mul"))
    pairs = len(sample) * (len(sample) + 1) // 2
    logger.debug("W_1 homomorphism check on %d pairs: %d failures", pairs, len(failures))
    return W1Report(pairs, additive, multiplicative, failures)


# the comonad map W_(m'+m'') -> W_m'(W_m'')


@lru_cache(maxsize=None)
def _comonad_polynomials(p: int, outer: int, inner: int) -> Tuple[Tuple[DeltaPoly, ...], ...]:
    """
    Components c[i][k] of the outer vector b_0..b_outer in W_inner, as
    polynomials in the input components. The outer ghost component i of the
    image is F^i(a), whose inner ghost vector is (w_i, ..., w_(i+inner)).
    """
    length = outer + inner + 1
    ring = DeltaRing(tuple(f"X{k}" for k in range(length)), 0, p)
    X = [ring.var_at(k) for k in range(length)]
    W = [_ghost_poly(X, k, p) for k in range(length)]
    inner_ghosts: List[List[DeltaPoly]] = []
    for i in range(outer + 1):
        row = []
        for k in range(inner + 1):
            lower = poly_sum(ring, [p ** j * inner_ghosts[j][k] ** (p ** (i - j)) for j in range(i)])
            row.append((W[i + k] - lower).scale_p(i))
        inner_ghosts.append(row)
    logger.debug("deriving comonad polynomials for p=%d, W_%d(W_%d)", p, outer, inner)
    return tuple(_assert_integral(_invert_ghosts(ring, row), "comonad map") for row in inner_ghosts)


def comonad_map(w: WittVector, outer: int, inner: int,
                settings: Settings = DEFAULTS) -> WittVector:
    """W_(outer+inner)(R) -> W_outer(W_inner(R)), characterized by ghost compatibility."""
    if w.length != outer + inner + 1:
        raise LengthMismatch(f"expected length {outer + inner + 1}, got {w.length}")
    _check_length(w.length, settings)
    polys = _comonad_polynomials(w.p, outer, inner)
    like = w.components[0]
    values = list(w.components)
    return WittVector(w.p, tuple(
        WittVector(w.p, tuple(_apply(f, values, like) for f in row)) for row in polys))


def double_ghost(W: WittVector) -> List[Tuple[Any, ...]]:
    """Inner ghost vectors of the outer ghost components of a nested vector."""
    return [ghost(g) for g in ghost(W)]


# presentations of W_m as an algebra over a δ-ring


def witt_presentation(m: int, p: int, samples: int = 8, seed: int = 0,
                      settings: Settings = DEFAULTS) -> SchemePresentation:
    """
    Generators v_1..v_m with relations v_i v_j = p^i v_j (i <= j).

    The relations are checked with exact Witt arithmetic, and a sample of
    random integer vectors is written in the basis 1, v_1, ..., v_m. The
    check is exact for m <= 1; for larger m it is evidence for completeness,
    not a proof.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    _check_length(m + 1, settings)
    names = tuple(f"v{i}" for i in range(1, m + 1))
    ring = DeltaRing(names, 0, p)
    relations = []
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            vi = WittVector.basis(p, m + 1, i)
            vj = WittVector.basis(p, m + 1, j)
            if not witt_mul(vi, vj) == WittVector.from_int(p ** i, p, m + 1) * vj:
                raise PresentationUnverified(f"v{i} v{j} != p^{i} v{j} in W_{m}")
            relations.append(ring.var(f"v{i}") * ring.var(f"v{j}") - p ** i * ring.var(f"v{j}"))
    rng = random.Random(seed)
    for _ in range(samples if m else 0):
        w = WittVector(p, tuple(rng.randrange(-p ** 3, p ** 3) for _ in range(m + 1)))
        g = ghost(w)
        coords = [g[0]]
        for k in range(1, m + 1):
            step = g[k] - g[k - 1]
            if step % p ** k:
                raise PresentationUnverified(f"{w} is not in the span of 1, v_1, ..., v_{m}")
            coords.append(step // p ** k)
        rebuilt = WittVector.from_int(coords[0], p, m + 1)
        for k in range(1, m + 1):
            rebuilt = rebuilt + WittVector.from_int(coords[k], p, m + 1) * WittVector.basis(p, m + 1, k)
        if not rebuilt == w:
            raise PresentationUnverified(f"{w} is not recovered from its coordinates")
    if m >= 2:
        logger.info("W_%d presentation verified on %d samples; completeness not proven", m, samples)
    return SchemePresentation(ring, tuple(relations), f"W_{m}")
