"""
δ-linear algebra on n x n matrices over W(F_q)/p^N.

Entrywise operations: u^(p) raises every entry to the p-th power, φ(u) applies
the Frobenius lift to every entry and δu = (φ(u) - u^(p))/p.

    a +_δ b = a + b + p a b
    a ⋆_δ b = φ(a) b φ(a)^-1
    lδ(a)   = (δa - Δ(a)) (a^(p) + p Δ(a))^-1

where Δ is a δ-flow, Δ = 0 being the canonical one. Flows on classical groups
are given by numerator matrices P(x) over det(x)^e.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .config import DEFAULTS, Settings
from .deltapoly import DeltaPoly, DeltaRing, monomials_up_to
from .errors import (
    ContextMismatch,
    DegreeBoundExceeded,
    CapExceeded,
    InsufficientPrecision,
    NotInvertible,
    NotInvertibleModP,
    SearchCapExceeded,
)
from .linalg import solve_mod_p
from .padic import PadicCtx, PadicElem, fermat_quotient

logger = logging.getLogger(__name__)


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], zero) -> List[List]:
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(k)), zero) for j in range(m)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> List[List]:
    return [list(row) for row in zip(*A)]


@dataclass(frozen=True, eq=False)
class DeltaMatrix:
    """A square matrix of PadicElem over one context."""

    rows: Tuple[Tuple[PadicElem, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("DeltaMatrix must be square")
        ctx = rows[0][0].ctx
        if any(a.ctx != ctx for r in rows for a in r):
            raise ContextMismatch("matrix entries belong to different contexts")
        object.__setattr__(self, "rows", rows)

    __hash__ = None

    @classmethod
    def from_ints(cls, ctx: PadicCtx, rows: Sequence[Sequence], prec: Optional[int] = None) -> "DeltaMatrix":
        return cls(tuple(tuple(ctx.element(v, prec) if not isinstance(v, PadicElem) else v
                               for v in row) for row in rows))

    @classmethod
    def identity(cls, ctx: PadicCtx, n: int, prec: Optional[int] = None) -> "DeltaMatrix":
        return cls.from_ints(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)], prec)

    @classmethod
    def zero(cls, ctx: PadicCtx, n: int, prec: Optional[int] = None) -> "DeltaMatrix":
        return cls.from_ints(ctx, [[0] * n for _ in range(n)], prec)

    @classmethod
    def random(cls, ctx: PadicCtx, n: int, rng: random.Random, prec: Optional[int] = None) -> "DeltaMatrix":
        return cls(tuple(tuple(ctx.random_element(rng, prec) for _ in range(n)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def ctx(self) -> PadicCtx:
        return self.rows[0][0].ctx

    @property
    def prec(self) -> int:
        return min(a.prec for r in self.rows for a in r)

    def map(self, fn: Callable[[PadicElem], PadicElem]) -> "DeltaMatrix":
        return DeltaMatrix(tuple(tuple(fn(a) for a in r) for r in self.rows))

    def _check(self, other: "DeltaMatrix"):
        if other.ctx != self.ctx:
            raise ContextMismatch("matrices belong to different contexts")
        if other.n != self.n:
            raise ValueError("matrix sizes differ")

    def __add__(self, other: "DeltaMatrix") -> "DeltaMatrix":
        self._check(other)
        return DeltaMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "DeltaMatrix":
        return self.map(lambda a: -a)

    def __sub__(self, other: "DeltaMatrix") -> "DeltaMatrix":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, PadicElem)):
            return self.map(lambda a: a * other)
        self._check(other)
        zero = self.ctx.zero(min(self.prec, other.prec))
        return DeltaMatrix(tuple(tuple(r) for r in matmul(self.rows, other.rows, zero)))

    def __rmul__(self, other):
        if isinstance(other, (int, PadicElem)):
            return self.map(lambda a: other * a)
        return NotImplemented

    def equals(self, other: "DeltaMatrix", prec: Optional[int] = None) -> bool:
        self._check(other)
        return all(a.equals(b, prec) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __eq__(self, other):
        if not isinstance(other, DeltaMatrix):
            return NotImplemented
        return self.equals(other)

    def with_prec(self, prec: int) -> "DeltaMatrix":
        return self.map(lambda a: a.with_prec(prec))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    # entrywise maps

    def frobenius(self) -> "DeltaMatrix":
        return self.map(lambda a: a.frobenius())

    def power_p(self) -> "DeltaMatrix":
        """u^(p), the entrywise p-th power."""
        p = self.ctx.p
        return self.map(lambda a: a ** p)

    def delta(self) -> "DeltaMatrix":
        return self.map(fermat_quotient)

    # inversion

    def det(self) -> PadicElem:
        n = self.n
        total = self.ctx.zero(self.prec)
        for perm in itertools.permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = self.ctx.one(self.prec)
            for i in range(n):
                term = term * self.rows[i][perm[i]]
            total = total + sign * term
        return total

    def inverse(self) -> "DeltaMatrix":
        """Gauss-Jordan elimination with unit pivots."""
        n = self.n
        prec = self.prec
        work = [list(r) + [self.ctx.one(prec) if i == j else self.ctx.zero(prec) for j in range(n)]
                for i, r in enumerate(self.rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if work[r][col].is_unit()), None)
            if pivot is None:
                raise NotInvertible("matrix is not invertible over W(F_q)")
            work[col], work[pivot] = work[pivot], work[col]
            inv = work[col][col].inverse()
            work[col] = [a * inv for a in work[col]]
            for r in range(n):
                if r != col and not work[r][col].is_zero():
                    factor = work[r][col]
                    work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
        return DeltaMatrix(tuple(tuple(r[n:]) for r in work))

    def is_invertible_mod_p(self) -> bool:
        return self.det().is_unit()

    def residues(self) -> List[List[Tuple[int, ...]]]:
        return [[a.residue() for a in r] for r in self.rows]

    def to_json(self) -> dict:
        ctx = self.ctx
        return {"p": ctx.p, "N": ctx.N, "m": ctx.ext_degree, "prec": self.prec,
                "rows": [[a.digits()[0] if ctx.ext_degree == 1 else list(a.digits()) for a in r]
                         for r in self.rows]}

    @classmethod
    def from_json(cls, ctx: PadicCtx, rows: Sequence[Sequence]) -> "DeltaMatrix":
        return cls(tuple(tuple(ctx.parse(str(v)) if not isinstance(v, list) else ctx.element([int(c) for c in v])
                               for v in row) for row in rows))

    def __str__(self):
        return "[" + "; ".join(" ".join(_entry_text(a) for a in r) for r in self.rows) + "]"


def _entry_text(a: PadicElem) -> str:
    digits = a.digits()
    return digits[0] if len(digits) == 1 else "[" + ",".join(digits) + "]"


# the δ-Lie algebra operations


def plus_delta(a: DeltaMatrix, b: DeltaMatrix) -> DeltaMatrix:
    """a +_δ b = a + b + p a b"""
    return a + b + a.ctx.p * (a * b)


def neg_delta(a: DeltaMatrix) -> DeltaMatrix:
    """The +_δ inverse -a (1 + p a)^-1."""
    one = DeltaMatrix.identity(a.ctx, a.n, a.prec)
    return -(a * (one + a.ctx.p * a).inverse())


def star_delta(a: DeltaMatrix, b: DeltaMatrix) -> DeltaMatrix:
    """a ⋆_δ b = φ(a) b φ(a)^-1"""
    fa = a.frobenius()
    return fa * b * fa.inverse()


# δ-flows


def matrix_ring(n: int, p: int) -> DeltaRing:
    return DeltaRing(tuple(f"x{i + 1}{j + 1}" for i in range(n) for j in range(n)), 0, p)


def det_poly(ring: DeltaRing, n: int) -> DeltaPoly:
    x = [[ring.var_at(i * n + j) for j in range(n)] for i in range(n)]
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ring.one()
        for i in range(n):
            term = term * x[i][perm[i]]
        total = total + sign * term
    return total


@dataclass(frozen=True)
class DeltaFlow:
    """Δ(x) = numerators(x) / det(x)^det_power; zero numerators give the canonical flow."""

    n: int
    ring: DeltaRing
    numerators: Tuple[Tuple[DeltaPoly, ...], ...]
    det_power: int = 0

    @classmethod
    def canonical(cls, n: int, p: int) -> "DeltaFlow":
        ring = matrix_ring(n, p)
        return cls(n, ring, tuple(tuple(ring.zero() for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_text(cls, n: int, p: int, entries: Sequence[Sequence[str]], det_power: int = 0) -> "DeltaFlow":
        ring = matrix_ring(n, p)
        return cls(n, ring, tuple(tuple(ring.parse(t) for t in row) for row in entries), det_power)

    def is_canonical(self) -> bool:
        return all(f.is_zero() for row in self.numerators for f in row)

    def evaluate(self, a: DeltaMatrix) -> DeltaMatrix:
        if self.is_canonical():
            return DeltaMatrix.zero(a.ctx, a.n, a.prec)
        point = [a.rows[i][j] for i in range(self.n) for j in range(self.n)]
        scale = a.det().inverse() ** self.det_power if self.det_power else a.ctx.one(a.prec)
        return DeltaMatrix(tuple(tuple(f.evaluate(point) * scale for f in row) for row in self.numerators))

    def phi_of(self, a: DeltaMatrix) -> DeltaMatrix:
        """Φ(a) = a^(p) + pΔ(a)"""
        return a.power_p() + a.ctx.p * self.evaluate(a)

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.ring.p, "det_power": self.det_power,
                "entries": [[str(f) for f in row] for row in self.numerators]}


def ldelta(a: DeltaMatrix, flow: Optional[DeltaFlow] = None) -> DeltaMatrix:
    """lδ(a) = (δa - Δ(a)) (a^(p) + pΔ(a))^-1, at precision a.prec - 1."""
    if a.prec < 2:
        raise InsufficientPrecision("lδ needs precision at least 2")
    if not a.is_invertible_mod_p():
        raise NotInvertible("lδ is defined on GL_n")
    d = a.delta()
    if flow is None or flow.is_canonical():
        return d * a.power_p().inverse()
    correction = flow.evaluate(a)
    return (d - correction) * (a.power_p() + a.ctx.p * correction).inverse()


# δ-linear equations


def _residue_frobenius_solver(ctx: PadicCtx):
    """Solve w^p = t in F_q, as a linear map over F_p in the basis 1, t, t^2, ..."""
    m, p = ctx.ext_degree, ctx.p
    if m == 1:
        return lambda target: target
    columns = []
    for k in range(m):
        basis = ctx.element([1 if i == k else 0 for i in range(m)], 1)
        columns.append(basis.frobenius().residue())
    rows = [{k: columns[k][i] for k in range(m) if columns[k][i]} for i in range(m)]

    def solve(target: Tuple[int, ...]) -> Tuple[int, ...]:
        x = solve_mod_p(rows, list(target), m, p)
        return tuple(x)

    return solve


def solve_delta_linear(alpha: DeltaMatrix, u0: DeltaMatrix, N: Optional[int] = None) -> DeltaMatrix:
    """
    The unique u ≡ u0 mod p with δu = α u^(p) mod p^(N-1).

    Equivalently φ(u) = ε u^(p) with ε = 1 + pα. Writing u = u_j + p^j w, the
    next digit solves φ(w) ≡ (ε u_j^(p) - φ(u_j))/p^j mod p.
    """
    ctx = alpha.ctx
    N = ctx.N if N is None else N
    if N > alpha.prec + 1:
        raise InsufficientPrecision(f"α known to {alpha.prec} digits cannot give u to {N}")
    n, p = alpha.n, ctx.p
    if not u0.is_invertible_mod_p():
        raise NotInvertibleModP("u0 is not invertible mod p")
    eps = DeltaMatrix.identity(ctx, n) + p * alpha
    frob_inverse = _residue_frobenius_solver(ctx)
    u = DeltaMatrix(tuple(tuple(ctx.element(a.residue(), N) for a in r) for r in u0.rows))
    for j in range(1, N):
        lhs = eps * u.power_p()
        residual = (lhs - u.frobenius()).with_prec(j + 1)
        digits = []
        for r in residual.rows:
            row = []
            for a in r:
                row.append(ctx.element(frob_inverse(a.divide_by_p(j).residue()), N) * p ** j)
            digits.append(tuple(row))
        u = u + DeltaMatrix(tuple(digits))
        logger.debug("δ-linear solve: digit %d", j)
    return u.with_prec(N)


def delta_linear_residual(alpha: DeltaMatrix, u: DeltaMatrix) -> DeltaMatrix:
    """δu - α u^(p), at precision u.prec - 1."""
    return u.delta() - alpha * u.power_p()


# δ-Galois groups at finite precision


@dataclass(frozen=True)
class SubringSpec:
    """O = W(F_{p^d}); d = 1 is the prime ring Z_p."""

    degree: int = 1

    @property
    def label(self) -> str:
        return "Z_p" if self.degree == 1 else f"W(F_p^{self.degree})"

    def contains(self, a: PadicElem) -> bool:
        image = a
        for _ in range(self.degree):
            image = image.frobenius()
        return image.equals(a)


@dataclass
class GaloisResult:
    elements: List[DeltaMatrix]
    precision: int
    subring: str

    @property
    def qualifier(self) -> str:
        return f"at precision {self.precision}"

    def to_json(self) -> dict:
        return {"subring": self.subring, "precision": self.precision, "qualifier": self.qualifier,
                "elements": [c.to_json()["rows"] for c in self.elements]}


def delta_galois_group(u: DeltaMatrix, spec: SubringSpec = SubringSpec(),
                       settings: Settings = DEFAULTS) -> GaloisResult:
    """
    Matrices c = u^-1 σ(u) for the automorphisms σ = φ^(d i) of W(F_q) fixing O,
    kept when c ∈ GL_n(O) and σ(δu) = δ(u c) at working precision.
    """
    ctx = u.ctx
    m = ctx.ext_degree
    if m % spec.degree:
        raise ValueError(f"O = {spec.label} is not a subring of W(F_p^{m})")
    candidates = m // spec.degree
    if candidates > settings.search_cap:
        raise SearchCapExceeded(f"{candidates} candidates exceed the search cap {settings.search_cap}")
    u_inv = u.inverse()
    du = u.delta()
    found: List[DeltaMatrix] = []
    sigma_u, sigma_du = u, du
    for i in range(candidates):
        if i:
            for _ in range(spec.degree):
                sigma_u, sigma_du = sigma_u.frobenius(), sigma_du.frobenius()
        c = u_inv * sigma_u
        if not all(spec.contains(a) for r in c.rows for a in r):
            continue
        if not c.is_invertible_mod_p():
            continue
        if not (u * c).delta().equals(sigma_du):
            continue
        if not any(c.equals(e) for e in found):
            found.append(c)
    logger.debug("δ-Galois group over %s: %d elements", spec.label, len(found))
    return GaloisResult(found, u.prec, spec.label)


def galois_stability(u: DeltaMatrix, spec: SubringSpec = SubringSpec(),
                     settings: Settings = DEFAULTS) -> bool:
    """Compare the groups computed from u at precision prec - 2 and prec."""
    if u.prec < 4:
        raise InsufficientPrecision("stability needs precision at least 4")
    low = delta_galois_group(u.with_prec(u.prec - 2), spec, settings)
    high = delta_galois_group(u, spec, settings)
    if len(low.elements) != len(high.elements):
        return False
    return all(any(c.equals(d, low.precision) for d in high.elements) for c in low.elements)


# classical groups and their quadratic maps


@dataclass(frozen=True)
class QuadraticMapData:
    """
    H(x) = x^t q x for Sp(2r), SO(2r), SO(2r+1); GL carries the constant
    map H = 1.
    """

    group: str
    r: int = 1

    def __post_init__(self):
        if self.group not in ("GL", "Sp", "SO_even", "SO_odd"):
            raise ValueError(f"unknown group {self.group!r}")

    @property
    def n(self) -> int:
        return 2 * self.r + 1 if self.group == "SO_odd" else 2 * self.r

    @property
    def q(self) -> List[List[int]]:
        r, n = self.r, self.n
        q = [[0] * n for _ in range(n)]
        if self.group == "GL":
            for i in range(n):
                q[i][i] = 1
        elif self.group == "Sp":
            for i in range(r):
                q[i][r + i] = 1
                q[r + i][i] = -1
        elif self.group == "SO_even":
            for i in range(r):
                q[i][r + i] = 1
                q[r + i][i] = 1
        else:
            q[0][0] = 1
            for i in range(r):
                q[1 + i][1 + r + i] = 1
                q[1 + r + i][1 + i] = 1
        return q

    @property
    def label(self) -> str:
        return {"GL": f"GL_{self.n}", "Sp": f"Sp_{self.n}", "SO_even": f"SO_{self.n}",
                "SO_odd": f"SO_{self.n}"}[self.group]

    def H(self, x: Sequence[Sequence], zero) -> List[List]:
        return matmul(matmul(transpose(x), self.q, zero), x, zero)

    def q_matrix(self, ctx: PadicCtx, prec: Optional[int] = None) -> DeltaMatrix:
        return DeltaMatrix.from_ints(ctx, self.q, prec)


def _poly_matrix(ring: DeltaRing, n: int) -> List[List[DeltaPoly]]:
    return [[ring.var_at(i * n + j) for j in range(n)] for i in range(n)]


def horizontality_defect(flow: DeltaFlow, H: QuadraticMapData) -> List[List[DeltaPoly]]:
    """
    det^(2e) (H(Φ(x)) - H(x)^(p)) with Φ(x) = x^(p) + p P(x)/det^e, as a
    polynomial matrix (denominators cleared).
    """
    ring, n, e, p = flow.ring, flow.n, flow.det_power, flow.ring.p
    zero = ring.zero()
    x = _poly_matrix(ring, n)
    a = [[v ** p for v in row] for row in x]
    P = [list(row) for row in flow.numerators]
    det_e = det_poly(ring, n) ** e
    Hx = H.H(x, zero)
    base = [[u - v ** p for u, v in zip(r1, r2)] for r1, r2 in zip(H.H(a, zero), Hx)]
    aq = matmul(transpose(a), H.q, zero)
    Pq = matmul(transpose(P), H.q, zero)
    cross = [[u + v for u, v in zip(r1, r2)] for r1, r2 in zip(matmul(aq, P, zero), matmul(Pq, a, zero))]
    quad = matmul(Pq, P, zero)
    det_2e = det_e * det_e
    return [[det_2e * b + p * det_e * c + p * p * d for b, c, d in zip(rb, rc, rd)]
            for rb, rc, rd in zip(base, cross, quad)]


def _valuation(f: DeltaPoly, cap: int) -> int:
    if f.is_zero():
        return cap
    p = f.ring.p
    best = cap
    for c in f.raw_terms.values():
        v = 0
        while c % p == 0 and v < best:
            c //= p
            v += 1
        best = min(best, v)
    return best - f.den


def cayley_sample(H: QuadraticMapData, ctx: PadicCtx, rng: random.Random) -> DeltaMatrix:
    """
    g = (1 + Y)(1 - Y)^-1 with Y = q^-1 A, A symmetric for Sp and
    antisymmetric for SO, so that g^t q g = q.
    """
    n = H.n
    if H.group == "GL":
        while True:
            g = DeltaMatrix.random(ctx, n, rng)
            if g.is_invertible_mod_p():
                return g
    symmetric = H.group == "Sp"
    q = H.q_matrix(ctx)
    one = DeltaMatrix.identity(ctx, n)
    while True:
        entries = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                value = rng.randrange(ctx.p ** ctx.N)
                if i == j:
                    entries[i][j] = value if symmetric else 0
                else:
                    entries[i][j] = value
                    entries[j][i] = value if symmetric else -value
        Y = q.inverse() * DeltaMatrix.from_ints(ctx, entries)
        if (one - Y).is_invertible_mod_p():
            return (one + Y) * (one - Y).inverse()


def monomial_matrix(ctx: PadicCtx, n: int, rng: random.Random) -> DeltaMatrix:
    """A random element of T·W: a permutation matrix with unit entries."""
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[ctx.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        rows[i][perm[i]] = ctx.random_element(rng, unit=True)
    return DeltaMatrix(tuple(tuple(r) for r in rows))


def lie_delta_membership(a: DeltaMatrix, H: QuadraticMapData) -> bool:
    """a ∈ L_δ(G): p^-1 f(1 + p a) = a^t q + q a + p a^t q a vanishes."""
    if H.group == "GL":
        return True
    q = H.q_matrix(a.ctx)
    at = DeltaMatrix(tuple(tuple(r) for r in transpose(a.rows)))
    return (at * q + q * a + a.ctx.p * (at * q * a)).is_zero()


@dataclass
class FlowReport:
    """Pass/fail of the horizontality, symmetry and S-horizontality diagrams."""

    group: str
    horizontal: bool
    horizontal_digits: int
    witness: Optional[str]
    symmetric: bool
    s_horizontal: bool
    precision: int
    samples: int

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "horizontal": self.horizontal,
            "horizontal_digits": self.horizontal_digits,
            "witness": self.witness,
            "symmetric": self.symmetric,
            "s_horizontal": self.s_horizontal,
            "precision": self.precision,
            "samples": self.samples,
        }


def check_flow_compatibility(flow: DeltaFlow, H: QuadraticMapData, precision: int = 2,
                             samples: int = 5, seed: int = 0) -> FlowReport:
    """
    (a) horizontality: the cleared defect det^(2e)(H(Φ(x)) - H(x)^(p)) is 0
        modulo p^precision as a polynomial identity;
    (b) symmetry: (g^(p))^t q Φ(g) = Φ(g)^t q g^(p) at sampled points g of S;
    (c) S-horizontality: Φ(g)^t q Φ(g) ≡ q mod p^precision for sampled g ∈ S.
    """
    if flow.n != H.n:
        raise ValueError(f"flow on GL_{flow.n} does not match {H.label}")
    p = flow.ring.p
    if H.group == "GL":
        return FlowReport(H.label, True, precision, None, True, True, precision, 0)
    cap = precision + 8
    defect = horizontality_defect(flow, H)
    digits = min(_valuation(f, cap) for row in defect for f in row)
    witness = None
    if digits < precision:
        witness = next(str(f) for row in defect for f in row if _valuation(f, cap) == digits)
    ctx = PadicCtx(p, precision + 2)
    rng = random.Random(seed)
    q = H.q_matrix(ctx)
    symmetric = True
    s_horizontal = True
    for _ in range(samples):
        x = cayley_sample(H, ctx, rng)
        Phi_x = flow.phi_of(x)
        a = x.power_p()
        symmetric = symmetric and (_t(a) * q * Phi_x).equals(_t(Phi_x) * q * a, precision)
        s_horizontal = s_horizontal and (_t(Phi_x) * q * Phi_x).equals(q, precision)
    return FlowReport(H.label, digits >= precision, digits, witness, symmetric, s_horizontal,
                      precision, samples)


def _t(a: DeltaMatrix) -> DeltaMatrix:
    return DeltaMatrix(tuple(tuple(r) for r in transpose(a.rows)))


def solve_flow(H: QuadraticMapData, p: int, det_power: int, precision: int = 2,
               settings: Settings = DEFAULTS) -> DeltaFlow:
    """
    Numerators P = P_1 + p P_2 + ... of a flow with H horizontal mod p^precision.

    Each digit solves det^e (a^t q P_k + P_k^t q a) ≡ R_k mod p over F_p, with
    a = x^(p) and P_k homogeneous of degree p + n e.
    """
    n = H.n
    ring = matrix_ring(n, p)
    zero = ring.zero()
    x = _poly_matrix(ring, n)
    a = [[v ** p for v in row] for row in x]
    det_e = det_poly(ring, n) ** det_power
    C = [[det_e * f for f in row] for row in matmul(transpose(a), H.q, zero)]
    D = [[det_e * f for f in row] for row in matmul(H.q, a, zero)]
    degree = p + n * det_power
    monomials = [m for m in monomials_up_to(ring.nvars, degree) if sum(m) == degree]
    unknowns = [(k, l, m) for k in range(n) for l in range(n) for m in monomials]
    if len(unknowns) > settings.linear_unknowns_cap:
        raise CapExceeded(f"{len(unknowns)} unknowns exceed the cap {settings.linear_unknowns_cap}")
    images = []
    for k, l, m in unknowns:
        image = {}
        for i in range(n):
            image[(i, l)] = image.get((i, l), zero) + C[i][k].monomial_times(m)
        for j in range(n):
            image[(l, j)] = image.get((l, j), zero) + D[k][j].monomial_times(m)
        images.append(image)
    flow = DeltaFlow(n, ring, tuple(tuple(zero for _ in range(n)) for _ in range(n)), det_power)
    for step in range(1, precision):
        defect = horizontality_defect(flow, H)
        rows: Dict[Tuple[int, int, Tuple[int, ...]], Dict[int, int]] = {}
        rhs: Dict[Tuple[int, int, Tuple[int, ...]], int] = {}
        for i in range(n):
            for j in range(n):
                f = defect[i][j]
                for mono, c in f.raw_terms.items():
                    if c % (p ** step):
                        raise DegreeBoundExceeded(f"defect not divisible by p^{step}; increase det_power")
                    if (c // p ** step) % p:
                        rhs[(i, j, mono)] = (-(c // p ** step)) % p
        for col, image in enumerate(images):
            for (i, j), f in image.items():
                for mono, c in f.raw_terms.items():
                    if c % p:
                        rows.setdefault((i, j, mono), {})[col] = c % p
        keys = sorted(set(rows) | set(rhs))
        solution = solve_mod_p([rows.get(key, {}) for key in keys], [rhs.get(key, 0) for key in keys],
                               len(unknowns), p)
        if solution is None:
            raise DegreeBoundExceeded(
                f"no flow with denominator det^{det_power} at digit {step}; increase det_power")
        numerators = [list(row) for row in flow.numerators]
        for col, value in enumerate(solution):
            if value:
                k, l, m = unknowns[col]
                numerators[k][l] = numerators[k][l] + (value * p ** (step - 1)) * ring.one().monomial_times(m)
        flow = DeltaFlow(n, ring, tuple(tuple(r) for r in numerators), det_power)
        logger.debug("flow digit %d solved (%d unknowns, %d equations)", step, len(unknowns), len(keys))
    return flow
