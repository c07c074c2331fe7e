"""Exact commutative phase-space algebra.

A :class:`PhaseExpr` is a fraction ``num / (R^r * sq(x)^a * (sq(x)+P1)^b)``
where ``num`` is a polynomial with rational coefficients in the canonical
variables ``x_i, p_i, Q_k, P_k`` and the parameters ``R`` and ``hbar``.  The
three denominator factors are the only invertible elements of the ring, so
every expression has a unique reduced form and equality is decidable by
comparing numerator and denominator exponents.

Polynomial arithmetic is delegated to sympy's sparse ``PolyElement`` over
``QQ`` with a graded-lex order over the fixed enumeration
``x1..xN, p1..pN, Q1..QM, P1..PM, R, hbar``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

from . import linalg

KINDS = ("x", "p", "Q", "P")


class DenominatorError(ValueError):
    """Division by something that is not a declared invertible element."""


@dataclass(frozen=True, order=True)
class PhaseVar:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("variable indices are 1-based")

    def __str__(self):
        return f"{self.kind}{self.index}"


class PhaseSpace:
    """Phase space of ``N = D+1`` Cartesian pairs plus ``M`` auxiliary pairs."""

    def __init__(self, D: int, M: int = 0):
        if D < 1:
            raise ValueError("D must be >= 1")
        if M < 0:
            raise ValueError("M must be >= 0")
        self.D = D
        self.N = D + 1
        self.M = M
        names = (
            [f"x{i}" for i in range(1, self.N + 1)]
            + [f"p{i}" for i in range(1, self.N + 1)]
            + [f"Q{i}" for i in range(1, M + 1)]
            + [f"P{i}" for i in range(1, M + 1)]
            + ["R", "hbar"]
        )
        self.names = tuple(names)
        self.ring, *self._gens = ring(",".join(names), QQ, grlex)
        self.r_index = len(names) - 2
        self.h_index = len(names) - 1
        self._X = sum((self._gens[i] ** 2 for i in range(self.N)), self.ring.zero)
        self._Y = self._X + self._gens[self.index(PhaseVar("P", 1))] if M else None
        self._pow_cache: dict = {}

    def __repr__(self):
        return f"PhaseSpace(D={self.D}, M={self.M})"

    def __eq__(self, other):
        return isinstance(other, PhaseSpace) and (self.D, self.M) == (other.D, other.M)

    def __hash__(self):
        return hash((self.D, self.M))

    # -- variables -----------------------------------------------------
    def index(self, v: PhaseVar) -> int:
        """Ring-generator index of ``v``; raises on out-of-range indices."""
        bound = self.N if v.kind in ("x", "p") else self.M
        if not 1 <= v.index <= bound:
            raise IndexError(f"{v} out of range (bound {bound})")
        offset = {"x": 0, "p": self.N, "Q": 2 * self.N, "P": 2 * self.N + self.M}[v.kind]
        return offset + v.index - 1

    @cached_property
    def variables(self) -> tuple[PhaseVar, ...]:
        out = [PhaseVar(k, i) for k in ("x", "p") for i in range(1, self.N + 1)]
        out += [PhaseVar(k, i) for k in ("Q", "P") for i in range(1, self.M + 1)]
        return tuple(out)

    def var(self, kind: str, i: int) -> "PhaseExpr":
        return PhaseExpr(self, self._gens[self.index(PhaseVar(kind, i))])

    def x(self, i):
        return self.var("x", i)

    def p(self, i):
        return self.var("p", i)

    def Q(self, i=1):
        return self.var("Q", i)

    def P(self, i=1):
        return self.var("P", i)

    @property
    def R(self):
        return PhaseExpr(self, self._gens[self.r_index])

    @property
    def hbar(self):
        return PhaseExpr(self, self._gens[self.h_index])

    def const(self, c) -> "PhaseExpr":
        return PhaseExpr(self, self.ring(QQ(Fraction(c).numerator, Fraction(c).denominator)))

    @property
    def zero(self):
        return PhaseExpr(self, self.ring.zero)

    @property
    def one(self):
        return PhaseExpr(self, self.ring.one)

    @property
    def sq_x(self):
        return PhaseExpr(self, self._X)

    @property
    def sq_p(self):
        return sum((self.p(i) ** 2 for i in range(1, self.N + 1)), self.zero)

    @property
    def dot_xp(self):
        return sum((self.x(i) * self.p(i) for i in range(1, self.N + 1)), self.zero)

    def angular(self, i: int, j: int) -> "PhaseExpr":
        """Classical angular momentum ``x_i p_j - x_j p_i``."""
        return self.x(i) * self.p(j) - self.x(j) * self.p(i)

    @property
    def sq_L(self):
        return sum(
            (self.angular(i, j) ** 2 for i in range(1, self.N + 1) for j in range(i + 1, self.N + 1)),
            self.zero,
        )

    def central_elements(self) -> tuple["PhaseExpr", ...]:
        """The declared invertible elements ``sq(x)`` and, if ``M >= 1``, ``sq(x)+P1``."""
        out = [self.sq_x]
        if self.M:
            out.append(PhaseExpr(self, self._Y))
        return tuple(out)

    # -- internals -----------------------------------------------------
    def _power(self, which: str, k: int):
        key = (which, k)
        if key not in self._pow_cache:
            base = {"R": self._gens[self.r_index], "X": self._X, "Y": self._Y}[which]
            self._pow_cache[key] = base**k
        return self._pow_cache[key]


_ONE_DEN = (0, 0, 0)


def _reduce(ctx: PhaseSpace, num, den):
    """Cancel common factors between ``num`` and the denominator monomial."""
    if not num:
        return ctx.ring.zero, _ONE_DEN
    r, a, b = den
    if r:
        m = min(mon[ctx.r_index] for mon in num.itermonoms())
        k = min(m, r)
        if k:
            shift = [0] * ctx.ring.ngens
            shift[ctx.r_index] = k
            shift = tuple(shift)
            num = ctx.ring({tuple(e - s for e, s in zip(mon, shift)): c for mon, c in num.iterterms()})
            r -= k
    while a:
        q, rem = num.div(ctx._X)
        if rem:
            break
        num, a = q, a - 1
    while b:
        q, rem = num.div(ctx._Y)
        if rem:
            break
        num, b = q, b - 1
    return num, (r, a, b)


class PhaseExpr:
    """Immutable exact rational expression over a :class:`PhaseSpace`."""

    __slots__ = ("ctx", "num", "den", "quantum", "_hash")

    def __init__(self, ctx: PhaseSpace, num, den=_ONE_DEN, quantum: bool = False, *, reduced: bool = False):
        if any(k < 0 for k in den):
            raise ValueError("denominator exponents must be non-negative")
        if den[2] and not ctx.M:
            raise DenominatorError("sq(x)+P is not declared without auxiliary variables")
        if not reduced:
            num, den = _reduce(ctx, num, tuple(den))
        self.ctx = ctx
        self.num = num
        self.den = tuple(den)
        self.quantum = quantum
        self._hash = None

    # -- construction helpers -----------------------------------------
    def _new(self, num, den, reduced=False):
        return PhaseExpr(self.ctx, num, den, self.quantum, reduced=reduced)

    def _coerce(self, other) -> "PhaseExpr":
        if isinstance(other, PhaseExpr):
            if other.ctx != self.ctx:
                raise ValueError("expressions live in different phase spaces")
            if other.quantum != self.quantum:
                raise ValueError("cannot mix classical and quantum expressions")
            return other
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return self._new(self.ctx.ring(QQ(c.numerator, c.denominator)), _ONE_DEN, True)
        return NotImplemented

    def _lifted(self, den):
        """Numerator rewritten over the (larger) denominator ``den``."""
        ctx = self.ctx
        num = self.num
        for which, have, want in zip("RXY", self.den, den):
            if want > have:
                num = num * ctx._power(which, want - have)
        return num

    # -- ring operations -----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return self._new(self.num + other.num, self.den)
        den = tuple(max(u, v) for u, v in zip(self.den, other.den))
        return self._new(self._lifted(den) + other._lifted(den), den)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.ctx.zero if not self.quantum else self._new(self.ctx.ring.zero, _ONE_DEN, True)
        den = tuple(u + v for u, v in zip(self.den, other.den))
        if den == _ONE_DEN:
            return self._new(self.num * other.num, den, reduced=True)
        return self._new(self.num * other.num, den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        den = tuple(k * d for d in self.den)
        return self._new(self.num**k, den, reduced=True)

    def inverse(self) -> "PhaseExpr":
        """Inverse of a unit ``c * R^i * sq(x)^a * (sq(x)+P1)^b``."""
        c, (i, a, b) = central_factorization(self)
        r, s, t = self.den
        ring = self.ctx.ring
        num = ring(QQ(1) / c)
        # (c R^i X^a Y^b / R^r X^s Y^t)^-1 = R^r X^s Y^t / (c R^i X^a Y^b)
        for which, e in zip("RXY", (r, s, t)):
            if e:
                num = num * self.ctx._power(which, e)
        return self._new(num, (i, a, b))

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, PhaseExpr):
            return NotImplemented
        return self.ctx == other.ctx and self.den == other.den and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self.den, tuple(sorted(self.num.items()))))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # -- inspection ------------------------------------------------------
    @property
    def is_polynomial(self) -> bool:
        return self.den == _ONE_DEN

    def is_constant(self) -> bool:
        return self.is_polynomial and all(not any(m) for m in self.num.itermonoms())

    def constant_value(self) -> Fraction:
        if not self.num:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        c = self.num.LC
        return Fraction(int(c.numerator), int(c.denominator))

    def total_degree(self) -> int:
        """Total degree of the numerator (parameters included)."""
        return max((sum(m) for m in self.num.itermonoms()), default=0)

    def variables(self) -> set[int]:
        """Ring-generator indices present in the numerator or the denominator."""
        out = set()
        for m in self.num.itermonoms():
            out.update(i for i, e in enumerate(m) if e)
        if self.den[0]:
            out.add(self.ctx.r_index)
        if self.den[1] or self.den[2]:
            out.update(range(self.ctx.N))
        if self.den[2]:
            out.add(self.ctx.index(PhaseVar("P", 1)))
        return out

    def depends_on(self, v: PhaseVar) -> bool:
        return self.ctx.index(v) in self.variables()

    def numerator(self) -> "PhaseExpr":
        return self._new(self.num, _ONE_DEN, reduced=True)

    def denominator(self) -> "PhaseExpr":
        ctx = self.ctx
        num = ctx.ring.one
        for which, e in zip("RXY", self.den):
            if e:
                num = num * ctx._power(which, e)
        return self._new(num, _ONE_DEN, reduced=True)

    def as_quantum(self) -> "PhaseExpr":
        return PhaseExpr(self.ctx, self.num, self.den, True, reduced=True)

    def __repr__(self):
        return f"PhaseExpr({self})"

    def __str__(self):
        return to_string(self)


def _fmt_rational(c) -> str:
    c = Fraction(int(c.numerator), int(c.denominator))
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_poly(ctx: PhaseSpace, num) -> str:
    if not num:
        return "0"
    pieces = []
    for mon, c in sorted(num.iterterms(), key=lambda t: _grlex_key(t[0]), reverse=True):
        factors = []
        for name, e in zip(ctx.names, mon):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        neg = c < 0
        mag = -c if neg else c
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_fmt_rational(mag)}*{body}"
        else:
            body = _fmt_rational(mag)
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


def _grlex_key(mon):
    return (sum(mon), mon)


def to_string(e: PhaseExpr) -> str:
    """Render in the CLI grammar; ``parse(to_string(e)) == e``."""
    body = _fmt_poly(e.ctx, e.num)
    if e.den == _ONE_DEN:
        return body
    parts = []
    r, a, b = e.den
    if r:
        parts.append("R" if r == 1 else f"R^{r}")
    if a:
        parts.append("sq(x)" if a == 1 else f"sq(x)^{a}")
    if b:
        parts.append("(sq(x)+P1)" if b == 1 else f"(sq(x)+P1)^{b}")
    return f"({body})/({'*'.join(parts)})"


# ---------------------------------------------------------------------------
# units and division


def central_factorization(e: PhaseExpr):
    """Write ``e`` as ``c * R^i * sq(x)^a * (sq(x)+P1)^b`` (exponents may be negative).

    Returns ``(c, (i, a, b))``; raises :class:`DenominatorError` if ``e`` is not
    of that shape.
    """
    ctx = e.ctx
    num = e.num
    if not num:
        raise ZeroDivisionError("division by zero")
    a = b = 0
    while True:
        q, rem = num.div(ctx._X)
        if rem:
            break
        num, a = q, a + 1
    if ctx.M:
        while True:
            q, rem = num.div(ctx._Y)
            if rem:
                break
            num, b = q, b + 1
    if len(num) != 1:
        raise DenominatorError("denominator must be a power of sq(x) or sq(x)+P")
    (mon, c), = num.iterterms()
    if any(k for idx, k in enumerate(mon) if idx != ctx.r_index):
        raise DenominatorError("denominator must be a power of sq(x) or sq(x)+P")
    r = mon[ctx.r_index]
    dr, da, db = e.den
    return c, (r - dr, a - da, b - db)


def is_unit(e: PhaseExpr) -> bool:
    try:
        central_factorization(e)
    except (DenominatorError, ZeroDivisionError):
        return False
    return True


def invert_central(e: PhaseExpr, k: int = 1) -> PhaseExpr:
    """Formal inverse ``e^-k`` of a declared central element (``sq(x)`` or ``sq(x)+P1``)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not any(e == c for c in e.ctx.central_elements()):
        raise DenominatorError(f"{e} is not a declared central element")
    return e.inverse() ** k


# ---------------------------------------------------------------------------
# calculus


def partial(e: PhaseExpr, v: PhaseVar) -> PhaseExpr:
    """Formal partial derivative with the quotient rule on central denominators."""
    ctx = e.ctx
    i = ctx.index(v)
    num = e.num.diff(ctx._gens[i])
    r, a, b = e.den
    if not a and not b:
        return e._new(num, e.den)
    N = e.num
    X, Y = ctx._X, ctx._Y
    out = num
    if a:
        out = out * X
    if b:
        out = out * Y
    if a:
        dX = X.diff(ctx._gens[i])
        if dX:
            t = N * dX * a
            out = out - (t * Y if b else t)
    if b:
        dY = Y.diff(ctx._gens[i])
        if dY:
            t = N * dY * b
            out = out - (t * X if a else t)
    return e._new(out, (r, a + (1 if a else 0), b + (1 if b else 0)))


# ---------------------------------------------------------------------------
# substitution and grading


def substitute(e: PhaseExpr, values: Mapping[PhaseVar, PhaseExpr]) -> PhaseExpr:
    """Replace variables by expressions.

    Denominators are re-evaluated after substitution and must remain units;
    substituting ``x`` variables into an expression with a ``sq(x)`` factor is
    allowed as long as the image of ``sq(x)`` is a unit again.
    """
    ctx = e.ctx
    images = {ctx.index(v): val for v, val in values.items()}

    def image_poly(poly) -> PhaseExpr:
        total = ctx.zero
        for mon, c in poly.iterterms():
            term = e._new(ctx.ring({tuple(0 if i in images else k for i, k in enumerate(mon)): c}), _ONE_DEN, True)
            for i, k in enumerate(mon):
                if k and i in images:
                    term = term * images[i] ** k
            total = total + term
        return total

    out = image_poly(e.num)
    r, a, b = e.den
    if r:
        out = out / ctx.R**r
    if a:
        out = out / image_poly(ctx._X) ** a
    if b:
        out = out / image_poly(ctx._Y) ** b
    return out


def qp_degree(ctx: PhaseSpace, mon) -> int:
    lo = 2 * ctx.N
    return sum(mon[lo : lo + 2 * ctx.M])


def qp_part(e: PhaseExpr, k: int) -> PhaseExpr:
    """Component of (Q,P)-degree ``k``; requires no ``sq(x)+P1`` denominator."""
    if e.den[2]:
        raise ValueError("grading is only defined without (sq(x)+P1) denominators")
    ctx = e.ctx
    num = ctx.ring({m: c for m, c in e.num.iterterms() if qp_degree(ctx, m) == k})
    return e._new(num, e.den)


def qp_max_degree(e: PhaseExpr) -> int:
    return max((qp_degree(e.ctx, m) for m in e.num.itermonoms()), default=0)


# ---------------------------------------------------------------------------
# ideal membership by bounded linear ansatz


@dataclass(frozen=True)
class IdealResult:
    member: bool
    bound: int
    witness: tuple[PhaseExpr, ...] | None = None

    def __bool__(self):
        return self.member


def monomials_upto(indices: Sequence[int], nvars: int, degree: int):
    """All exponent tuples over ``indices`` with total degree <= ``degree``."""
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(indices, d):
            mon = [0] * nvars
            for i in combo:
                mon[i] += 1
            out.append(tuple(mon))
    return out


def ideal_reduce(e: PhaseExpr, gens: Iterable[PhaseExpr], degree_bound: int | None = None) -> IdealResult:
    """Decide ``e = sum_a A_a * gens_a`` with ``deg A_a <= degree_bound``.

    Central denominators of ``e`` and of the generators are units and are
    cleared first.  The returned witness satisfies ``e == sum(A*g)`` exactly.
    """
    gens = list(gens)
    ctx = e.ctx
    if degree_bound is None:
        degree_bound = e.total_degree() + 2
    if not e.num:
        return IdealResult(True, degree_bound, tuple(ctx.zero for _ in gens))
    target = e.num
    gnums = [g.num for g in gens if g.num]
    live = [g for g in gens if g.num]
    if not gnums:
        return IdealResult(False, degree_bound)
    used = set()
    for poly in [target, *gnums]:
        for m in poly.itermonoms():
            used.update(i for i, k in enumerate(m) if k)
    mons = monomials_upto(sorted(used), ctx.ring.ngens, degree_bound)
    columns = []
    labels = []
    for a, g in enumerate(gnums):
        for m in mons:
            columns.append({mm: c for mm, c in g.mul_monom(m).iterterms()})
            labels.append((a, m))
    sol = linalg.solve_columns(columns, dict(target.iterterms()))
    if sol is None:
        return IdealResult(False, degree_bound)
    coeffs = [dict() for _ in gnums]
    for j, val in sol.items():
        a, m = labels[j]
        coeffs[a][m] = val
    # e = target / den(e);  g = gnum / den(g)  =>  A = coeff * den(g) / den(e)
    witness = []
    it = iter(range(len(gnums)))
    for g in gens:
        if not g.num:
            witness.append(ctx.zero)
            continue
        a = next(it)
        A = PhaseExpr(ctx, ctx.ring(coeffs[a]))
        witness.append(A * g.denominator() / e.denominator())
    return IdealResult(True, degree_bound, tuple(witness))


def lift(e: PhaseExpr, den) -> dict:
    """Numerator of ``e`` written over the larger denominator monomial ``den``."""
    if any(h > w for h, w in zip(e.den, den)):
        raise ValueError(f"{den} does not divide into {e.den}")
    return dict(e._lifted(tuple(den)).iterterms())


def common_denominator(exprs: Iterable[PhaseExpr]):
    den = _ONE_DEN
    for e in exprs:
        den = tuple(max(u, v) for u, v in zip(den, e.den))
    return den


def normalize_constraint(e: PhaseExpr) -> PhaseExpr:
    """Drop unit factors and the rational content; make the leading coefficient positive."""
    num = e.num
    if not num:
        return e.ctx.zero
    from math import gcd, lcm

    coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in num.coeffs()]
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    g = 0
    for c in coeffs:
        g = gcd(g, int(c * den))
    scale = Fraction(den, g)
    lead = max(num.iterterms(), key=lambda t: _grlex_key(t[0]))[1]
    if lead < 0:
        scale = -scale
    out = e._new(num * QQ(scale.numerator, scale.denominator), _ONE_DEN)
    # strip an overall power of R
    r = min(m[e.ctx.r_index] for m in out.num.itermonoms())
    if r:
        out = out / e.ctx.R**r
    return out


def random_expr(ctx: PhaseSpace, rng, degree: int = 3, terms: int = 3, include_aux: bool = False) -> PhaseExpr:
    """Random polynomial in the phase-space variables (small integer coefficients)."""
    nvars = 2 * ctx.N + (2 * ctx.M if include_aux else 0)
    out = ctx.zero
    for _ in range(terms):
        d = rng.randint(0, degree)
        mon = [0] * ctx.ring.ngens
        for _ in range(d):
            mon[rng.randrange(nvars)] += 1
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        out = out + PhaseExpr(ctx, ctx.ring({tuple(mon): c}))
    return out
