"""Abelian conversion of second-class constraints.

Constraints ``phi_a`` are extended by auxiliary pairs ``(Q, P)`` into
commuting ``sigma_a`` and the Hamiltonian into a gauge-invariant ``Hbar``,
both solved order by order in the total (Q,P)-degree.

Grading: with ``sigma = sum_k sigma^(k)`` the degree-``n`` part of
``{A, B}`` is ``sum_{i+j=n} {A^i, B^j}_xp + sum_{i+j=n+2} {A^i, B^j}_QP``, so
the unknown ``sigma^(n+1)`` enters the degree-``n`` equation only through
``{sigma^(n+1), sigma^(1)}_QP``.  The first order is quadratic and is fixed
by a pairing rule (see :func:`_first_order`); every later order is a linear
solve over a bounded ansatz.

Ansatz: the coefficient of ``Q^a P^b`` is ``poly(x, p, R) / sq(x)^b`` with
the polynomial of degree at most ``coeff_degree``.  ``P`` carries the same
weight as ``sq(x)`` (they enter together through ``sigma_1 + R^2``).

Gauge flow convention: ``delta e = xi * {e, sigma}``.  In this convention
``sigma_2`` rescales ``x -> exp(xi) x`` and ``sigma_1`` shifts
``Q -> Q + xi``; a flow written as ``x -> exp(-xi) x``, ``Q -> Q - xi`` is
the same flow with ``xi -> -xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from . import linalg
from .brackets import SECOND_CLASS, ConstraintSet, poisson
from .expr import (
    PhaseExpr,
    PhaseSpace,
    PhaseVar,
    common_denominator,
    lift,
    monomials_upto,
    qp_degree,
    qp_max_degree,
    qp_part,
)

FLOW_CONVENTION = "delta e = xi * {e, sigma}"


class ConversionError(ArithmeticError):
    def __init__(self, message, order=None, residual=None):
        super().__init__(message)
        self.order = order
        self.residual = residual


@dataclass
class ConversionSeries:
    constraints: tuple[PhaseExpr, ...]
    terms: list[list[PhaseExpr]]  # terms[a][k] = sigma_a^(k)
    k_max: int
    exact: bool

    def sigma(self, a: int, upto: int | None = None) -> PhaseExpr:
        ts = self.terms[a] if upto is None else self.terms[a][: upto + 1]
        out = ts[0] * 0 if ts else None
        for t in ts:
            out = out + t
        return out

    @property
    def sigmas(self) -> tuple[PhaseExpr, ...]:
        return tuple(self.sigma(a) for a in range(len(self.terms)))

    def term(self, a: int, k: int) -> PhaseExpr:
        if k < len(self.terms[a]):
            return self.terms[a][k]
        if self.exact:
            return self.constraints[a] * 0
        raise IndexError(f"order {k} beyond computed k_max={self.k_max}")

    def __len__(self):
        return len(self.terms)


@dataclass
class ExtendedHamiltonian:
    H: PhaseExpr
    terms: list[PhaseExpr]
    k_max: int
    exact: bool

    @property
    def value(self) -> PhaseExpr:
        out = self.H * 0
        for t in self.terms:
            out = out + t
        return out


@dataclass(frozen=True)
class Ansatz:
    """Bounded family of unknown expressions of a fixed (Q,P)-degree."""

    ctx: PhaseSpace
    order: int
    coeff_degree: int
    basis: tuple[PhaseExpr, ...] = field(repr=False)

    @classmethod
    def build(cls, ctx: PhaseSpace, order: int, coeff_degree: int) -> "Ansatz":
        n = ctx.ring.ngens
        coeff_vars = list(range(2 * ctx.N)) + [ctx.r_index]
        qp_vars = list(range(2 * ctx.N, 2 * ctx.N + 2 * ctx.M))
        coeff_mons = monomials_upto(coeff_vars, n, coeff_degree)
        # prefer low total degree, then p-independence
        coeff_mons.sort(key=lambda m: (sum(m), sum(m[ctx.N : 2 * ctx.N]), tuple(-e for e in m)))
        qp_mons = [m for m in monomials_upto(qp_vars, n, order) if sum(m) == order]
        p_lo = 2 * ctx.N + ctx.M
        basis = []
        for cm in coeff_mons:
            for qm in qp_mons:
                mon = tuple(u + v for u, v in zip(cm, qm))
                pdeg = sum(qm[p_lo : p_lo + ctx.M])
                basis.append(PhaseExpr(ctx, ctx.ring({mon: 1}), (0, pdeg, 0)))
        return cls(ctx, order, coeff_degree, tuple(basis))


def _solve(unknown_blocks, known, ctx, order):
    """Solve ``known[e] + sum_j u_j * contrib[j][e] == 0`` for every equation ``e``.

    ``unknown_blocks`` is a list of ``(basis_expr, {e: contribution})``.
    """
    eqs = sorted(known)
    dens = {}
    for e in eqs:
        exprs = [known[e]] + [c[e] for _, c in unknown_blocks if e in c]
        dens[e] = common_denominator(exprs)
    columns = []
    for _, contrib in unknown_blocks:
        col = {}
        for e, val in contrib.items():
            if val:
                for mon, c in lift(val, dens[e]).items():
                    col[(e, mon)] = c
        columns.append(col)
    rhs = {}
    for e in eqs:
        if known[e]:
            for mon, c in lift(known[e], dens[e]).items():
                rhs[(e, mon)] = -c
    sol = linalg.solve_columns(columns, rhs)
    if sol is None:
        raise ConversionError(f"linear system inconsistent at order {order}; enlarge the ansatz", order=order)
    return sol


def _first_order(cs: ConstraintSet, ctx: PhaseSpace) -> list[PhaseExpr]:
    """Pair constraint ``2k-1`` with ``2k`` and attach the auxiliary pair ``(Q_k, P_k)``.

    For a pair with ``d = {phi_a, phi_b}``: ``sigma_a^(1) = P_k`` and
    ``sigma_b^(1) = d * Q_k``, which cancels ``d`` since ``{P, d Q}_QP = -d``.
    Requires brackets between different pairs to vanish identically.
    """
    K = len(cs)
    delta = cs.delta
    out = []
    for a in range(K):
        for b in range(K):
            if a // 2 != b // 2 and delta[a][b]:
                raise ConversionError(
                    f"constraints {a + 1} and {b + 1} belong to different pairs but do not commute", order=1
                )
    for k in range(K // 2):
        a, b = 2 * k, 2 * k + 1
        out.append(ctx.P(k + 1))
        out.append(delta[a][b] * ctx.Q(k + 1))
    return out


def abelianize(cs: ConstraintSet, k_max: int = 2, coeff_degree: int = 4) -> ConversionSeries:
    """First-class ``sigma_a`` with ``sigma_a|_{Q=P=0} = phi_a`` and ``{sigma_a, sigma_b} = 0``."""
    K = len(cs)
    if K == 0:
        return ConversionSeries((), [], k_max, True)
    ctx = cs.ctx
    if K % 2:
        raise ConversionError("an odd number of constraints cannot be second class")
    if cs.classification != SECOND_CLASS:
        raise ConversionError(f"constraints are {cs.classification}, not second class")
    if ctx.M < K // 2:
        raise ConversionError(f"need {K // 2} auxiliary pairs, phase space declares {ctx.M}")
    if any(qp_max_degree(phi) for phi in cs.constraints):
        raise ConversionError("constraints must not depend on auxiliary variables")
    terms = [[phi] for phi in cs.constraints]
    if k_max >= 1:
        for a, t in enumerate(_first_order(cs, ctx)):
            terms[a].append(t)
    for n in range(1, k_max):
        partial_sums = [sum(ts[1:], ts[0]) for ts in terms]
        known = {}
        for a in range(K):
            for b in range(a + 1, K):
                known[(a, b)] = qp_part(poisson(partial_sums[a], partial_sums[b]), n)
        if not any(known.values()):
            for ts in terms:
                ts.append(ctx.zero)
            continue
        ansatz = Ansatz.build(ctx, n + 1, coeff_degree)
        blocks = []
        for c in range(K):
            for u in ansatz.basis:
                contrib = {}
                for (a, b) in known:
                    if a == c:
                        contrib[(a, b)] = poisson(u, terms[b][1], "QP")
                    elif b == c:
                        contrib[(a, b)] = poisson(terms[a][1], u, "QP")
                blocks.append((c, u, contrib))
        sol = _solve([(u, contrib) for _, u, contrib in blocks], known, ctx, n)
        new = [ctx.zero] * K
        for j, val in sol.items():
            c, u, _ = blocks[j]
            new[c] = new[c] + u * Fraction(int(val.numerator), int(val.denominator))
        for a in range(K):
            terms[a].append(new[a])
    sig = [sum(ts[1:], ts[0]) for ts in terms]
    exact = all(not poisson(sig[a], sig[b]) for a in range(K) for b in range(a + 1, K))
    return ConversionSeries(tuple(cs.constraints), terms, k_max, exact)


def extend_hamiltonian(H: PhaseExpr, series: ConversionSeries, k_max: int = 2, coeff_degree: int = 4) -> ExtendedHamiltonian:
    """Graded solution of ``{Hbar, sigma_a} = 0`` with ``Hbar|_{Q=P=0} = H``."""
    ctx = H.ctx
    K = len(series)
    if not series.exact and series.k_max < k_max:
        raise ConversionError(f"sigma series known to order {series.k_max}, need {k_max}")
    if K == 0:
        return ExtendedHamiltonian(H, [H], k_max, True)
    sig = [series.sigma(a) for a in range(K)]
    first = [series.term(a, 1) for a in range(K)]
    terms = [H]
    for n in range(k_max):
        partial_sum = sum(terms[1:], terms[0])
        known = {a: qp_part(poisson(partial_sum, sig[a]), n) for a in range(K)}
        if not any(known.values()):
            terms.append(ctx.zero)
            continue
        ansatz = Ansatz.build(ctx, n + 1, coeff_degree)
        blocks = [(u, {a: poisson(u, first[a], "QP") for a in range(K)}) for u in ansatz.basis]
        sol = _solve(blocks, known, ctx, n)
        new = ctx.zero
        for j, val in sol.items():
            new = new + blocks[j][0] * Fraction(int(val.numerator), int(val.denominator))
        terms.append(new)
    total = sum(terms[1:], terms[0])
    exact = all(not poisson(total, s) for s in sig)
    return ExtendedHamiltonian(H, terms, k_max, exact)


# ---------------------------------------------------------------------------
# closed forms for the sphere


def sphere_sigmas(ctx: PhaseSpace) -> tuple[PhaseExpr, PhaseExpr]:
    """``sigma_1 = x^2 - R^2 + P``, ``sigma_2 = (x,p) + 2 x^2 Q``."""
    return ctx.sq_x - ctx.R**2 + ctx.P(1), ctx.dot_xp + 2 * ctx.sq_x * ctx.Q(1)


def sphere_hamiltonian(ctx: PhaseSpace) -> PhaseExpr:
    """``(sigma_2^2 + L^2) / (2 (sigma_1 + R^2))``."""
    s1, s2 = sphere_sigmas(ctx)
    return (s2**2 + ctx.sq_L) / (2 * (s1 + ctx.R**2))


def expand_qp(e: PhaseExpr, order: int) -> list[PhaseExpr]:
    """Graded (Q,P)-expansion through ``order``, expanding ``(sq(x)+P1)^-b`` binomially."""
    ctx = e.ctx
    r, a, b = e.den
    base = e.numerator() / (ctx.R**r * ctx.sq_x**a) if (r or a) else e.numerator()
    if b:
        P = ctx.P(1)
        total = ctx.zero
        for k in range(order + 1):
            coef = (-1) ** k * comb(b + k - 1, k)
            total = total + coef * base * P**k / ctx.sq_x ** (b + k)
        base = total
    return [qp_part(base, k) for k in range(order + 1)]


def on_shell_reduction(e: PhaseExpr) -> PhaseExpr:
    """Impose ``sigma_1 = sigma_2 = 0`` by ``P -> R^2 - x^2``, ``Q -> -(x,p)/(2 x^2)``."""
    from .expr import substitute

    ctx = e.ctx
    return substitute(
        e,
        {
            PhaseVar("P", 1): ctx.R**2 - ctx.sq_x,
            PhaseVar("Q", 1): -ctx.dot_xp / (2 * ctx.sq_x),
        },
    )


# ---------------------------------------------------------------------------
# gauge flows


@dataclass(frozen=True)
class GaugeFlow:
    """Lie series ``sum_k xi^k/k! ad^k(e)`` with ``ad(e) = {e, sigma}``."""

    terms: tuple[PhaseExpr, ...]  # terms[k] = ad^k(e) / k!
    kind: str  # terminating | exponential | truncated
    rate: Fraction | None = None
    convention: str = FLOW_CONVENTION

    def closed_form(self) -> str:
        e = self.terms[0]
        if self.kind == "exponential":
            r = self.rate
            k = "" if r == 1 else ("-" if r == -1 else f"{r}*")
            return f"exp({k}xi)*({e})"
        pieces = []
        for k, t in enumerate(self.terms):
            if not t:
                continue
            if k == 0:
                pieces.append(f"({t})")
            elif k == 1:
                pieces.append(f"xi*({t})")
            else:
                pieces.append(f"xi^{k}*({t})")
        body = " + ".join(pieces) or "0"
        return body if self.kind == "terminating" else body + " + O(xi^%d)" % len(self.terms)


def _ratio(a: PhaseExpr, b: PhaseExpr):
    if not b:
        return None
    q = a / b if _unit_or_none(b) else None
    if q is not None and q.is_constant():
        return q.constant_value()
    # a == c * b for a rational constant c
    (mon, cb) = next(iter(b.num.iterterms()))
    ca = dict(a.num.iterterms()).get(mon)
    if ca is None or a.den != b.den:
        return None
    c = Fraction(int(ca.numerator), int(ca.denominator)) / Fraction(int(cb.numerator), int(cb.denominator))
    return c if a == b * c else None


def _unit_or_none(b):
    from .expr import is_unit

    return is_unit(b)


def gauge_transform(e: PhaseExpr, generator: PhaseExpr, order: int = 6) -> GaugeFlow:
    terms = [e]
    cur = e
    for k in range(1, order + 1):
        cur = poisson(cur, generator)
        if not cur:
            return GaugeFlow(tuple(terms), "terminating")
        if k == 1:
            rate = _ratio(cur, e)
            if rate is not None:
                series = tuple(e * (rate**j / factorial(j)) for j in range(order + 1))
                return GaugeFlow(series, "exponential", rate)
        terms.append(cur / factorial(k))
    return GaugeFlow(tuple(terms), "truncated")
