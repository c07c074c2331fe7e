"""Poisson and Dirac brackets, constraint matrices and constraint classification."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .expr import (
    DenominatorError,
    IdealResult,
    PhaseExpr,
    PhaseSpace,
    PhaseVar,
    central_factorization,
    ideal_reduce,
    is_unit,
    normalize_constraint,
    partial,
)

SECOND_CLASS = "second_class"
FIRST_CLASS = "first_class"
MIXED = "mixed"
UNDETERMINED = "undetermined"


class NotInvertibleError(ArithmeticError):
    pass


class IterationBoundError(RuntimeError):
    pass


def _pairs(ctx: PhaseSpace, sector: str):
    if sector in ("all", "xp"):
        for i in range(1, ctx.N + 1):
            yield PhaseVar("x", i), PhaseVar("p", i)
    if sector in ("all", "QP"):
        for a in range(1, ctx.M + 1):
            yield PhaseVar("Q", a), PhaseVar("P", a)


def poisson(A: PhaseExpr, B: PhaseExpr, sector: str = "all") -> PhaseExpr:
    """Canonical Poisson bracket; ``sector`` restricts to the ``xp`` or ``QP`` pairs."""
    if A.quantum or B.quantum:
        raise ValueError("Poisson brackets are defined for classical expressions")
    ctx = A.ctx
    va, vb = A.variables(), B.variables()
    out = ctx.zero
    for q, p in _pairs(ctx, sector):
        iq, ip = ctx.index(q), ctx.index(p)
        if iq in va and ip in vb:
            out = out + partial(A, q) * partial(B, p)
        if ip in va and iq in vb:
            out = out - partial(A, p) * partial(B, q)
    return out


def on_shell_zero(e: PhaseExpr, constraints: Sequence[PhaseExpr], degree_bound: int | None = None) -> IdealResult:
    """Certify ``e`` vanishes on the constraint surface (after clearing unit denominators)."""
    if not e:
        return IdealResult(True, 0, tuple(e.ctx.zero for _ in constraints))
    return ideal_reduce(e, constraints, degree_bound)


def determinant(m: Sequence[Sequence[PhaseExpr]], zero: PhaseExpr) -> PhaseExpr:
    n = len(m)
    if n == 0:
        return zero + 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    out = zero
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * determinant(minor, zero)
        out = out + term if j % 2 == 0 else out - term
    return out


class ConstraintSet:
    """Ordered constraints with their bracket matrix ``Delta_ab = {phi_a, phi_b}``."""

    def __init__(self, constraints: Sequence[PhaseExpr], degree_bound: int | None = None):
        self.constraints = tuple(constraints)
        if not self.constraints:
            raise ValueError("empty constraint set; use ConstraintSet.empty(ctx)")
        self.ctx = self.constraints[0].ctx
        self.degree_bound = degree_bound

    @classmethod
    def empty(cls, ctx: PhaseSpace) -> "ConstraintSet":
        obj = cls.__new__(cls)
        obj.constraints = ()
        obj.ctx = ctx
        obj.degree_bound = None
        return obj

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]

    @cached_property
    def delta(self) -> tuple[tuple[PhaseExpr, ...], ...]:
        K = len(self.constraints)
        rows = [[self.ctx.zero] * K for _ in range(K)]
        for a in range(K):
            for b in range(a + 1, K):
                d = poisson(self.constraints[a], self.constraints[b])
                rows[a][b] = d
                rows[b][a] = -d
        return tuple(tuple(r) for r in rows)

    @cached_property
    def det(self) -> PhaseExpr:
        return determinant([list(r) for r in self.delta], self.ctx.zero)

    @cached_property
    def classification(self) -> str:
        return classify(self)

    @cached_property
    def delta_inverse(self) -> tuple[tuple[PhaseExpr, ...], ...]:
        """Exact adjugate / determinant; the determinant must be a unit."""
        K = len(self.constraints)
        det = self.det
        if not det or not is_unit(det):
            raise NotInvertibleError(f"constraint matrix not invertible in the admissible ring: det = {det}")
        inv_det = det.inverse()
        d = [list(r) for r in self.delta]
        zero = self.ctx.zero
        out = [[zero] * K for _ in range(K)]
        for i in range(K):
            for j in range(K):
                minor = [row[:i] + row[i + 1 :] for k, row in enumerate(d) if k != j]
                cof = determinant(minor, zero)
                if cof:
                    out[i][j] = cof * inv_det if (i + j) % 2 == 0 else -cof * inv_det
        return tuple(tuple(r) for r in out)

    def __repr__(self):
        return f"ConstraintSet([{', '.join(map(str, self.constraints))}])"


def sphere_constraints(ctx: PhaseSpace) -> ConstraintSet:
    """``x^2 - R^2`` and ``(x,p)``."""
    return ConstraintSet([ctx.sq_x - ctx.R**2, ctx.dot_xp])


def classify(cs: ConstraintSet) -> str:
    K = len(cs)
    if K == 0:
        return FIRST_CLASS
    gens = list(cs.constraints)
    entries = [cs.delta[a][b] for a in range(K) for b in range(a + 1, K)]
    checks = [on_shell_zero(e, gens, cs.degree_bound) for e in entries if e]
    if all(c.member for c in checks):
        return FIRST_CLASS
    det = cs.det
    if det and is_unit(det):
        return SECOND_CLASS
    if not det or on_shell_zero(det, gens, cs.degree_bound).member:
        return MIXED
    return UNDETERMINED


def dirac(A: PhaseExpr, B: PhaseExpr, cs: ConstraintSet) -> PhaseExpr:
    """``{A,B} - {A,phi_a} [Delta^-1]^{ab} {phi_b,B}``."""
    inv = cs.delta_inverse
    out = poisson(A, B)
    K = len(cs)
    left = [poisson(A, phi) for phi in cs.constraints]
    right = None
    for a in range(K):
        if not left[a]:
            continue
        for b in range(K):
            if not inv[a][b]:
                continue
            if right is None:
                right = [poisson(phi, B) for phi in cs.constraints]
            if right[b]:
                out = out - left[a] * inv[a][b] * right[b]
    return out


@dataclass(frozen=True)
class EOMResidual:
    residual: PhaseExpr
    ideal: IdealResult

    @property
    def on_shell(self) -> bool:
        return self.ideal.member


def multipliers(H: PhaseExpr, cs: ConstraintSet) -> tuple[PhaseExpr, ...]:
    """Consistency-fixed multipliers ``u^a = -[Delta^-1]^{ab} {phi_b, H}``."""
    inv = cs.delta_inverse
    K = len(cs)
    hb = [poisson(phi, H) for phi in cs.constraints]
    out = []
    for a in range(K):
        u = cs.ctx.zero
        for b in range(K):
            if inv[a][b] and hb[b]:
                u = u - inv[a][b] * hb[b]
        out.append(u)
    return tuple(out)


def total_hamiltonian(H: PhaseExpr, cs: ConstraintSet) -> PhaseExpr:
    """``H + u^a phi_a`` with the multipliers fixed by constraint preservation."""
    out = H
    for u, phi in zip(multipliers(H, cs), cs.constraints):
        out = out + u * phi
    return out


def eom_residual(H: PhaseExpr, cs: ConstraintSet, v, total: bool = False, degree_bound: int | None = None) -> EOMResidual:
    """Difference between Dirac-bracket and Poisson-bracket evolution of ``v``.

    ``v`` is a :class:`PhaseVar` or any observable.  With ``total=False`` the
    comparison is against ``{v, H}``; with ``total=True`` against ``{v, H_T}``
    where ``H_T`` is the total Hamiltonian with consistency-fixed multipliers.
    The residual's membership in the constraint ideal is certified by a
    bounded linear solve.
    """
    ctx = cs.ctx
    obs = ctx.var(v.kind, v.index) if isinstance(v, PhaseVar) else v
    gen = total_hamiltonian(H, cs) if total else H
    res = dirac(obs, H, cs) - poisson(obs, gen)
    return EOMResidual(res, on_shell_zero(res, list(cs.constraints), degree_bound))


@dataclass
class SecondaryResult:
    constraints: ConstraintSet
    fixed_multipliers: dict[int, PhaseExpr]
    iterations: int


def secondary_constraints(
    H: PhaseExpr,
    primary: Sequence[PhaseExpr],
    ctx: PhaseSpace | None = None,
    max_iterations: int = 10,
    degree_bound: int | None = None,
) -> SecondaryResult:
    """Dirac-Bergmann consistency algorithm.

    Each constraint ``phi`` must be preserved by ``H_T = H + u_j psi_j`` (``psi``
    the primary constraints): ``{phi, H} + u_j {phi, psi_j} ~ 0``.  When some
    coefficient ``{phi, psi_j}`` is nonzero on-shell and is a unit, the condition
    fixes ``u_j`` instead of producing a constraint; otherwise a nonvanishing
    ``{phi, H}`` (with fixed multipliers substituted) is normalized and
    appended as a new constraint.
    """
    if ctx is None:
        ctx = H.ctx
    primary = [normalize_constraint(p) for p in primary]
    found = list(primary)
    if not found:
        return SecondaryResult(ConstraintSet.empty(ctx), {}, 0)
    fixed: dict[int, PhaseExpr] = {}
    queue = list(found)
    steps = 0
    while queue:
        steps += 1
        if steps > max_iterations:
            raise IterationBoundError(f"no closure after {max_iterations} consistency conditions")
        phi = queue.pop(0)
        drift = poisson(phi, H)
        coeffs = [poisson(phi, psi) for psi in primary]
        for j, u in fixed.items():
            if coeffs[j]:
                drift = drift + coeffs[j] * u
                coeffs[j] = ctx.zero
        free = [j for j, c in enumerate(coeffs) if c and not on_shell_zero(c, found, degree_bound).member]
        if free:
            j = free[0]
            try:
                fixed[j] = -drift / coeffs[j]
            except DenominatorError:
                fixed[j] = None  # determined, but not expressible in the admissible ring
            continue
        if on_shell_zero(drift, found, degree_bound).member:
            continue
        new = normalize_constraint(drift)
        found.append(new)
        queue.append(new)
    return SecondaryResult(ConstraintSet(found, degree_bound), fixed, steps)


@dataclass(frozen=True)
class GeneralConstraint:
    """Surface ``F(x) = 0`` with its secondary constraint ``sum_i p_i dF/dx_i``."""

    F: PhaseExpr

    @cached_property
    def phi1(self) -> PhaseExpr:
        return normalize_constraint(self.F)

    @cached_property
    def phi2(self) -> PhaseExpr:
        ctx = self.F.ctx
        res = secondary_constraints(ctx.sq_p / 2, [self.F])
        if len(res.constraints) != 2:
            raise ValueError(f"expected one secondary constraint, got {res.constraints}")
        return res.constraints[1]

    def is_linear_in_p(self) -> bool:
        ctx = self.F.ctx
        lo, hi = ctx.N, 2 * ctx.N
        return all(sum(m[lo:hi]) == 1 for m in self.phi2.num.itermonoms())

    def constraint_set(self) -> ConstraintSet:
        return ConstraintSet([self.phi1, self.phi2])


__all__ = [
    "ConstraintSet",
    "EOMResidual",
    "GeneralConstraint",
    "NotInvertibleError",
    "IterationBoundError",
    "classify",
    "dirac",
    "eom_residual",
    "multipliers",
    "poisson",
    "secondary_constraints",
    "sphere_constraints",
    "total_hamiltonian",
    "central_factorization",
]
