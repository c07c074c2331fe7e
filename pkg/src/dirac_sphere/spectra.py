"""Energy spectra on the D-sphere and the harmonic-polynomial Casimir oracle.

Energies are exact rationals in units of ``hbar^2``.  The Casimir oracle
works on homogeneous harmonic polynomials in ``N = D+1`` variables, stored
as ``{exponent tuple: Fraction}`` dicts, and does not touch the phase-space
expression machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from . import linalg

ALPHAS = (Fraction(1, 24), Fraction(1, 12), Fraction(1, 8))

Poly = dict  # exponent tuple -> Fraction


@dataclass(frozen=True)
class SpectrumRow:
    l: int
    energy: Fraction  # coefficient of hbar^2
    degeneracy: int


@dataclass(frozen=True)
class SpectrumTable:
    scheme: str
    D: int
    R: Fraction
    rows: tuple[SpectrumRow, ...]
    alpha: Fraction | None = None

    def energy(self, l: int) -> Fraction:
        return self.rows[l].energy

    def as_tuples(self):
        return [(r.l, r.energy, r.degeneracy) for r in self.rows]


class CasimirError(ArithmeticError):
    def __init__(self, message, vector=None):
        super().__init__(message)
        self.vector = vector


def _check(D, R):
    if D < 1:
        raise ValueError("D must be >= 1")
    R = Fraction(R)
    if R <= 0:
        raise ValueError("R must be positive")
    return R


def _binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def degeneracy_formula(D: int, l: int) -> int:
    return _binom(D + l, l) - _binom(D + l - 2, l - 2)


def degeneracy(D: int, l: int, oracle: bool = False) -> int:
    """Dimension of degree-``l`` spherical harmonics on the ``D``-sphere."""
    if oracle:
        return len(harmonic_basis(D, l).vectors)
    return degeneracy_formula(D, l)


def laplace_beltrami_level(D: int, l: int) -> Fraction:
    return Fraction(l * (l + D - 1))


def gauge_spectrum(D: int, R, l_max: int) -> SpectrumTable:
    """``E_l = hbar^2 l(l+D-1) / (2 R^2)``."""
    R = _check(D, R)
    rows = tuple(
        SpectrumRow(l, laplace_beltrami_level(D, l) / (2 * R * R), degeneracy(D, l)) for l in range(l_max + 1)
    )
    return SpectrumTable("gauge", D, R, rows)


def transverse_constant(D: int, R) -> Fraction:
    R = Fraction(R)
    return Fraction(D * D) / (8 * R * R)


def dirac_spectrum(D: int, R, l_max: int) -> SpectrumTable:
    """Gauge levels shifted by ``hbar^2 D^2 / (8 R^2)``."""
    R = _check(D, R)
    shift = transverse_constant(D, R)
    g = gauge_spectrum(D, R, l_max)
    return SpectrumTable("dirac", D, R, tuple(SpectrumRow(r.l, r.energy + shift, r.degeneracy) for r in g.rows))


def curvature_shift(D: int, R, alpha) -> Fraction:
    """``alpha * D(D-1) / R^2`` (coefficient of hbar^2)."""
    R = _check(D, R)
    return Fraction(alpha) * D * (D - 1) / (R * R)


def curvature_shift_spectrum(D: int, R, l_max: int, alpha) -> SpectrumTable:
    R = _check(D, R)
    shift = curvature_shift(D, R, alpha)
    g = gauge_spectrum(D, R, l_max)
    return SpectrumTable(
        "curvature_shift", D, R, tuple(SpectrumRow(r.l, r.energy + shift, r.degeneracy) for r in g.rows), Fraction(alpha)
    )


def spectrum(scheme: str, D: int, R, l_max: int, alpha=None) -> SpectrumTable:
    if scheme == "gauge":
        return gauge_spectrum(D, R, l_max)
    if scheme == "dirac":
        return dirac_spectrum(D, R, l_max)
    if scheme == "curvature_shift":
        if alpha is None:
            raise ValueError("curvature_shift needs alpha")
        return curvature_shift_spectrum(D, R, l_max, alpha)
    raise ValueError(f"unknown scheme {scheme!r}")


def shift_polynomials(alpha) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Coefficients in ``D`` (constant, linear, quadratic), times ``R^2/hbar^2``.

    Returns ``(transverse, curvature)`` for ``D^2/8`` and ``alpha D (D-1)``.
    """
    a = Fraction(alpha)
    return (Fraction(0), Fraction(0), Fraction(1, 8)), (Fraction(0), -a, a)


# ---------------------------------------------------------------------------
# harmonic polynomials


def monomials(N: int, l: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(N), l):
        e = [0] * N
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def laplacian(poly: Poly, N: int) -> Poly:
    out: Poly = {}
    for e, c in poly.items():
        for i in range(N):
            if e[i] >= 2:
                f = list(e)
                f[i] -= 2
                f = tuple(f)
                out[f] = out.get(f, 0) + c * e[i] * (e[i] - 1)
    return {k: v for k, v in out.items() if v}


def rotation_action(poly: Poly, i: int, j: int) -> Poly:
    """``(x_i d_j - x_j d_i) poly`` with 1-based ``i, j``."""
    i, j = i - 1, j - 1
    out: Poly = {}

    def add(e, c):
        out[e] = out.get(e, 0) + c

    for e, c in poly.items():
        if e[j]:
            f = list(e)
            f[j] -= 1
            f[i] += 1
            add(tuple(f), c * e[j])
        if e[i]:
            f = list(e)
            f[i] -= 1
            f[j] += 1
            add(tuple(f), -c * e[i])
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    D: int
    l: int
    monomials: tuple[tuple[int, ...], ...]
    vectors: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def N(self):
        return self.D + 1

    def polys(self) -> list[Poly]:
        return [{m: c for m, c in zip(self.monomials, v) if c} for v in self.vectors]

    @cached_property
    def _pivots(self) -> tuple[int, ...]:
        # the null-space basis is the identity on its free columns
        piv = []
        for k, v in enumerate(self.vectors):
            for t, c in enumerate(v):
                if c == 1 and all(not u[t] for j, u in enumerate(self.vectors) if j != k):
                    piv.append(t)
                    break
            else:
                raise ValueError("basis is not in reduced form")
        return tuple(piv)

    @cached_property
    def _sparse(self) -> tuple[dict, ...]:
        return tuple({self.monomials[t]: c for t, c in enumerate(v) if c} for v in self.vectors)

    def coordinates(self, poly: Poly) -> list[Fraction]:
        """Coordinates of a polynomial in this basis (it must lie in the span)."""
        coords = [Fraction(poly.get(self.monomials[t], 0)) for t in self._pivots]
        recon: Poly = {}
        for c, v in zip(coords, self._sparse):
            if c:
                for m, a in v.items():
                    recon[m] = recon.get(m, 0) + c * a
        if {m: c for m, c in recon.items() if c} != {m: c for m, c in poly.items() if c}:
            raise CasimirError("polynomial is not in the harmonic space", poly)
        return coords


@lru_cache(maxsize=None)
def harmonic_basis(D: int, l: int) -> HarmonicBasis:
    """Kernel of the flat Laplacian on degree-``l`` polynomials in ``D+1`` variables."""
    if D < 1 or l < 0:
        raise ValueError("need D >= 1 and l >= 0")
    N = D + 1
    src = monomials(N, l)
    if l < 2:
        vecs = [[Fraction(int(i == j)) for j in range(len(src))] for i in range(len(src))]
    else:
        tgt = monomials(N, l - 2)
        index = {m: r for r, m in enumerate(tgt)}
        rows = [[Fraction(0)] * len(src) for _ in tgt]
        for col, m in enumerate(src):
            for t, c in laplacian({m: Fraction(1)}, N).items():
                rows[index[t]][col] += c
        vecs = linalg.nullspace(rows, len(src))
    return HarmonicBasis(D, l, tuple(src), tuple(tuple(v) for v in vecs))


def rotation_matrices(D: int, l: int) -> dict[tuple[int, int], list[list[Fraction]]]:
    """Matrices of ``x_i d_j - x_j d_i`` on the harmonic basis (columns = images)."""
    B = harmonic_basis(D, l)
    polys = B.polys()
    out = {}
    for i, j in combinations(range(1, D + 2), 2):
        cols = [B.coordinates(rotation_action(p, i, j)) for p in polys]
        k = len(polys)
        out[(i, j)] = [[cols[c][r] for c in range(k)] for r in range(k)]
    return out


def _dm(rows):
    k = len(rows)
    return DomainMatrix(
        {r: {c: QQ(v.numerator, v.denominator) for c, v in enumerate(row) if v} for r, row in enumerate(rows)},
        (k, k),
        QQ,
    )


@dataclass(frozen=True)
class CasimirResult:
    D: int
    l: int
    eigenvalue: Fraction
    uniform: bool
    dimension: int


def casimir_matrix(D: int, l: int) -> list[list[Fraction]]:
    """``L^2 = -sum_a A_a^2`` with ``L_a = -i A_a`` (hbar = 1)."""
    k = len(harmonic_basis(D, l).vectors)
    C = DomainMatrix.zeros((k, k), QQ).to_sparse()
    for A in rotation_matrices(D, l).values():
        A = _dm(A)
        C = C - A * A
    dense = C.to_Matrix()
    return [[Fraction(int(dense[r, c].p), int(dense[r, c].q)) for c in range(k)] for r in range(k)]


def casimir_check(D: int, l: int) -> CasimirResult:
    """Confirm the Casimir acts as a single scalar on the degree-``l`` harmonics."""
    C = casimir_matrix(D, l)
    k = len(C)
    lam = C[0][0] if k else Fraction(0)
    for c in range(k):
        for r in range(k):
            want = lam if r == c else 0
            if C[r][c] != want:
                vec = harmonic_basis(D, l).polys()[c]
                raise CasimirError(f"Casimir is not uniform on basis vector {c}: {vec}", vec)
    return CasimirResult(D, l, lam, True, k)


def fischer_gram(D: int, l: int) -> list[list[Fraction]]:
    """Gram matrix of the rotation-invariant Fischer product ``<x^a, x^b> = a! delta_ab``."""
    from math import factorial, prod

    B = harmonic_basis(D, l)
    w = [Fraction(prod(factorial(e) for e in m)) for m in B.monomials]
    V = B.vectors
    return [[sum((u[t] * v[t] * w[t] for t in range(len(w))), Fraction(0)) for v in V] for u in V]
