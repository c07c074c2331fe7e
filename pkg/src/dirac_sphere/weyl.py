"""Noncommutative operator algebra with normal ordering.

Two relation tables are provided: the canonical Heisenberg algebra and the
quantized Dirac-bracket algebra of the sphere,

    [x_i, x_j] = 0
    [x_j, p_k] = i hbar (delta_jk - x_j x_k / R^2)
    [p_j, p_k] = i hbar (x_k p_j - x_j p_k) / R^2

where ``x^2`` is central and replaced by ``R^2``.  Normal order puts every
``x`` left of every ``p`` (then ``Q``, ``P``), indices ascending within each
block.  With the central substitution enabled the word ``x_N x_N`` is
rewritten to ``R^2 - sum_{i<N} x_i x_i`` so normal forms are unique modulo
``x^2 = R^2``.

Coefficients are exact Gaussian rationals times ``R^r hbar^h`` (``r`` any
integer, ``h >= 0``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Iterable


class Gauss:
    """Exact Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def of(cls, c) -> "Gauss":
        return c if isinstance(c, Gauss) else cls(c)

    def __add__(self, o):
        o = Gauss.of(o)
        return Gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-Gauss.of(o))

    def __rsub__(self, o):
        return Gauss.of(o) - self

    def __mul__(self, o):
        o = Gauss.of(o)
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Gauss.of(o)
        n = o.re * o.re + o.im * o.im
        return self * Gauss(o.re / n, -o.im / n)

    def conjugate(self):
        return Gauss(self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Gauss(o)
        return isinstance(o, Gauss) and self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"Gauss({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return "i" if self.im == 1 else ("-i" if self.im == -1 else f"{self.im}*i")
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*i)"


I = Gauss(0, 1)

# a term key is (word, R exponent, hbar exponent)
Key = tuple


def _add_into(acc: dict, key, c):
    v = acc.get(key)
    v = c if v is None else v + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class Algebra:
    """Generators and relation table.

    ``kind`` is ``"canonical"`` or ``"dirac"``.  ``aux`` adds canonical
    ``(Q_k, P_k)`` pairs commuting with everything else.
    """

    def __init__(self, N: int, kind: str = "canonical", aux: int = 0, central_substitution: bool = True):
        if kind not in ("canonical", "dirac"):
            raise ValueError(f"unknown algebra kind {kind!r}")
        self.N = N
        self.kind = kind
        self.aux = aux
        self.central_substitution = central_substitution and kind == "dirac"
        self.names = (
            [f"x{i}" for i in range(1, N + 1)]
            + [f"p{i}" for i in range(1, N + 1)]
            + [f"Q{i}" for i in range(1, aux + 1)]
            + [f"P{i}" for i in range(1, aux + 1)]
        )
        self._table: dict[tuple[int, int], dict] = {}
        self._nf_cache: dict[tuple, dict] = {}
        self._build_table()

    def __repr__(self):
        sub = "" if self.kind == "canonical" else f", central_substitution={self.central_substitution}"
        return f"Algebra(N={self.N}, kind={self.kind!r}{sub})"

    # generator ids: x 0..N-1, p N..2N-1, Q 2N.., P 2N+aux..
    def x_id(self, i):
        return i - 1

    def p_id(self, i):
        return self.N + i - 1

    def _build_table(self):
        N = self.N
        mI = -I
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                # [p_k, x_j]
                rel = {}
                if j == k:
                    rel[((), 0, 1)] = mI
                if self.kind == "dirac":
                    w = tuple(sorted((self.x_id(j), self.x_id(k))))
                    _add_into(rel, (w, -2, 1), I)
                self._table[(self.p_id(k), self.x_id(j))] = rel
        if self.kind == "dirac":
            for j in range(1, N + 1):
                for k in range(1, j):
                    # [p_j, p_k], j > k
                    rel = {}
                    _add_into(rel, ((self.x_id(k), self.p_id(j)), -2, 1), I)
                    _add_into(rel, ((self.x_id(j), self.p_id(k)), -2, 1), mI)
                    self._table[(self.p_id(j), self.p_id(k))] = rel
        for a in range(self.aux):
            q, p = 2 * N + a, 2 * N + self.aux + a
            self._table[(p, q)] = {((), 0, 1): mI}

    def relation(self, g: int, h: int) -> dict:
        """``[g, h]`` for ``g > h`` as a raw term dict."""
        return self._table.get((g, h), {})

    @property
    def ngens(self):
        return len(self.names)

    def generators(self) -> list["OperatorExpr"]:
        return [self.gen(g) for g in range(self.ngens)]

    def gen(self, g: int) -> "OperatorExpr":
        return OperatorExpr(self, {((g,), 0, 0): Gauss(1)}, normal=True)

    def x(self, i):
        return self.gen(self.x_id(i))

    def p(self, i):
        return self.gen(self.p_id(i))

    def scalar(self, c=1, r=0, h=0) -> "OperatorExpr":
        c = Gauss.of(c)
        return OperatorExpr(self, {((), r, h): c} if c else {}, normal=True)

    @property
    def hbar(self):
        return self.scalar(1, 0, 1)

    @property
    def R(self):
        return self.scalar(1, 1, 0)

    @property
    def zero(self):
        return OperatorExpr(self, {}, normal=True)

    @property
    def one(self):
        return self.scalar(1)

    # -- rewriting --------------------------------------------------------
    def _redexes(self, w: tuple) -> list[int]:
        xn = self.N - 1
        out = []
        for i in range(len(w) - 1):
            if w[i] > w[i + 1] or (self.central_substitution and w[i] == w[i + 1] == xn):
                out.append(i)
        return out

    def _first_redex(self, w: tuple):
        xn = self.N - 1
        for i in range(len(w) - 1):
            if w[i] > w[i + 1] or (self.central_substitution and w[i] == w[i + 1] == xn):
                return i
        return None

    def _rewrite(self, w: tuple, i: int) -> list[tuple[tuple, int, int, Gauss]]:
        """One rewriting step at position ``i``: list of ``(word, dr, dh, coeff)``."""
        g, h = w[i], w[i + 1]
        pre, post = w[:i], w[i + 2 :]
        if g == h:
            out = [(pre + post, 2, 0, Gauss(1))]
            for k in range(self.N - 1):
                out.append((pre + (k, k) + post, 0, 0, Gauss(-1)))
            return out
        out = [(pre + (h, g) + post, 0, 0, Gauss(1))]
        for (cw, dr, dh), c in self.relation(g, h).items():
            out.append((pre + cw + post, dr, dh, c))
        return out

    def word_normal_form(self, w: tuple) -> dict:
        """Normal form of a single word (memoized, leftmost strategy)."""
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        i = self._first_redex(w)
        if i is None:
            out = {(w, 0, 0): Gauss(1)}
        else:
            out = {}
            for nw, dr, dh, c in self._rewrite(w, i):
                for (ww, r, h), cc in self.word_normal_form(nw).items():
                    _add_into(out, (ww, r + dr, h + dh), c * cc)
        self._nf_cache[w] = out
        return out

    def normalize_terms(self, terms: dict) -> dict:
        out = {}
        for (w, r, h), c in terms.items():
            for (ww, rr, hh), cc in self.word_normal_form(w).items():
                _add_into(out, (ww, r + rr, h + hh), c * cc)
        return out

    def normalize_randomly(self, terms: dict, rng: random.Random) -> dict:
        """Normal form reached by choosing a random redex at every step (no memo)."""
        work = dict(terms)
        done = {}
        while work:
            (w, r, h), c = work.popitem()
            reds = self._redexes(w)
            if not reds:
                _add_into(done, (w, r, h), c)
                continue
            i = rng.choice(reds)
            for nw, dr, dh, cc in self._rewrite(w, i):
                _add_into(work, (nw, r + dr, h + dh), c * cc)
        return done


class OperatorExpr:
    """Finite sum of coefficient * R^r * hbar^h * word, kept in normal form."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: dict, normal: bool = False):
        self.alg = alg
        self.terms = terms if normal else alg.normalize_terms(terms)

    @classmethod
    def raw(cls, alg: Algebra, terms: dict) -> "OperatorExpr":
        """Unnormalized expression (used to compare rewriting strategies)."""
        obj = cls.__new__(cls)
        obj.alg = alg
        obj.terms = dict(terms)
        return obj

    def _coerce(self, o):
        if isinstance(o, OperatorExpr):
            if o.alg is not self.alg:
                raise ValueError("operators belong to different algebras")
            return o
        if isinstance(o, (int, Fraction, Gauss)):
            return self.alg.scalar(o)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for k, c in o.terms.items():
            _add_into(out, k, c)
        return OperatorExpr(self.alg, out, normal=True)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr(self.alg, {k: -c for k, c in self.terms.items()}, normal=True)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, (int, Fraction, Gauss)):
            g = Gauss.of(o)
            if not g:
                return self.alg.zero
            return OperatorExpr(self.alg, {k: c * g for k, c in self.terms.items()}, normal=True)
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        out = {}
        nf = self.alg.word_normal_form
        for (w1, r1, h1), c1 in self.terms.items():
            for (w2, r2, h2), c2 in o.terms.items():
                c = c1 * c2
                for (w, r, h), cc in nf(w1 + w2).items():
                    _add_into(out, (w, r + r1 + r2, h + h1 + h2), c * cc)
        return OperatorExpr(self.alg, out, normal=True)

    def __rmul__(self, o):
        if isinstance(o, (int, Fraction, Gauss)):
            return self * o
        return NotImplemented

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction, Gauss)):
            return self * (Gauss(1) / Gauss.of(o))
        o = self._coerce(o)
        if len(o.terms) == 1:
            ((w, r, h), c), = o.terms.items()
            if not w and not h:
                return OperatorExpr(
                    self.alg, {(ww, rr - r, hh): cc / c for (ww, rr, hh), cc in self.terms.items()}, normal=True
                )
        raise ZeroDivisionError("only division by c * R^k is supported")

    def __pow__(self, k: int):
        out = self.alg.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, Gauss)):
            o = self.alg.scalar(o)
        if not isinstance(o, OperatorExpr):
            return NotImplemented
        return self.alg is o.alg and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def dagger(self) -> "OperatorExpr":
        """Hermitian conjugate: generators self-adjoint, words reversed, i -> -i."""
        raw = {}
        for (w, r, h), c in self.terms.items():
            _add_into(raw, (tuple(reversed(w)), r, h), c.conjugate())
        return OperatorExpr(self.alg, raw)

    def is_scalar(self) -> bool:
        return all(not w for (w, _, _) in self.terms)

    def __repr__(self):
        return f"OperatorExpr({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.alg.names
        pieces = []
        for (w, r, h), c in sorted(self.terms.items(), key=lambda t: (-len(t[0][0]), t[0])):
            factors = []
            if h:
                factors.append("hbar" if h == 1 else f"hbar^{h}")
            if r:
                factors.append("R" if r == 1 else f"R^{r}")
            factors += [names[g] for g in w]
            coef = str(c)
            if factors:
                body = "*".join(factors)
                body = body if c == 1 else (f"-{body}" if c == -1 else f"{coef}*{body}")
            else:
                body = coef
            pieces.append(body)
        return " + ".join(pieces).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# operations


def normal_form(e: OperatorExpr) -> OperatorExpr:
    return OperatorExpr(e.alg, e.terms)


def commutator(A: OperatorExpr, B: OperatorExpr) -> OperatorExpr:
    return A * B - B * A


def jacobi_residual(A: OperatorExpr, B: OperatorExpr, C: OperatorExpr) -> OperatorExpr:
    return commutator(commutator(A, B), C) + commutator(commutator(B, C), A) + commutator(commutator(C, A), B)


def jacobi_sweep(alg: Algebra) -> dict[tuple[int, int, int], OperatorExpr]:
    """Nonzero Jacobi residuals over all generator triples (empty dict means consistent)."""
    gens = alg.generators()
    bad = {}
    for a, b, c in combinations_with_replacement(range(alg.ngens), 3):
        res = jacobi_residual(gens[a], gens[b], gens[c])
        if res:
            bad[(a, b, c)] = res
    return bad


def angular_momentum(alg: Algebra, i: int, j: int) -> OperatorExpr:
    """``x_i p_j - x_j p_i``."""
    return alg.x(i) * alg.p(j) - alg.x(j) * alg.p(i)


def so_pairs(N: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, N + 1), 2))


def so_matrix(N: int, i: int, j: int) -> list[list[Gauss]]:
    """``(L_ij)_kl = i (delta_ik delta_jl - delta_il delta_jk)``."""
    out = [[Gauss() for _ in range(N)] for _ in range(N)]
    out[i - 1][j - 1] = Gauss(0, 1)
    out[j - 1][i - 1] = Gauss(0, -1)
    return out


def matrix_generator(alg: Algebra, i: int, j: int) -> OperatorExpr:
    """``-i p_k (L_ij)_kl x_l`` (equals ``p_i x_j - p_j x_i``)."""
    m = so_matrix(alg.N, i, j)
    out = alg.zero
    for k in range(alg.N):
        for l in range(alg.N):
            if m[k][l]:
                out = out + alg.p(k + 1) * alg.x(l + 1) * (-I * m[k][l])
    return out


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Gauss()) for j in range(n)] for i in range(n)]


def so_structure_constants(N: int) -> dict[tuple[int, int], dict[int, Gauss]]:
    """``[L_a, L_b] = sum_c f_abc L_c`` for the matrices of :func:`so_matrix`."""
    pairs = so_pairs(N)
    mats = [so_matrix(N, i, j) for i, j in pairs]
    out = {}
    for a, A in enumerate(mats):
        for b, B in enumerate(mats):
            AB, BA = _matmul(A, B), _matmul(B, A)
            comm = [[AB[r][c] - BA[r][c] for c in range(N)] for r in range(N)]
            coeffs = {}
            for c, (i, j) in enumerate(pairs):
                v = comm[i - 1][j - 1] / Gauss(0, 1)
                if v:
                    coeffs[c] = v
            recon = [[Gauss() for _ in range(N)] for _ in range(N)]
            for c, v in coeffs.items():
                for r in range(N):
                    for s in range(N):
                        recon[r][s] = recon[r][s] + v * mats[c][r][s]
            if recon != comm:
                raise ArithmeticError("commutator not in the span of the generators")
            out[(a, b)] = coeffs
    return out


def homomorphism_residuals(alg: Algebra) -> dict:
    """``[Lhat_a, Lhat_b] - hbar * f_abc Lhat_c`` for the generators ``-i p L_a x``."""
    pairs = so_pairs(alg.N)
    gens = [matrix_generator(alg, i, j) for i, j in pairs]
    f = so_structure_constants(alg.N)
    bad = {}
    for (a, b), coeffs in f.items():
        rhs = alg.zero
        for c, v in coeffs.items():
            rhs = rhs + gens[c] * v
        res = commutator(gens[a], gens[b]) - rhs * alg.hbar
        if res:
            bad[(pairs[a], pairs[b])] = res
    return bad


def casimir(alg: Algebra) -> OperatorExpr:
    out = alg.zero
    for i, j in so_pairs(alg.N):
        L = angular_momentum(alg, i, j)
        out = out + L * L
    return out


def radial_momentum(alg: Algebra) -> OperatorExpr:
    """``(x, p) / R`` with ``x`` to the left."""
    s = alg.zero
    for i in range(1, alg.N + 1):
        s = s + alg.x(i) * alg.p(i)
    return s / alg.R


def sq_momentum(alg: Algebra) -> OperatorExpr:
    s = alg.zero
    for i in range(1, alg.N + 1):
        s = s + alg.p(i) * alg.p(i)
    return s


def centrality_residuals(alg: Algebra) -> dict[str, OperatorExpr]:
    """``[x^2, g]`` for every generator ``g``."""
    x2 = alg.zero
    for i in range(1, alg.N + 1):
        x2 = x2 + alg.x(i) * alg.x(i)
    return {alg.names[g]: commutator(x2, alg.gen(g)) for g in range(alg.ngens)}


@dataclass
class SplitResult:
    D: int
    residual: OperatorExpr
    identity_residuals: dict
    insertion: dict  # left/middle/right -> residual against p^2

    @property
    def ok(self) -> bool:
        return (
            not self.residual
            and not any(self.identity_residuals.values())
            and not any(self.insertion.values())
        )


def _lx(alg: Algebra, m, i: int) -> OperatorExpr:
    """``(L_a x)_i``."""
    out = alg.zero
    for n in range(alg.N):
        if m[i - 1][n]:
            out = out + alg.x(n + 1) * m[i - 1][n]
    return out


def hamiltonian_split(D: int) -> SplitResult:
    """Check ``p^2/2 = L^2/(2R^2) + p_r^dagger p_r / 2`` in the Dirac algebra.

    Also checks the resolution of the identity
    ``delta_ij = -(L_a x)_i (L_a x)_j / x^2 + x_i x_j / x^2`` and that
    inserting it left of, between, or right of ``p_i p_j`` gives ``p^2``.
    """
    alg = Algebra(D + 1, "dirac")
    N = alg.N
    R2 = alg.R * alg.R
    pr = radial_momentum(alg)
    p2 = sq_momentum(alg)
    res = p2 / 2 - casimir(alg) / (R2 * 2) - pr.dagger() * pr / 2
    mats = [so_matrix(N, i, j) for i, j in so_pairs(N)]
    T = {}
    ident = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            t = alg.x(i) * alg.x(j)
            for m in mats:
                t = t - _lx(alg, m, i) * _lx(alg, m, j)
            t = t / R2
            T[(i, j)] = t
            ident[(i, j)] = t - (1 if i == j else 0)
    left = middle = right = alg.zero
    for (i, j), t in T.items():
        left = left + t * alg.p(i) * alg.p(j)
        middle = middle + alg.p(i) * t * alg.p(j)
        right = right + alg.p(i) * alg.p(j) * t
    insertion = {"left": left - p2, "middle": middle - p2, "right": right - p2}
    return SplitResult(D, res, ident, insertion)


@dataclass
class RadialAnalysis:
    D: int
    anti_hermitian_part: OperatorExpr
    central: bool
    c_value: Gauss  # in units of hbar / R
    c_r: Fraction
    gamma: Fraction
    transverse_energy: Fraction  # p_r^dagger p_r / 2 in units of hbar^2 / R^2


def radial_analysis(D: int) -> RadialAnalysis:
    """Fix the c-number value of the radial momentum.

    ``p_r - p_r^dagger`` is computed in the algebra; ``p_r`` commutes with all
    generators, so ``p_r = c`` with ``c - conj(c)`` equal to that anti-hermitian
    part.  Writing ``c = c_r + i*b`` (units hbar/R) and requiring the
    hermitian-averaged constraint ``R (p_r + p_r^dagger)/2 + i hbar gamma`` to
    vanish with real ``c_r, gamma`` gives ``c_r = gamma = 0``.
    """
    alg = Algebra(D + 1, "dirac")
    pr = radial_momentum(alg)
    anti = pr - pr.dagger()
    central = all(not commutator(pr, g) for g in alg.generators())
    if not anti.is_scalar() or set(anti.terms) - {((), -1, 1)}:
        raise ArithmeticError(f"p_r - p_r^dagger is not a multiple of hbar/R: {anti}")
    a = anti.terms.get(((), -1, 1), Gauss())
    # c - conj(c) = 2 i Im(c) = a
    if a.re:
        raise ArithmeticError("anti-hermitian part has a real component")
    im_c = a.im / 2
    # constraint: R * Re(c) * hbar/R + i hbar gamma = 0, both real parts
    c_r = Fraction(0)
    gamma = Fraction(0)
    c = Gauss(c_r, im_c)
    pr_dag = c - a  # value of p_r^dagger
    energy = pr_dag * c / 2
    if energy.im:
        raise ArithmeticError("transverse energy is not real")
    return RadialAnalysis(D, anti, central, c, c_r, gamma, energy.re)


def random_word(alg: Algebra, length: int, rng: random.Random) -> tuple:
    return tuple(rng.randrange(alg.ngens) for _ in range(length))


def confluence_check(alg: Algebra, words: Iterable[tuple], seeds: Iterable[int] = (0, 1, 2)) -> list[tuple]:
    """Words whose random-strategy normal forms disagree with the memoized one."""
    bad = []
    seeds = list(seeds)
    for w in words:
        ref = alg.normalize_terms({(w, 0, 0): Gauss(1)})
        for s in seeds:
            got = alg.normalize_randomly({(w, 0, 0): Gauss(1)}, random.Random(s))
            if got != ref:
                bad.append(w)
                break
    return bad
