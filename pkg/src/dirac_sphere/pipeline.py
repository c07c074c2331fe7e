"""End-to-end reproduction checks for the particle on ``S^D``.

Each stage appends :class:`~dirac_sphere.report.Check` rows to a report.
The stages are ordered so that later ones reuse what earlier ones build:
constraints, Dirac brackets, equations of motion, the quantum algebra,
operator identities, spectra, and finally the abelian conversion.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import brackets as br
from . import convert as cv
from . import spectra as sp
from . import weyl
from .expr import PhaseSpace, PhaseVar, qp_part, random_expr
from .report import Check, Report, rat


@dataclass(frozen=True)
class Settings:
    D: int = 2
    M: int = 1
    R: Fraction = Fraction(1)
    lmax: int = 4
    kmax: int = 4
    degree_bound: int | None = None
    coeff_degree: int = 4
    property_samples: int = 12
    seed: int = 0


def expected_dirac(ctx: PhaseSpace, kind: str, i: int, j: int):
    """Closed forms of the sphere's Dirac brackets between coordinates and momenta."""
    X = ctx.sq_x
    if kind == "xx":
        return ctx.zero
    if kind == "xp":
        return (ctx.one if i == j else ctx.zero) - ctx.x(i) * ctx.x(j) / X
    return (ctx.p(i) * ctx.x(j) - ctx.p(j) * ctx.x(i)) / X


def constraint_stage(rep: Report, ctx: PhaseSpace, s: Settings) -> br.ConstraintSet:
    H = ctx.sq_p / 2
    phi1 = ctx.sq_x - ctx.R**2
    found = br.secondary_constraints(H, [phi1], ctx, degree_bound=s.degree_bound)
    got = [str(c) for c in found.constraints]
    want = [str(phi1), str(ctx.dot_xp)]
    rep.check(Check.equal("constraints.secondary", "secondary-constraint", got, want))
    cs = br.sphere_constraints(ctx)
    rep.check(Check.of("constraints.delta_det", "constraint-matrix", cs.det - 4 * ctx.sq_x**2))
    rep.check(Check.equal("constraints.classification", "constraint-matrix", cs.classification, br.SECOND_CLASS))
    return cs


def dirac_stage(rep: Report, ctx: PhaseSpace, cs: br.ConstraintSet, s: Settings):
    N = ctx.N
    for kind, (a, b) in {"xx": ("x", "x"), "xp": ("x", "p"), "pp": ("p", "p")}.items():
        bad = []
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                r = br.dirac(ctx.var(a, i), ctx.var(b, j), cs) - expected_dirac(ctx, kind, i, j)
                if r:
                    bad.append(f"({a}{i},{b}{j}): {r}")
        rep.check(Check.of(f"dirac.{kind}", f"dirac-bracket-{kind}", "; ".join(bad)))

    rng = random.Random(s.seed)
    triples = [tuple(random_expr(ctx, rng, degree=2, terms=2) for _ in range(3)) for _ in range(s.property_samples)]
    anti = jac = leib = ann = None
    for A, B, C in triples:
        d = lambda u, v: br.dirac(u, v, cs)  # noqa: E731
        anti = anti or d(A, B) + d(B, A) or None
        jac = jac or d(A, d(B, C)) + d(B, d(C, A)) + d(C, d(A, B)) or None
        leib = leib or d(A, B * C) - d(A, B) * C - B * d(A, C) or None
        for phi in cs:
            ann = ann or d(A, phi) or None
    rep.check(Check.of("dirac.antisymmetry", "dirac-bracket-properties", anti))
    rep.check(Check.of("dirac.jacobi", "dirac-bracket-properties", jac))
    rep.check(Check.of("dirac.leibniz", "dirac-bracket-properties", leib))
    rep.check(Check.of("dirac.annihilates_constraints", "dirac-annihilates-constraints", ann))


def eom_stage(rep: Report, ctx: PhaseSpace, cs: br.ConstraintSet, s: Settings):
    H = ctx.sq_p / 2
    bad = []
    for kind in ("x", "p"):
        for i in range(1, ctx.N + 1):
            r = br.eom_residual(H, cs, PhaseVar(kind, i), total=True, degree_bound=s.degree_bound)
            if not r.on_shell:
                bad.append(f"{kind}{i}: {r.residual}")
    rep.check(Check.of("eom.total_hamiltonian", "equations-of-motion-on-shell", "; ".join(bad)))
    bare = [f"x{i}" for i in range(1, ctx.N + 1)
            if not br.eom_residual(H, cs, PhaseVar("x", i), degree_bound=s.degree_bound).on_shell]
    rep.check(Check.of("eom.coordinates_bare_hamiltonian", "equations-of-motion-on-shell", ", ".join(bare)))


def quantum_stage(rep: Report, D: int, kind: str = "dirac", seed: int = 0):
    alg = weyl.Algebra(D + 1, kind)
    jac = {k: v for k, v in weyl.jacobi_sweep(alg).items() if v}
    rep.check(Check.of("quantum.jacobi", "operator-algebra-jacobi", _fmt(jac)))
    cen = {k: v for k, v in weyl.centrality_residuals(alg).items() if v}
    rep.check(Check.of("quantum.sq_x_central", "operator-algebra-central", _fmt(cen)))
    rep.check(Check.of("quantum.so_homomorphism", "rotation-generators", _fmt(weyl.homomorphism_residuals(alg))))
    rng = random.Random(seed)
    words = [weyl.random_word(alg, 4, rng) for _ in range(20)]
    rep.check(Check.of("quantum.confluence", "operator-algebra-normal-form", weyl.confluence_check(alg, words)))


def operator_stage(rep: Report, D: int):
    split = weyl.hamiltonian_split(D)
    rep.check(Check.of("operators.identity_resolution", "identity-resolution", _fmt({k: v for k, v in split.identity_residuals.items() if v})))
    rep.check(Check.of("operators.insertion_independence", "identity-insertion", _fmt({k: v for k, v in split.insertion.items() if v})))
    rep.check(Check.of("operators.hamiltonian_split", "hamiltonian-split", split.residual))
    rad = weyl.radial_analysis(D)
    want = rad.anti_hermitian_part.alg.scalar(weyl.I * D, r=-1, h=1)
    rep.check(Check.of("operators.radial_anti_hermitian", "radial-momentum", rad.anti_hermitian_part - want))
    rep.check(Check.equal("operators.radial_central", "radial-momentum", rad.central, True))
    rep.check(Check.equal("operators.transverse_energy", "transverse-energy", rad.transverse_energy, Fraction(D * D, 8)))
    return rad


def spectrum_stage(rep: Report, D: int, R: Fraction, lmax: int):
    bad = []
    for l in range(lmax + 1):
        try:
            res = sp.casimir_check(D, l)
        except sp.CasimirError as err:
            bad.append(f"l={l}: {err}")
            continue
        if res.eigenvalue != l * (l + D - 1):
            bad.append(f"l={l}: eigenvalue {res.eigenvalue}")
        if res.dimension != sp.degeneracy_formula(D, l):
            bad.append(f"l={l}: dimension {res.dimension}")
    rep.check(Check.of("spectra.casimir", "casimir-eigenvalues", "; ".join(bad)))
    g = sp.gauge_spectrum(D, R, lmax)
    d = sp.dirac_spectrum(D, R, lmax)
    rep.check(Check.of("spectra.gauge", "gauge-spectrum",
                       "; ".join(f"l={r.l}" for r in g.rows if r.energy * 2 * R * R != r.l * (r.l + D - 1))))
    shift = Fraction(D * D) / (8 * R * R)
    rep.check(Check.of("spectra.dirac_shift", "dirac-spectrum-shift",
                       "; ".join(f"l={a.l}" for a, b in zip(g.rows, d.rows) if b.energy - a.energy != shift)))
    return g, d


def curvature_stage(rep: Report, R: Fraction):
    """The curvature-type shift ``alpha D(D-1)`` never reproduces ``D^2/8``."""
    for alpha in sp.ALPHAS:
        differ = [D for D in range(1, 5) if sp.curvature_shift(D, R, alpha) != sp.transverse_constant(D, R)]
        t, c = sp.shift_polynomials(alpha)
        problems = []
        if t == c:
            problems.append("equal as polynomials in D")
        if not differ:
            problems.append("equal at every D in 1..4")
        if sp.curvature_shift(1, R, alpha) != 0 or sp.transverse_constant(1, R) == 0:
            problems.append("circle: expected 0 against a nonzero constant")
        msg = "; ".join(problems)
        rep.check(Check.of(f"spectra.curvature_shift_differs[alpha={rat(alpha)}]", "curvature-shift-comparison", msg))


def conversion_stage(rep: Report, ctx: PhaseSpace, cs: br.ConstraintSet, s: Settings):
    series = cv.abelianize(cs, k_max=2, coeff_degree=s.coeff_degree)
    want = cv.sphere_sigmas(ctx)
    for a in range(2):
        rep.check(Check.of(f"conversion.sigma{a + 1}", "abelian-constraints", series.sigma(a) - want[a]))
    rep.check(Check.equal("conversion.terminates", "abelian-constraints", series.exact, True))
    rep.check(Check.of("conversion.abelian", "abelian-constraints", br.poisson(*want)))

    ext = cv.extend_hamiltonian(ctx.sq_p / 2, series, k_max=s.kmax, coeff_degree=s.coeff_degree)
    closed = cv.sphere_hamiltonian(ctx)
    parts = cv.expand_qp(closed, s.kmax)
    bad = [f"order {k}: {ext.terms[k] - parts[k]}" for k in range(s.kmax + 1) if ext.terms[k] != parts[k]]
    rep.check(Check.of("conversion.hamiltonian_series", "extended-hamiltonian", "; ".join(bad)))
    rep.check(Check.of("conversion.hamiltonian_first_class",
                       "extended-hamiltonian", _fmt({f"sigma{a + 1}": br.poisson(closed, w) for a, w in enumerate(want) if br.poisson(closed, w)})))
    rep.check(Check.of("conversion.on_shell_reduction", "extended-hamiltonian",
                       cv.on_shell_reduction(closed) - ctx.sq_L / (2 * ctx.R**2)))

    s1, s2 = want
    flows = [
        ("gauge.Q1_shift", ctx.Q(1), s1, "terminating", [ctx.Q(1), ctx.one]),
        ("gauge.x1_rescaling", ctx.x(1), s2, "exponential", None),
        ("gauge.sphere_invariant", ctx.sq_x - ctx.R**2, s1, "terminating", [ctx.sq_x - ctx.R**2]),
        ("gauge.hamiltonian_invariant", closed, s2, "terminating", [closed]),
    ]
    for name, e, gen, kind, terms in flows:
        f = cv.gauge_transform(e, gen)
        if f.kind != kind:
            rep.check(Check(name, "gauge-transformations", "fail", f"flow is {f.kind}"))
        elif terms is not None:
            rep.check(Check.equal(name, "gauge-transformations", [str(t) for t in f.terms], [str(t) for t in terms]))
        else:
            rep.check(Check.equal(name, "gauge-transformations", f.rate, Fraction(1)))
    return series, ext


def truncation_residual(ext: cv.ExtendedHamiltonian, series: cv.ConversionSeries) -> dict:
    """Graded pieces of ``{Hbar, sigma_a}`` below the truncation order."""
    total = ext.value
    out = {}
    for a, sig in enumerate(series.sigmas):
        b = br.poisson(total, sig)
        for k in range(ext.k_max):
            piece = qp_part(b, k)
            if piece:
                out[f"sigma{a + 1}@{k}"] = piece
    return out


def _fmt(d) -> str:
    if not d:
        return ""
    if isinstance(d, dict):
        return "; ".join(f"{k}: {v}" for k, v in d.items())
    return "; ".join(str(x) for x in d)


def run_all(rep: Report, s: Settings) -> Report:
    ctx = PhaseSpace(s.D, max(s.M, 1))
    cs = constraint_stage(rep, ctx, s)
    dirac_stage(rep, ctx, cs, s)
    eom_stage(rep, ctx, cs, s)
    quantum_stage(rep, s.D, seed=s.seed)
    operator_stage(rep, s.D)
    g, d = spectrum_stage(rep, s.D, s.R, s.lmax)
    curvature_stage(rep, s.R)
    conversion_stage(rep, ctx, cs, s)
    rep.add("constraints", [str(c) for c in cs])
    rep.add("sigmas", [str(e) for e in cv.sphere_sigmas(ctx)])
    rep.add("extended_hamiltonian", str(cv.sphere_hamiltonian(ctx)))
    rep.add("gauge_spectrum", spectrum_rows(g))
    rep.add("dirac_spectrum", spectrum_rows(d))
    return rep


def spectrum_rows(t: sp.SpectrumTable) -> list[dict]:
    return [{"l": r.l, "energy": rat(r.energy), "energy_expr": _energy(r.energy), "degeneracy": r.degeneracy} for r in t.rows]


def _energy(c: Fraction) -> str:
    if c == 0:
        return "0"
    if c == 1:
        return "hbar^2"
    return f"{rat(c)}*hbar^2"


__all__ = [
    "Settings",
    "conversion_stage",
    "constraint_stage",
    "curvature_stage",
    "dirac_stage",
    "eom_stage",
    "expected_dirac",
    "operator_stage",
    "quantum_stage",
    "run_all",
    "spectrum_rows",
    "spectrum_stage",
    "truncation_residual",
]
