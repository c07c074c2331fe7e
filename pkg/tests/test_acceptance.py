"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line (printed in the pytest terminal
summary, or directly when this file is run as a script) and then asserts.
All checks are exact; the only tolerances are the wall-clock limits below.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction

from dirac_sphere import brackets as br
from dirac_sphere import convert as cv
from dirac_sphere import spectra as sp
from dirac_sphere import weyl
from dirac_sphere.expr import PhaseSpace, PhaseVar, random_expr
from dirac_sphere.pipeline import expected_dirac

LIMITS = {  # seconds
    "dirac_brackets_per_D": 1.0,
    "dirac_properties": 60.0,
    "conversion": 10.0,
    "quantum_jacobi": 60.0,
    "operator_identities": 30.0,
    "spectra": 60.0,
    "eom": 30.0,
    "end_to_end": 180.0,
}

RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str) -> bool:
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})")
    return ok


def test_1_dirac_brackets():
    bad, times = [], {}
    for D in (1, 2, 3, 4):
        t0 = time.perf_counter()
        ctx = PhaseSpace(D, 0)
        cs = br.sphere_constraints(ctx)
        for kind, (a, b) in {"xx": ("x", "x"), "xp": ("x", "p"), "pp": ("p", "p")}.items():
            for i in range(1, ctx.N + 1):
                for j in range(1, ctx.N + 1):
                    if br.dirac(ctx.var(a, i), ctx.var(b, j), cs) != expected_dirac(ctx, kind, i, j):
                        bad.append(f"D={D} {a}{i},{b}{j}")
        times[D] = time.perf_counter() - t0
    slow = [D for D, t in times.items() if t >= LIMITS["dirac_brackets_per_D"]]
    ok = record(1, "Dirac brackets D=1..4", not bad and not slow,
                f"mismatches={len(bad)}, max time {max(times.values()):.2f}s")
    assert ok, (bad, times)


def test_2_dirac_bracket_properties():
    t0 = time.perf_counter()
    ctx = PhaseSpace(2, 0)
    cs = br.sphere_constraints(ctx)
    rng = random.Random(20240)
    triples = [tuple(random_expr(ctx, rng, degree=3, terms=3) for _ in range(3)) for _ in range(70)]

    def d(u, v):
        return br.dirac(u, v, cs)

    failures = {"antisymmetry": 0, "leibniz": 0, "jacobi": 0, "annihilation": 0}
    for A, B, C in triples:
        failures["antisymmetry"] += bool(d(A, B) + d(B, A))
        failures["leibniz"] += bool(d(A, B * C) - d(A, B) * C - B * d(A, C))
        failures["jacobi"] += bool(d(A, d(B, C)) + d(B, d(C, A)) + d(C, d(A, B)))
        failures["annihilation"] += sum(bool(d(E, phi)) for E in (A, B, C) for phi in cs)
    elapsed = time.perf_counter() - t0
    n_expr = 3 * len(triples)
    ok = record(2, "Dirac bracket properties D=2", not any(failures.values()) and n_expr >= 200
                and elapsed < LIMITS["dirac_properties"], f"{n_expr} expressions, {elapsed:.1f}s")
    assert ok, failures


def test_3_conversion():
    t0 = time.perf_counter()
    ctx = PhaseSpace(2, 1)
    cs = br.sphere_constraints(ctx)
    series = cv.abelianize(cs, k_max=2)
    s1, s2 = ctx.sq_x - ctx.R**2 + ctx.P(1), ctx.dot_xp + 2 * ctx.sq_x * ctx.Q(1)
    checks = {
        "sigmas": series.sigmas == (s1, s2),
        "terminates": series.exact,
        "abelian": not br.poisson(s1, s2),
    }
    ext = cv.extend_hamiltonian(ctx.sq_p / 2, series, k_max=4)
    closed = cv.sphere_hamiltonian(ctx)
    parts = cv.expand_qp(closed, 4)
    checks["series_order_4"] = all(ext.terms[k] == parts[k] for k in range(5))
    checks["closed_form_first_class"] = not br.poisson(closed, s1) and not br.poisson(closed, s2)
    elapsed = time.perf_counter() - t0
    ok = record(3, "abelian conversion and extended Hamiltonian", all(checks.values())
                and elapsed < LIMITS["conversion"], f"{elapsed:.1f}s")
    assert ok, checks


def test_4_quantum_jacobi():
    t0 = time.perf_counter()
    nonzero = {N: sum(bool(v) for v in weyl.jacobi_sweep(weyl.Algebra(N, "dirac")).values()) for N in (3, 4)}
    central = all(not v for N in (3, 4) for v in weyl.centrality_residuals(weyl.Algebra(N, "dirac")).values())
    elapsed = time.perf_counter() - t0
    ok = record(4, "operator algebra Jacobi N=3,4", not any(nonzero.values()) and central
                and elapsed < LIMITS["quantum_jacobi"], f"{elapsed:.2f}s")
    assert ok, nonzero


def test_5_operator_identities():
    t0 = time.perf_counter()
    checks = {}
    for D in (2, 3):
        split = weyl.hamiltonian_split(D)
        checks[f"split D={D}"] = not split.residual
        checks[f"identity D={D}"] = not any(split.identity_residuals.values())
        checks[f"insertion D={D}"] = not any(split.insertion.values())
        rad = weyl.radial_analysis(D)
        want = rad.anti_hermitian_part.alg.scalar(weyl.I * D, r=-1, h=1)
        checks[f"anti-hermitian D={D}"] = rad.anti_hermitian_part == want
        checks[f"energy D={D}"] = rad.transverse_energy == Fraction(D * D, 8)
    elapsed = time.perf_counter() - t0
    ok = record(5, "operator identities and radial momentum", all(checks.values())
                and elapsed < LIMITS["operator_identities"], f"{elapsed:.2f}s")
    assert ok, checks


def test_6_spectra():
    t0 = time.perf_counter()
    checks = {}
    R = Fraction(1)
    for D in range(1, 5):
        for l in range(5):
            res = sp.casimir_check(D, l)
            checks[f"casimir D={D} l={l}"] = res.uniform and res.eigenvalue == l * (l + D - 1)
        g, d = sp.gauge_spectrum(D, R, 4), sp.dirac_spectrum(D, R, 4)
        checks[f"gauge D={D}"] = all(r.energy == Fraction(r.l * (r.l + D - 1), 2) for r in g.rows)
        checks[f"shift D={D}"] = all(b.energy - a.energy == Fraction(D * D, 8) for a, b in zip(g.rows, d.rows))
    for a in sp.ALPHAS:
        values = [(sp.curvature_shift(D, R, a), sp.transverse_constant(D, R)) for D in range(1, 5)]
        checks[f"alpha={a}"] = any(c != t for c, t in values) and values[0] == (0, Fraction(1, 8))
    elapsed = time.perf_counter() - t0
    ok = record(6, "spectra and Casimir eigenvalues", all(checks.values())
                and elapsed < LIMITS["spectra"], f"{elapsed:.2f}s")
    assert ok, {k: v for k, v in checks.items() if not v}


def test_7_equations_of_motion():
    """Residuals against the Hamiltonian completed by its fixed multipliers.

    With the bare ``p^2/2`` the momentum residuals are not in the ideal
    (tested separately in test_brackets); the coordinate residuals are.
    """
    t0 = time.perf_counter()
    ctx = PhaseSpace(2, 0)
    cs = br.sphere_constraints(ctx)
    H = ctx.sq_p / 2
    members = {}
    for kind in ("x", "p"):
        for i in range(1, ctx.N + 1):
            r = br.eom_residual(H, cs, PhaseVar(kind, i), total=True)
            w = r.ideal.witness
            members[f"{kind}{i}"] = r.on_shell and w[0] * cs[0] + w[1] * cs[1] == r.residual
    bare_x = all(br.eom_residual(H, cs, PhaseVar("x", i)).on_shell for i in range(1, ctx.N + 1))
    elapsed = time.perf_counter() - t0
    ok = record(7, "equations of motion on the constraint surface", all(members.values()) and bare_x
                and elapsed < LIMITS["eom"], f"total Hamiltonian, {elapsed:.2f}s")
    assert ok, members


def _repro(D: int) -> tuple[int, bytes]:
    proc = subprocess.run(
        [sys.executable, "-m", "dirac_sphere.cli", "paper-repro", "--D", str(D), "--format", "json"],
        capture_output=True,
        timeout=LIMITS["end_to_end"],
    )
    return proc.returncode, proc.stdout


def test_8_end_to_end():
    import json

    t0 = time.perf_counter()
    checks = {}
    for D in (2, 3):
        code1, out1 = _repro(D)
        code2, out2 = _repro(D)
        data = json.loads(out1)
        checks[f"D={D} exit"] = code1 == code2 == 0
        checks[f"D={D} all pass"] = bool(data["checks"]) and all(c["status"] == "pass" for c in data["checks"])
        checks[f"D={D} byte-stable"] = out1 == out2
    elapsed = time.perf_counter() - t0
    ok = record(8, "end-to-end reproduction D=2,3", all(checks.values())
                and elapsed < LIMITS["end_to_end"], f"{elapsed:.1f}s for four runs")
    assert ok, checks


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    print("\n".join(RESULTS))
    sys.exit(1 if failed else 0)
