"""Command-line front end.

Exit status: 0 on success, 1 on a usage or parse error, 2 when a module
raises or a reported check fails.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from . import brackets as br
from . import convert as cv
from . import pipeline
from . import spectra as sp
from .expr import PhaseSpace, qp_part
from .parse import ParseError, parse_expr
from .report import Check, Report, rat

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SessionConfig:
    D: int = 2
    M: int = 1
    R: Fraction = Fraction(1)
    lmax: int = 4
    kmax: int = 4
    degree_bound: int | None = None  # None: ideal_reduce picks deg(e)+2
    coeff_degree: int = 4
    format: str = "text"
    out: str | None = None

    def validate(self) -> "SessionConfig":
        if self.D < 1:
            raise UsageError("D must be >= 1")
        if self.M < 0:
            raise UsageError("M must be >= 0")
        if self.R <= 0:
            raise UsageError("R must be positive")
        for name in ("lmax", "kmax", "coeff_degree"):
            if getattr(self, name) < 0:
                raise UsageError(f"{name} must be >= 0")
        if self.degree_bound is not None and self.degree_bound < 0:
            raise UsageError("degree-bound must be >= 0")
        if self.format not in ("text", "json"):
            raise UsageError("format must be text or json")
        return self

    def echo(self) -> dict:
        """The configuration as it appears in reports (output destination excluded)."""
        return {
            "D": self.D,
            "M": self.M,
            "R": rat(self.R),
            "lmax": self.lmax,
            "kmax": self.kmax,
            "degree_bound": "auto" if self.degree_bound is None else self.degree_bound,
            "coeff_degree": self.coeff_degree,
        }

    def context(self) -> PhaseSpace:
        return PhaseSpace(self.D, self.M)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None


def _optional_int(text: str) -> int | None:
    return None if text.strip() == "auto" else _int(text)


_CONVERTERS = {
    "D": _int,
    "M": _int,
    "R": _rational,
    "lmax": _int,
    "kmax": _int,
    "degree_bound": _optional_int,
    "coeff_degree": _int,
    "format": str.strip,
    "out": str.strip,
}


def read_config(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment; dashes in keys are accepted."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from None
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _CONVERTERS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _CONVERTERS[key](value)
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("session")
    g.add_argument("--D", type=int, help="sphere dimension (N = D+1 coordinates)")
    g.add_argument("--M", type=int, help="number of auxiliary (Q,P) pairs (default 1)")
    g.add_argument("--R", type=_rational, help="radius as a rational num/den (default 1)")
    g.add_argument("--lmax", type=int, help="highest angular level l (default 4)")
    g.add_argument("--kmax", type=int, help="truncation order of (Q,P) series (default 4)")
    g.add_argument("--degree-bound", type=_optional_int, dest="degree_bound",
                   help="multiplier degree for ideal membership, or 'auto'")
    g.add_argument("--coeff-degree", type=int, dest="coeff_degree", help="conversion ansatz degree (default 4)")
    g.add_argument("--format", choices=("text", "json"))
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--config", help="key=value file; flags override it")

    parser = _Parser(prog="dirac-sphere", description="Constrained dynamics on the D-sphere with exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bracket", parents=[common], help="Poisson bracket {A, B}")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--sector", choices=("all", "xp", "QP"), default="all")

    p = sub.add_parser("dirac", parents=[common], help="Dirac bracket {A, B}_D")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--constraint", action="append", dest="constraints", metavar="EXPR",
                   help="constraint (repeatable); default: the sphere")

    for name, text in (("classify", "classify a constraint set"), ("convert", "abelian conversion")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("constraints", nargs="*", metavar="EXPR", help="default: the sphere")

    p = sub.add_parser("extend", parents=[common], help="first-class extension of a Hamiltonian")
    p.add_argument("H", nargs="?", default="sq(p)/2")
    p.add_argument("--constraint", action="append", dest="constraints", metavar="EXPR")

    p = sub.add_parser("gauge", parents=[common], help="gauge flow of an expression")
    p.add_argument("E")
    p.add_argument("--generator", default="sigma2",
                   help="sigma1, sigma2 (sphere first-class constraints) or an expression")
    p.add_argument("--order", type=int, default=6)

    p = sub.add_parser("quantize-check", parents=[common], help="consistency of the operator algebra")
    p.add_argument("--kind", choices=("dirac", "canonical"), default="dirac")

    p = sub.add_parser("spectrum", parents=[common], help="energy levels")
    p.add_argument("--scheme", choices=("gauge", "dirac", "curvature_shift"), default="gauge")
    p.add_argument("--alpha", type=_rational)

    sub.add_parser("paper-repro", parents=[common], help="run every reproduction check")
    return parser


def resolve_config(args: argparse.Namespace) -> SessionConfig:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for f in fields(SessionConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return replace(SessionConfig(), **values).validate()


def _constraint_set(ctx: PhaseSpace, texts, cfg: SessionConfig, rep: Report) -> br.ConstraintSet:
    if not texts:
        return br.sphere_constraints(ctx)
    exprs = [parse_expr(t, ctx) for t in texts]
    rep.inputs.extend(str(e) for e in exprs)
    return br.ConstraintSet(exprs, cfg.degree_bound)


def cmd_bracket(args, cfg, rep):
    ctx = cfg.context()
    A, B = parse_expr(args.A, ctx), parse_expr(args.B, ctx)
    rep.inputs += [str(A), str(B)]
    rep.add("poisson", br.poisson(A, B, args.sector), sector=args.sector)


def cmd_dirac(args, cfg, rep):
    ctx = cfg.context()
    A, B = parse_expr(args.A, ctx), parse_expr(args.B, ctx)
    rep.inputs += [str(A), str(B)]
    cs = _constraint_set(ctx, args.constraints, cfg, rep)
    d = br.dirac(A, B, cs)
    rep.add("dirac", d)
    closed = None if args.constraints else _sphere_closed_form(args.A.strip(), args.B.strip(), ctx)
    if closed is not None:
        rep.add("sphere_closed_form", closed)
        rep.check(Check.of("closed_form_agrees", f"dirac-bracket-{args.A.strip()[0]}{args.B.strip()[0]}",
                           parse_expr(closed, ctx) - d))
    for a, phi in enumerate(cs, 1):
        rep.check(Check.of(f"annihilates_phi{a}", "dirac-annihilates-constraints", br.dirac(A, phi, cs)))


def _sphere_closed_form(a: str, b: str, ctx: PhaseSpace) -> str | None:
    """Textbook rendering of the sphere's brackets between bare coordinates and momenta."""
    m, n = re.fullmatch(r"([xp])(\d+)", a), re.fullmatch(r"([xp])(\d+)", b)
    if not (m and n) or max(int(m[2]), int(n[2])) > ctx.N:
        return None
    (k1, i), (k2, j) = (m[1], int(m[2])), (n[1], int(n[2]))
    if k1 == k2 == "x":
        return "0"
    if k1 == k2 == "p":
        return "0" if i == j else f"(p{i}*x{j} - p{j}*x{i})/sq(x)"
    sign = "" if k1 == "x" else "-"
    i, j = (i, j) if k1 == "x" else (j, i)
    xx = f"x{i}^2" if i == j else f"x{i}*x{j}"
    if i == j:
        return f"1 - {xx}/sq(x)" if not sign else f"-1 + {xx}/sq(x)"
    return f"{xx}/sq(x)" if sign else f"-{xx}/sq(x)"


def cmd_classify(args, cfg, rep):
    ctx = cfg.context()
    cs = _constraint_set(ctx, args.constraints, cfg, rep)
    rep.add("constraints", [str(c) for c in cs])
    rep.add("delta", [[str(e) for e in row] for row in cs.delta])
    rep.add("det", cs.det)
    rep.add("classification", cs.classification)


def cmd_convert(args, cfg, rep):
    ctx = cfg.context()
    cs = _constraint_set(ctx, args.constraints, cfg, rep)
    series = cv.abelianize(cs, k_max=cfg.kmax, coeff_degree=cfg.coeff_degree)
    for a, ts in enumerate(series.terms, 1):
        rep.add(f"sigma{a}", series.sigma(a - 1), terms=[str(t) for t in ts])
    rep.add("exact", "yes" if series.exact else "no")
    sig = series.sigmas
    bad = {}
    for a in range(len(sig)):
        for b in range(a + 1, len(sig)):
            r = br.poisson(sig[a], sig[b])
            if series.exact:
                if r:
                    bad[f"{a + 1}{b + 1}"] = r
            else:
                for k in range(series.k_max):
                    if qp_part(r, k):
                        bad[f"{a + 1}{b + 1}@{k}"] = qp_part(r, k)
    rep.check(Check.of("abelian", "abelian-constraints", pipeline._fmt(bad)))


def cmd_extend(args, cfg, rep):
    ctx = cfg.context()
    H = parse_expr(args.H, ctx)
    rep.inputs.append(str(H))
    cs = _constraint_set(ctx, args.constraints, cfg, rep)
    series = cv.abelianize(cs, k_max=cfg.kmax, coeff_degree=cfg.coeff_degree)
    ext = cv.extend_hamiltonian(H, series, k_max=cfg.kmax, coeff_degree=cfg.coeff_degree)
    rep.add("terms", [str(t) for t in ext.terms])
    rep.add("exact", "yes" if ext.exact else "no")
    rep.check(Check.of("first_class_through_kmax", "extended-hamiltonian",
                       pipeline._fmt(pipeline.truncation_residual(ext, series))))
    if not args.constraints and H == ctx.sq_p / 2 and ctx.M >= 1:
        closed = cv.sphere_hamiltonian(ctx)
        rep.add("closed_form", closed)
        parts = cv.expand_qp(closed, cfg.kmax)
        bad = [f"order {k}" for k in range(cfg.kmax + 1) if ext.terms[k] != parts[k]]
        rep.check(Check.of("matches_closed_form", "extended-hamiltonian", ", ".join(bad)))


def cmd_gauge(args, cfg, rep):
    ctx = cfg.context()
    E = parse_expr(args.E, ctx)
    named = {"sigma1": 0, "sigma2": 1}
    if args.generator in named:
        if ctx.M < 1:
            raise UsageError("sigma generators need --M >= 1")
        G = cv.sphere_sigmas(ctx)[named[args.generator]]
    else:
        G = parse_expr(args.generator, ctx)
    rep.inputs += [str(E), str(G)]
    flow = cv.gauge_transform(E, G, args.order)
    rep.add("kind", flow.kind)
    rep.add("terms", [str(t) for t in flow.terms])
    rep.add("closed_form", flow.closed_form())
    rep.add("convention", flow.convention)


def cmd_quantize_check(args, cfg, rep):
    pipeline.quantum_stage(rep, cfg.D, args.kind)
    if args.kind == "dirac":
        pipeline.operator_stage(rep, cfg.D)


def cmd_spectrum(args, cfg, rep):
    if args.scheme == "curvature_shift" and args.alpha is None:
        raise UsageError("--scheme curvature_shift needs --alpha")
    t = sp.spectrum(args.scheme, cfg.D, cfg.R, cfg.lmax, args.alpha)
    rep.add("scheme", args.scheme)
    if t.alpha is not None:
        rep.add("alpha", rat(t.alpha))
    rep.add("rows", pipeline.spectrum_rows(t))
    bad = [f"l={r.l}" for r in t.rows if sp.degeneracy(cfg.D, r.l, oracle=True) != r.degeneracy]
    rep.check(Check.of("degeneracy_oracle", "harmonic-degeneracy", ", ".join(bad)))


def cmd_paper_repro(args, cfg, rep):
    s = pipeline.Settings(cfg.D, cfg.M, cfg.R, cfg.lmax, cfg.kmax, cfg.degree_bound, cfg.coeff_degree)
    pipeline.run_all(rep, s)


HANDLERS = {
    "bracket": cmd_bracket,
    "dirac": cmd_dirac,
    "classify": cmd_classify,
    "convert": cmd_convert,
    "extend": cmd_extend,
    "gauge": cmd_gauge,
    "quantize-check": cmd_quantize_check,
    "spectrum": cmd_spectrum,
    "paper-repro": cmd_paper_repro,
}


def run(command: str, args: argparse.Namespace, cfg: SessionConfig) -> Report:
    rep = Report(command, cfg.echo())
    t0 = time.perf_counter()
    HANDLERS[command](args, cfg, rep)
    rep.elapsed = time.perf_counter() - t0
    return rep


def _emit(rep: Report, cfg: SessionConfig):
    text = rep.to_json() if cfg.format == "json" else rep.to_text()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        if args.command == "paper-repro" and cfg.M < 1:
            raise UsageError("paper-repro needs --M >= 1")
        rep = run(args.command, args, cfg)
    except (UsageError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError, RuntimeError, IndexError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_MATH
    _emit(rep, cfg)
    return EXIT_OK if rep.ok else EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
