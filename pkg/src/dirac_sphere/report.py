"""Report objects shared by the command-line front end.

JSON output is deterministic: keys keep insertion order, rationals are
rendered as ``num/den`` strings, and wall-clock timing appears only in the
text rendering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from importlib.metadata import PackageNotFoundError, version

PASS = "pass"
FAIL = "fail"


def package_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def rat(q) -> str:
    """Exact rational as ``num/den``, or ``num`` for integers."""
    return str(Fraction(q))


@dataclass
class Check:
    name: str
    paper_eq: str  # relation tag
    status: str
    residual: str = "0"

    @classmethod
    def of(cls, name: str, tag: str, residual) -> "Check":
        """A check passes exactly when its residual is falsy (zero, empty, None)."""
        if residual is None or residual is False or (not isinstance(residual, bool) and not residual):
            return cls(name, tag, PASS, "0")
        text = "mismatch" if residual is True else str(residual)
        return cls(name, tag, FAIL, text)

    @classmethod
    def equal(cls, name: str, tag: str, got, want) -> "Check":
        if got == want:
            return cls(name, tag, PASS, "0")
        return cls(name, tag, FAIL, f"got {got}, expected {want}")

    def as_dict(self):
        return {"name": self.name, "paper_eq": self.paper_eq, "status": self.status, "residual": self.residual}


@dataclass
class Report:
    command: str
    config: dict
    inputs: list = field(default_factory=list)
    results: list = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    elapsed: float | None = None

    def add(self, name: str, value, **extra):
        item = {"name": name, "value": value if isinstance(value, (str, int, list, dict)) else str(value)}
        item.update(extra)
        self.results.append(item)

    def check(self, c: Check) -> Check:
        self.checks.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.status == PASS for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "inputs": list(self.inputs),
            "results": self.results,
            "checks": [c.as_dict() for c in self.checks],
            "version": package_version(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        lines.append("config: " + ", ".join(f"{k}={v}" for k, v in self.config.items()))
        for i, s in enumerate(self.inputs, 1):
            lines.append(f"input[{i}]: {s}")
        for r in self.results:
            lines.extend(_text_result(r))
        if self.checks:
            width = max(len(c.name) for c in self.checks)
            for c in self.checks:
                tail = "" if c.status == PASS else f"  residual: {c.residual}"
                lines.append(f"{c.status.upper():4}  {c.name:<{width}}  [{c.paper_eq}]{tail}")
            n = sum(c.status == PASS for c in self.checks)
            lines.append(f"{n}/{len(self.checks)} checks passed")
        if self.elapsed is not None:
            lines.append(f"elapsed: {self.elapsed:.2f} s")
        return "\n".join(lines) + "\n"


def _text_result(r: dict) -> list[str]:
    v = r["value"]
    extra = {k: x for k, x in r.items() if k not in ("name", "value")}
    suffix = "".join(f"  ({k}: {x})" for k, x in extra.items())
    if isinstance(v, list):
        out = [f"{r['name']}:{suffix}"]
        for item in v:
            if isinstance(item, dict):
                out.append("  " + "  ".join(f"{k}={x}" for k, x in item.items()))
            else:
                out.append(f"  {item}")
        return out
    if isinstance(v, dict):
        return [f"{r['name']}:{suffix}"] + [f"  {k} = {x}" for k, x in v.items()]
    return [f"{r['name']} = {v}{suffix}"]


def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text())
