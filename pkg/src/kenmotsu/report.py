"""Check entries and the machine-readable report."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

SCHEMA_VERSION = 1

PASS, FAIL, INFO, SKIP = "pass", "fail", "info", "skipped"


@dataclass(frozen=True)
class CheckEntry:
    name: str
    residual: Optional[float]
    tolerance: Optional[float]
    verdict: str = ""
    note: str = ""

    def __post_init__(self):
        if not self.verdict:
            if self.tolerance is None or self.residual is None:
                v = INFO
            else:
                v = PASS if self.residual < self.tolerance else FAIL
            object.__setattr__(self, "verdict", v)
        if self.residual is not None:
            object.__setattr__(self, "residual", float(self.residual))
        if self.tolerance is not None:
            object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL


def check(name, residual, tolerance, note="") -> CheckEntry:
    return CheckEntry(name, float(residual), float(tolerance), note=note)


def info(name, value, note="") -> CheckEntry:
    return CheckEntry(name, None if value is None else float(value), None, INFO, note)


def skipped(name, note) -> CheckEntry:
    return CheckEntry(name, None, None, SKIP, note)


@dataclass
class Report:
    command: str
    manifold: str
    digest: str
    epsilon: float
    n: int
    seed: Optional[int]
    entries: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    points: list = field(default_factory=list)
    engine: str = ""
    schema: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return not any(e.failed for e in self.entries)

    def entry(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["points"] = [list(p) for p in self.points]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        d = dict(d)
        d["entries"] = [CheckEntry(**e) for e in d.get("entries", [])]
        d["points"] = [tuple(p) for p in d.get("points", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [
            f"{self.command}: {self.manifold}  (eps={self.epsilon:+g}, n={self.n}, "
            f"{len(self.points)} points, seed={self.seed})"
        ]
        if self.entries:
            w = max(len(e.name) for e in self.entries)
            lines.append(f"  {'check':<{w}}  {'residual':>12}  {'tolerance':>10}  verdict")
            for e in self.entries:
                res = "-" if e.residual is None else f"{e.residual:.3e}"
                tol = "-" if e.tolerance is None else f"{e.tolerance:.1e}"
                note = f"  ({e.note})" if e.note else ""
                lines.append(f"  {e.name:<{w}}  {res:>12}  {tol:>10}  {e.verdict}{note}")
        if self.constants:
            lines.append("  constants:")
            for k in sorted(self.constants):
                v = self.constants[k]
                lines.append(f"    {k} = {v:.12g}" if isinstance(v, float) else f"    {k} = {v}")
        lines.append(f"  overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def digest_text(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()
