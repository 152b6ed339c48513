"""Structured results of identity checks and the JSON report format."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional

SCHEMA = "orbifusion.report/1"


def jsonable(x: Any) -> Any:
    """Convert exact values into deterministic JSON-friendly data."""
    from .boson import GradedVector
    from .cyclotomic import Cyc

    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Cyc):
        return str(x)
    if isinstance(x, GradedVector):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return repr(x)


@dataclass
class Check:
    """One identity instance: name, trusted window, pass flag and a witness on failure."""

    name: str
    passed: bool
    window: Any = None
    checked: int = 0
    witness: Any = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "window": jsonable(self.window),
               "checked": self.checked, "params": jsonable(self.params)}
        if not self.passed:
            out["witness"] = jsonable(self.witness)
        return out

    def __bool__(self):
        return self.passed


@dataclass
class Report:
    command: str
    params: dict = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    results: Any = None
    timing: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def to_dict(self, with_timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "params": jsonable(self.params),
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.results is not None:
            out["results"] = jsonable(self.results)
        if with_timing and self.timing is not None:
            out["timing"] = self.timing
        return out

    def to_json(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_dict(with_timing), sort_keys=True, indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f"  window={jsonable(c.window)}" if c.window is not None else ""))
            if not c.passed and c.witness is not None:
                lines.append(f"         witness: {jsonable(c.witness)}")
        if self.results is not None:
            res = self.results
            if isinstance(res, list):
                lines.extend(f"  {jsonable(r)}" for r in res)
            else:
                lines.append(f"  {jsonable(res)}")
        return "\n".join(lines)


def compare_maps(name: str, left: dict, right: dict, window=None, params=None) -> Check:
    """Compare two exponent -> value maps exactly; zero entries may be absent."""
    keys = sorted(set(left) | set(right))
    for key in keys:
        a, b = left.get(key), right.get(key)
        diff = (a if a is not None else 0) - (b if b is not None else 0) if a is not None and b is not None else (a if b is None else b)
        if diff:
            return Check(name, False, window, len(keys), {"exponent": key, "left": a, "right": b}, params or {})
    return Check(name, True, window, len(keys), None, params or {})


def compare_series(name: str, left, right, window=None, params=None) -> Check:
    """Compare two PuiseuxSeries wherever both are trusted."""
    wit = left.first_difference(right)
    count = len(set(left.terms) | set(right.terms))
    if wit is not None:
        e, a, b = wit
        return Check(name, False, window, count, {"exponent": e, "left": a, "right": b}, params or {})
    return Check(name, True, window, count, None, params or {})
