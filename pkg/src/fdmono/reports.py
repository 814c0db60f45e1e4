"""Uniform pass/fail reporting for verification suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    """A single named verification with an optional failure witness."""

    name: str
    passed: bool
    witness: dict | None = None

    def to_json_obj(self) -> dict:
        out: dict = {"name": self.name, "pass": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    """An ordered collection of checks with an aggregate status."""

    checks: list[Check] = field(default_factory=list)
    header: dict = field(default_factory=dict)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, checks: list[Check]) -> None:
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json_obj(self) -> dict:
        out: dict = {"status": self.status}
        if self.header:
            out["header"] = self.header
        out["checks"] = [c.to_json_obj() for c in self.checks]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=False)

    def format_text(self) -> str:
        lines = []
        for key, val in self.header.items():
            lines.append(f"# {key}: {val}")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"{mark} {c.name}")
            if c.witness and not c.passed:
                for key, val in c.witness.items():
                    lines.append(f"     {key}: {val}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines)
