"""Small result containers shared by the validators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    """A boolean answer with an optional witness; truthy iff ``ok``."""

    ok: bool
    witness: Any = None
    detail: Any = None

    def __bool__(self):
        return bool(self.ok)


@dataclass
class ValidationReport:
    """Named checks, each a Verdict. ``ok`` iff every check passed."""

    checks: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool, witness=None, detail=None):
        self.checks[name] = Verdict(ok, witness, detail)

    def merge(self, prefix: str, other: "ValidationReport"):
        for k, v in other.checks.items():
            self.checks[f"{prefix}.{k}"] = v

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.checks.values())

    def __bool__(self):
        return self.ok

    def failures(self) -> dict:
        return {k: v for k, v in self.checks.items() if not v.ok}

    def __getitem__(self, name):
        return self.checks[name]
