"""Structured verdicts with deterministic JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import format_scalar

PASS = "pass"
FAIL = "fail"
SKIP = "skip"
INFO = "info"


def to_jsonable(value: Any) -> Any:
    """Rationals become ``"p/q"`` strings, floats stay floats, arrays become nested lists."""
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()] if value.ndim else to_jsonable(value[()])
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


@dataclass
class Check:
    name: str
    status: str
    residual: Any = None
    detail: dict = field(default_factory=dict)

    @classmethod
    def of(cls, name: str, ok: bool, residual=None, **detail) -> "Check":
        return cls(name, PASS if ok else FAIL, residual, detail)

    @classmethod
    def info(cls, name: str, residual=None, **detail) -> "Check":
        return cls(name, INFO, residual, detail)

    @classmethod
    def skip(cls, name: str, reason: str) -> "Check":
        return cls(name, SKIP, None, {"reason": reason})

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residual": to_jsonable(self.residual),
            "detail": to_jsonable(self.detail),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["name"], d["status"], d.get("residual"), d.get("detail") or {})


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    sections: list["Report"] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def check(self, name: str) -> Check:
        for c in self.all_checks():
            if c.name == name:
                return c
        raise KeyError(name)

    def all_checks(self):
        yield from self.checks
        for s in self.sections:
            yield from s.all_checks()

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.all_checks())

    def first_failure(self) -> tuple[str, Check] | None:
        for c in self.checks:
            if c.failed:
                return self.title, c
        for s in self.sections:
            hit = s.first_failure()
            if hit:
                return hit
        return None

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "data": to_jsonable(self.data),
            "sections": [s.to_dict() for s in self.sections],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            d["title"],
            [Check.from_dict(c) for c in d.get("checks", [])],
            d.get("data") or {},
            [cls.from_dict(s) for s in d.get("sections", [])],
        )

    def dumps(self) -> str:
        return dumps(self.to_dict())


def dumps(doc: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
