"""Structured pass/fail records for inequality checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = ["VerificationReport", "json_safe"]


def json_safe(value: Any) -> Any:
    """Recursively replace non-finite floats by strings and round floats to 9 digits."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    try:
        return json_safe(float(value))
    except (TypeError, ValueError):
        return str(value)


@dataclass
class VerificationReport:
    """Outcome of checking ``lhs <relation> rhs`` within ``tol``.

    ``margin`` is signed so that a non-negative margin means the inequality
    holds with room to spare; ``passed`` allows a violation up to ``tol``.
    """

    check: str
    params: dict
    lhs: float
    rhs: float
    tol: float
    passed: bool
    margin: float
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, check: str, params: dict, lhs: float, rhs: float, tol: float,
                relation: str = "<=", **details) -> "VerificationReport":
        lhs, rhs = float(lhs), float(rhs)
        if relation == "<=":
            margin = rhs - lhs if not (math.isinf(lhs) and lhs == rhs) else 0.0
            ok = margin >= -tol
        elif relation == ">=":
            margin = lhs - rhs if not (math.isinf(lhs) and lhs == rhs) else 0.0
            ok = margin >= -tol
        elif relation == "==":
            margin = -abs(lhs - rhs) if lhs != rhs else 0.0
            ok = abs(lhs - rhs) <= tol or lhs == rhs
        else:
            raise ValueError(f"unknown relation {relation!r}")
        if math.isnan(margin):
            ok = False
        return cls(check, dict(params), lhs, rhs, float(tol), bool(ok), float(margin), dict(details))

    @classmethod
    def combine(cls, check: str, params: dict, reports: list["VerificationReport"],
                **details) -> "VerificationReport":
        """Aggregate sub-reports: passes iff all pass; keeps the worst margin."""
        if not reports:
            return cls(check, dict(params), 0.0, 0.0, 0.0, True, math.inf, dict(details))
        worst = min(reports, key=lambda r: r.margin if not math.isnan(r.margin) else -math.inf)
        ok = all(r.passed for r in reports)
        det = dict(details)
        det.setdefault("count", len(reports))
        det.setdefault("failures", sum(not r.passed for r in reports))
        failed = [r.check for r in reports if not r.passed]
        if failed:
            det.setdefault("failed_checks", sorted(set(failed)))
        return cls(check, dict(params), worst.lhs, worst.rhs, worst.tol, ok, worst.margin, det)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tol": self.tol,
            "pass": self.passed,
            "margin": self.margin,
        }
        if self.details:
            out["details"] = self.details
        return json_safe(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
