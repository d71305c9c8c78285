"""Certificate reports: the common result type of every checker."""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from .errors import CertificateViolation, MalformedReport

REPORT_SCHEMA = "certreport/1"


def _plain(value):
    """Convert numpy scalars, tuples and exact numbers to JSON-able values."""
    if hasattr(value, "to_json"):
        return value.to_json()
    if hasattr(value, "item") and not isinstance(value, (list, dict)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _hist_key(entry):
    return json.dumps(entry[0], sort_keys=True)


def histogram(values) -> list[list]:
    """Sorted [value, multiplicity] pairs of an iterable of JSON-able values."""
    counts = Counter(json.dumps(_plain(v), sort_keys=True) for v in values)
    return sorted(([json.loads(k), c] for k, c in counts.items()), key=_hist_key)


def histogram_from_counts(pairs) -> list[list]:
    return sorted(([_plain(v), int(c)] for v, c in pairs), key=_hist_key)


@dataclass
class CertReport:
    check_name: str
    parameters: dict = field(default_factory=dict)
    expected: Any = None
    observed_histogram: list = field(default_factory=list)
    passed: bool = False
    runtime_ms: float = 0.0
    witness: Any = None
    violation: type[CertificateViolation] = field(default=CertificateViolation, repr=False)

    def __bool__(self):
        return self.passed

    def raise_for_failure(self) -> CertReport:
        if not self.passed:
            raise self.violation(f"{self.check_name} failed: {self.witness!r}", self.witness)
        return self

    def to_dict(self) -> dict:
        out = {
            "schema": REPORT_SCHEMA,
            "check_name": self.check_name,
            "parameters": _plain(self.parameters),
            "expected": _plain(self.expected),
            "observed_histogram": _plain(self.observed_histogram),
            "pass": bool(self.passed),
            "runtime_ms": round(float(self.runtime_ms), 3),
        }
        if self.witness is not None:
            out["witness"] = _plain(self.witness)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def comparable(self) -> dict:
        """The serialized form without timing, for reproducibility checks."""
        d = self.to_dict()
        d.pop("runtime_ms")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> CertReport:
        try:
            if data.get("schema", REPORT_SCHEMA) != REPORT_SCHEMA:
                raise MalformedReport(f"unknown report schema {data.get('schema')!r}")
            return cls(
                check_name=str(data["check_name"]),
                parameters=dict(data.get("parameters", {})),
                expected=data.get("expected"),
                observed_histogram=list(data["observed_histogram"]),
                passed=bool(data["pass"]),
                runtime_ms=float(data.get("runtime_ms", 0.0)),
                witness=data.get("witness"),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedReport(f"malformed report: {exc}") from exc


class Timer:
    """Context manager measuring wall time in milliseconds."""

    def __enter__(self):
        self._start = time.perf_counter()
        self.ms = 0.0
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self._start) * 1000.0
        return False
