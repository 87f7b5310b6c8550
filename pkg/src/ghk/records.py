"""Check records and suite reports.

A :class:`CheckRecord` captures one numerically verified inequality or
identity instance: the two sides, their ratio, and a pass flag. Signed-input
runs of the inequality checks are recorded with ``passed=None`` (monitored,
not gated), since the constant-1 bounds are proved for nonnegative inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field


def safe_ratio(lhs, rhs):
    """``lhs / rhs`` for ``rhs > 0``; 0 when both vanish, inf otherwise."""
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else math.inf


@dataclass
class CheckRecord:
    name: str
    lhs: float
    rhs: float
    ratio: float
    passed: bool | None
    seed: int | None = None
    params: dict = field(default_factory=dict)
    runtime_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self, include_runtime=True):
        doc = {
            "name": self.name,
            "seed": self.seed,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
        }
        if self.extra:
            doc["extra"] = self.extra
        if include_runtime:
            doc["runtime_ms"] = self.runtime_ms
        return doc

    def with_meta(self, seed=None, params=None, runtime_ms=None):
        if seed is not None:
            self.seed = seed
        if params is not None:
            self.params = dict(params)
        if runtime_ms is not None:
            self.runtime_ms = runtime_ms
        return self


def config_hash(config):
    """Stable hash of a JSON-serializable suite configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class SuiteReport:
    version: str
    config_hash: str
    records: list

    def __post_init__(self):
        self.records = sorted(
            self.records,
            key=lambda r: (
                r.name,
                r.seed if r.seed is not None else -1,
                r.params.get("k", 0),
                r.params.get("d", 0),
            ),
        )

    @property
    def counts(self):
        out = {}
        for r in self.records:
            c = out.setdefault(r.name, {"total": 0, "passed": 0, "failed": 0, "monitored": 0})
            c["total"] += 1
            if r.passed is None:
                c["monitored"] += 1
            elif r.passed:
                c["passed"] += 1
            else:
                c["failed"] += 1
        return out

    @property
    def worst_ratio(self):
        out = {}
        for r in self.records:
            if math.isfinite(r.ratio):
                prev = out.get(r.name)
                if prev is None or r.ratio > prev:
                    out[r.name] = r.ratio
        return out

    @property
    def all_passed(self):
        return all(r.passed for r in self.records if r.passed is not None)

    def failures(self):
        return [r for r in self.records if r.passed is False]

    def as_dict(self, include_runtime=True):
        return {
            "version": self.version,
            "config_hash": self.config_hash,
            "all_passed": self.all_passed,
            "counts": self.counts,
            "worst_ratio": self.worst_ratio,
            "records": [r.as_dict(include_runtime) for r in self.records],
        }

    def to_json(self, include_runtime=True):
        return json.dumps(self.as_dict(include_runtime), indent=2, sort_keys=True)

    def canonical_bytes(self):
        """Deterministic serialization: runtimes (the only timestamps) dropped."""
        return json.dumps(
            self.as_dict(include_runtime=False), sort_keys=True, separators=(",", ":")
        ).encode()
