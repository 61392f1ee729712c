"""Check and report records shared by the scenario runner and the batteries."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Check:
    """One asserted quantity: what was required, what was measured."""

    name: str
    passed: bool
    tolerance: float | None = None
    measured: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "tolerance": self.tolerance,
            "measured": self.measured,
            "detail": self.detail,
        }


@dataclass
class ScenarioReport:
    """Serialized record of one experiment run."""

    scenario: str
    config: dict
    h_values: dict = field(default_factory=dict)
    summaries: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # in-memory only, not serialized

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, tolerance: float | None = None,
              measured: float | None = None, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), tolerance, measured, detail))
        return bool(passed)

    @contextmanager
    def timed(self, key: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings_ms[key] = 1000.0 * (time.perf_counter() - t0)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "config": self.config,
            "h_values": self.h_values,
            "summaries": self.summaries,
            "checks": [c.to_dict() for c in self.checks],
            "timings_ms": self.timings_ms,
        }

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path
