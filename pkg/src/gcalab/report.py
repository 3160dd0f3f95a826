"""Machine-readable certificates for the exhaustive theorem checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class Certificate:
    theorem: str
    instance: dict[str, Any]
    counts: dict[str, Any] = field(default_factory=dict)
    clauses: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    violations: list[Any] = field(default_factory=list)
    seed: int | None = None
    budget_limited: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations and all(self.clauses.values())

    def violation(self, what: str, **detail):
        self.violations.append({"what": what, **detail})

    def to_json(self) -> dict:
        return _plain(
            {
                "theorem": self.theorem,
                "instance": self.instance,
                "ok": self.ok,
                "clauses": self.clauses,
                "counts": self.counts,
                "witnesses": self.witnesses,
                "violations": self.violations,
                "seed": self.seed,
                "budget_limited": self.budget_limited,
            }
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def summary_line(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        return f"{mark} {self.theorem} {self.instance} {self.counts}"
