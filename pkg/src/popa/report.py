from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Convert numpy / Fraction containers into plain JSON values.

    Fractions become "p/q" strings so exact results survive the round trip.
    Non-finite floats become strings ("inf", "-inf", "nan").
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return str(x)
    return obj


@dataclass
class Report:
    """Result of a verification run.

    ``passed`` is always derived from the thresholds the producer applied;
    ``failures`` itemizes what went wrong when it is False.
    """

    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "passed": bool(self.passed),
            "metrics": jsonable(self.metrics),
            "failures": [str(f) for f in self.failures],
        }
        if self.seed is not None:
            out["seed"] = int(self.seed)
        return out

    def __bool__(self) -> bool:
        return bool(self.passed)
