"""Check reports and sampling verdicts, with stable JSON serialisation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProvenanceError

# Where an expected value comes from: a closed form quoted from the literature,
# a value derived by an independent computation, or a trivial identity.
SOURCES = ("literature", "derived", "trivial")

VERDICTS = ("pass", "fail", "distinguished", "indistinguishable-at-n",
            "obstructed", "not-obstructed", "inconclusive")


def sig(x: float, digits: int = 12) -> float:
    """Round to ``digits`` significant digits (stable across platforms and runs)."""
    x = float(x)
    if not math.isfinite(x):
        return x
    out = float(f"{x:.{digits}g}")
    return 0.0 if out == 0.0 else out


def phase_json(z: complex) -> dict:
    z = complex(z)
    a = math.atan2(z.imag, z.real)
    if a == -math.pi:
        a = math.pi
    return {"angle": sig(a), "re": sig(z.real), "im": sig(z.imag)}


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, complex):
        return phase_json(obj)
    if isinstance(obj, int):
        return obj
    if hasattr(obj, "to_json"):
        return _clean(obj.to_json())
    try:
        return sig(float(obj))
    except (TypeError, ValueError):
        return str(obj)


def require_source(source) -> str:
    if source not in SOURCES:
        raise ProvenanceError(f"expected value has no recognised source (got {source!r})")
    return source


@dataclass
class HolonomyCheckReport:
    """Comparison of two phases (or complex numbers) against a tolerance."""

    identity: str
    left: complex
    right: complex
    tolerance: float
    anchor: str = ""
    source: str | None = None
    details: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def discrepancy(self) -> float:
        return abs(complex(self.left) - complex(self.right))

    @property
    def scalar(self) -> bool:
        """Real-valued comparison (a momentum, an integral, a residual) rather than phases."""
        return not (isinstance(self.left, complex) or isinstance(self.right, complex)
                    or np.iscomplexobj(self.left) or np.iscomplexobj(self.right))

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance

    def to_json(self) -> dict:
        return _clean({
            "identity": self.identity,
            "anchor": self.anchor,
            "source": self.source,
            "left": float(self.left) if self.scalar else complex(self.left),
            "right": float(self.right) if self.scalar else complex(self.right),
            "discrepancy": self.discrepancy,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": self.details,
            "warnings": list(self.warnings),
            "flags": list(self.flags),
        })


@dataclass
class Verdict:
    """Outcome of a sampling test or an obstruction check."""

    test_id: str
    verdict: str
    max_discrepancy: float
    tolerance: float
    n: int = 0
    seed: int | None = None
    anchor: str = ""
    source: str | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_json(self) -> dict:
        return _clean({
            "test_id": self.test_id,
            "anchor": self.anchor,
            "source": self.source,
            "verdict": self.verdict,
            "seed": self.seed,
            "n": self.n,
            "max_discrepancy": self.max_discrepancy,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "details": self.details,
        })
