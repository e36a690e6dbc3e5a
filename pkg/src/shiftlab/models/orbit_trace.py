"""
Orbit traces and the density proxies computed from them
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from shiftlab.models.lattice_vector import LatticeVector, scaled_norm


@dataclass
class OrbitTrace:
    """Points T^n x for the listed powers, with per-point leakage."""
    base_point: LatticeVector
    powers: List[int]
    points: List[LatticeVector]
    leakage: List[float]
    leakage_tolerance: float = 0.0
    overflow: bool = False
    window: tuple = ()

    @property
    def trusted(self) -> List[bool]:
        return [leak <= self.leakage_tolerance for leak in self.leakage]

    def __len__(self) -> int:
        return len(self.points)

    def subset(self, keep: List[bool]) -> "OrbitTrace":
        """Trace restricted to the points where keep is true, powers preserved."""
        return OrbitTrace(
            base_point=self.base_point,
            powers=[p for p, k in zip(self.powers, keep) if k],
            points=[v for v, k in zip(self.points, keep) if k],
            leakage=[leak for leak, k in zip(self.leakage, keep) if k],
            leakage_tolerance=self.leakage_tolerance,
            overflow=self.overflow,
            window=self.window,
        )

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"power": p, "norm": scaled_norm(v.coeffs), "leakage": leak, "trusted": ok}
            for p, v, leak, ok in zip(self.powers, self.points, self.leakage, self.trusted)
        ]

    def to_dict(self, include_points: bool = False) -> Dict[str, Any]:
        data = {
            "base_point": self.base_point.to_dict(),
            "powers": list(self.powers),
            "rows": self.rows(),
            "leakage_tolerance": self.leakage_tolerance,
            "overflow": self.overflow,
            "window": list(self.window),
        }
        if include_points:
            data["points"] = [v.to_dict() for v in self.points]
        return data


@dataclass
class TargetHit:
    best_distance: float
    best_power: int


@dataclass
class CoverageReport:
    """Epsilon-coverage of a finite target set in M by orbit points."""
    targets: List[LatticeVector]
    epsilon: float
    hits: List[TargetHit]
    orbit_length: int
    window: tuple = ()
    projected: bool = False

    @property
    def score(self) -> float:
        if not self.targets:
            return 0.0
        covered = sum(1 for hit in self.hits if hit.best_distance <= self.epsilon)
        return covered / len(self.targets)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "orbit_length": self.orbit_length,
            "window": list(self.window),
            "projected": self.projected,
            "score": self.score,
            "hits": [
                {"best_distance": h.best_distance, "best_power": h.best_power} for h in self.hits
            ],
        }


@dataclass
class PowerCheck:
    power: int
    in_subspace: bool
    projected_norm: float
    deviation: float
    holds: bool


@dataclass
class InclusionReport:
    """Per-power check that orbit points in M coincide with their projections."""
    checks: List[PowerCheck] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "tolerance": self.tolerance,
            "per_power": [
                {
                    "power": c.power,
                    "in_subspace": c.in_subspace,
                    "projected_norm": c.projected_norm,
                    "projection_vanishes": c.projected_norm == 0.0,
                    "deviation": c.deviation,
                    "holds": c.holds,
                }
                for c in self.checks
            ],
        }


@dataclass
class IdentityReport:
    """Pointwise comparison of two orbit computations that must agree."""
    name: str
    powers: List[int]
    deviations: List[float]
    tolerance: float
    support_matches: List[bool]

    @property
    def holds(self) -> bool:
        return all(d <= self.tolerance for d in self.deviations) and all(self.support_matches)

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations)) if self.deviations else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "holds": self.holds,
            "tolerance": self.tolerance,
            "max_deviation": self.max_deviation,
            "per_power": [
                {"power": p, "deviation": d, "support_matches": s}
                for p, d, s in zip(self.powers, self.deviations, self.support_matches)
            ],
        }
