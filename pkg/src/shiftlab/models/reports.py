"""
Schedules and the structured verdicts returned by the checkers
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from shiftlab.exceptions import ConfigurationError
from shiftlab.utils.config import K_MAX


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def combine(cls, verdicts: List["Verdict"]) -> "Verdict":
        """Violated dominates inconclusive, which dominates satisfied."""
        if any(v is cls.VIOLATED for v in verdicts):
            return cls.VIOLATED
        if any(v is cls.INCONCLUSIVE for v in verdicts):
            return cls.INCONCLUSIVE
        return cls.SATISFIED


class EigenVerdict(str, Enum):
    NORM_BOUNDED = "norm-bounded"
    NORM_DIVERGING = "norm-diverging"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PowerSchedule:
    """
    Powers n_k = a*k + b for k = 1..k_max, or an explicit increasing list.
    """
    a: int = 1
    b: int = 0
    k_max: int = K_MAX
    explicit: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.explicit is not None:
            explicit = tuple(int(n) for n in self.explicit)
            if not explicit:
                raise ConfigurationError("explicit schedule is empty", field="schedule.explicit")
            if explicit[0] < 1 or any(m <= n for n, m in zip(explicit, explicit[1:])):
                raise ConfigurationError("explicit schedule must be strictly increasing positive integers",
                                         field="schedule.explicit")
            object.__setattr__(self, "explicit", explicit)
            object.__setattr__(self, "k_max", min(self.k_max, len(explicit)) if self.k_max else len(explicit))
        else:
            if self.a < 1:
                raise ConfigurationError("schedule step a must be >= 1", field="schedule.a")
            if self.b < 0:
                raise ConfigurationError("schedule offset b must be >= 0", field="schedule.b")
        if self.k_max < 1:
            raise ConfigurationError("k_max must be positive", field="schedule.k_max")

    @classmethod
    def from_config(cls, block: Dict[str, Any], field: str = "schedule") -> "PowerSchedule":
        if not isinstance(block, dict):
            raise ConfigurationError("schedule block must be a mapping", field=field)
        try:
            if "explicit" in block:
                return cls(explicit=tuple(block["explicit"]), k_max=int(block.get("k_max", len(block["explicit"]))))
            return cls(a=int(block.get("a", 1)), b=int(block.get("b", 0)), k_max=int(block.get("k_max", K_MAX)))
        except ConfigurationError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed schedule block: {e}", field=field) from e

    def powers(self) -> List[int]:
        """[n_1, ..., n_{k_max}]"""
        if self.explicit is not None:
            return list(self.explicit[: self.k_max])
        return [self.a * k + self.b for k in range(1, self.k_max + 1)]

    def to_config(self) -> Dict[str, Any]:
        if self.explicit is not None:
            return {"explicit": list(self.explicit), "k_max": self.k_max}
        return {"a": self.a, "b": self.b, "k_max": self.k_max}


@dataclass
class CriterionRow:
    """One k of a criterion check."""
    k: int
    n_k: int
    forward_product: Optional[float] = None
    inverse_product: Optional[float] = None
    invariance: Optional[bool] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "k": self.k,
            "n_k": self.n_k,
            "forward_product": self.forward_product,
            "inverse_product": self.inverse_product,
            "invariance": self.invariance,
        }
        row.update(self.extras)
        return row


@dataclass
class CriterionReport:
    """Verdict of a checker with per-k diagnostics and every threshold used."""
    check: str
    verdict: Verdict
    per_k: List[CriterionRow] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "verdict": self.verdict.value,
            "per_k": [row.to_dict() for row in self.per_k],
            "tolerances": dict(self.tolerances),
            "notes": list(self.notes),
            "details": dict(self.details),
        }


@dataclass
class WindowNorm:
    half_width: int
    l2_norm: float
    l1_sum: float


@dataclass
class EigenScanResult:
    """Eigenvector candidate diagnostics of T^p x = lambda x for one lambda."""
    lam: complex
    anchor: int
    right_ratio: complex
    left_ratio: complex
    window_norms: List[WindowNorm]
    verdict: EigenVerdict
    l1_verdict: EigenVerdict
    tail_verdict: EigenVerdict
    interior_residual: float
    in_subspace: bool
    coefficients: Dict[int, complex] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "anchor": self.anchor,
            "right_ratio": self.right_ratio,
            "left_ratio": self.left_ratio,
            "window_norms": [
                {"half_width": w.half_width, "l2_norm": w.l2_norm, "l1_sum": w.l1_sum} for w in self.window_norms
            ],
            "verdict": self.verdict.value,
            "l1_verdict": self.l1_verdict.value,
            "tail_verdict": self.tail_verdict.value,
            "interior_residual": self.interior_residual,
            "in_subspace": self.in_subspace,
        }


@dataclass
class EigenSpanReport:
    """Index-set coverage of M's admissible indices by two eigenvector families."""
    window: Tuple[int, int]
    small_dense: bool
    large_dense: bool
    small_uncovered: List[int]
    large_uncovered: List[int]

    @property
    def verdict(self) -> Verdict:
        return Verdict.SATISFIED if self.small_dense and self.large_dense else Verdict.VIOLATED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "window": list(self.window),
            "small": "dense-at-truncation" if self.small_dense else "not-dense",
            "large": "dense-at-truncation" if self.large_dense else "not-dense",
            "small_uncovered": list(self.small_uncovered),
            "large_uncovered": list(self.large_uncovered),
            "verdict": self.verdict.value,
        }


@dataclass
class WitnessResult:
    """
    Outcome of the eigenvector witness construction at one n.

    x_power_norm and x_next_power_norm are the norms of T^{t_exponent} x and
    T^{t_next_exponent} x, i.e. of D^n x and D^{n+1} x for D standing in for T^p.
    """
    n: int
    z_n: Any
    combined: Any
    residual: float
    x_power_norm: float
    x_next_power_norm: float
    z_norm: float
    t_exponent: int
    t_next_exponent: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "z_n": self.z_n.to_dict(),
            "combined": self.combined.to_dict(),
            "residual": self.residual,
            "x_power_norm": self.x_power_norm,
            "x_next_power_norm": self.x_next_power_norm,
            "z_norm": self.z_norm,
            "t_exponent": self.t_exponent,
            "t_next_exponent": self.t_next_exponent,
        }
