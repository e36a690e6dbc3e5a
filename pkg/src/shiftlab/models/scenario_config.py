"""
Validated run configuration assembled from embedded defaults, a scenario file and CLI flags
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from shiftlab.exceptions import ConfigurationError
from shiftlab.models.lattice_vector import WindowPolicy
from shiftlab.models.operators import ShiftOperator
from shiftlab.models.reports import PowerSchedule
from shiftlab.models.subspace import PatternSubspace
from shiftlab.utils.config import (DEFAULT_HALF_WIDTH, DEFAULT_SEED, IDENTITY_TOLERANCE, LEAKAGE_TOLERANCE,
                                   LIMIT_TOLERANCE, MEMBERSHIP_TOLERANCE, TREND_WINDOW)
from shiftlab.utils.scenarios import TASKS

# task -> blocks that must be present
REQUIRED_BLOCKS = {
    "criterion": ("operator", "subspace", "schedule", "criterion"),
    "lemma5": ("operator", "subspace", "schedule", "lemma5"),
    "mhc": ("operator", "subspace", "schedule", "mhc"),
    "witness": ("witness",),
    "eigen-scan": ("operator", "subspace", "eigen_scan"),
    "orbit": ("operator", "subspace", "orbit"),
    "coverage": ("subspace", "constructor"),
    "compression": ("operator", "subspace", "compression"),
    "quotient": ("operator", "subspace", "quotient"),
    "example1": ("subspace", "constructor"),
    "example3": ("operator", "subspace", "schedule", "criterion"),
    "adjoint-pair": ("operator", "subspace", "schedule", "adjoint"),
}


@dataclass(frozen=True)
class Tolerances:
    limit: float = LIMIT_TOLERANCE
    membership: float = MEMBERSHIP_TOLERANCE
    trend_window: int = TREND_WINDOW
    leakage: float = LEAKAGE_TOLERANCE
    identity: float = IDENTITY_TOLERANCE

    @classmethod
    def from_config(cls, block: Dict[str, Any], field: str = "tolerances") -> "Tolerances":
        if not isinstance(block, dict):
            raise ConfigurationError("tolerances block must be a mapping", field=field)
        try:
            tolerances = cls(
                limit=float(block.get("limit", LIMIT_TOLERANCE)),
                membership=float(block.get("membership", MEMBERSHIP_TOLERANCE)),
                trend_window=int(block.get("trend_window", TREND_WINDOW)),
                leakage=float(block.get("leakage", LEAKAGE_TOLERANCE)),
                identity=float(block.get("identity", IDENTITY_TOLERANCE)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed tolerances block: {e}", field=field) from e
        for name in ("limit", "identity"):
            if getattr(tolerances, name) <= 0:
                raise ConfigurationError(f"{name} tolerance must be positive", field=f"{field}.{name}")
        for name in ("membership", "leakage"):
            if getattr(tolerances, name) < 0:
                raise ConfigurationError(f"{name} tolerance must be nonnegative", field=f"{field}.{name}")
        if tolerances.trend_window < 1:
            raise ConfigurationError("trend_window must be positive", field=f"{field}.trend_window")
        return tolerances

    def to_config(self) -> Dict[str, Any]:
        return {"limit": self.limit, "membership": self.membership, "trend_window": self.trend_window,
                "leakage": self.leakage, "identity": self.identity}


@dataclass
class ScenarioConfig:
    """Everything one run needs; task blocks stay as parsed mappings."""
    task: str
    name: str
    operator: Optional[ShiftOperator] = None
    operator_power: int = 1
    subspace: PatternSubspace = field(default_factory=PatternSubspace.whole_space)
    schedule: PowerSchedule = field(default_factory=PowerSchedule)
    tolerances: Tolerances = field(default_factory=Tolerances)
    window: WindowPolicy = field(default_factory=WindowPolicy)
    seed: int = DEFAULT_SEED
    blocks: Dict[str, Any] = field(default_factory=dict)
    raw: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioConfig":
        """
        Validate a merged configuration mapping.

        Args:
            data: Mapping with a "task" key and the blocks that task needs

        Returns:
            ScenarioConfig

        Raises:
            ConfigurationError: naming the offending field
        """
        if not isinstance(data, dict):
            raise ConfigurationError("configuration must be a mapping")
        task = data.get("task")
        if task not in TASKS:
            raise ConfigurationError(f"unknown task {task!r} (choose from {', '.join(TASKS)})", field="task")
        missing = [block for block in REQUIRED_BLOCKS[task] if block not in data]
        if missing:
            raise ConfigurationError(f"task '{task}' needs the '{missing[0]}' block", field=missing[0])

        operator, power = None, 1
        if "operator" in data:
            operator = ShiftOperator.from_config(data["operator"])
            try:
                power = int(data["operator"].get("power", 1))
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"operator power must be an integer: {e}", field="operator.power") from e
            if power < 1:
                raise ConfigurationError("operator power must be positive", field="operator.power")

        window_block = data.get("window", {})
        tolerances = Tolerances.from_config(data.get("tolerances", {}))
        try:
            half_width = int(window_block.get("half_width", DEFAULT_HALF_WIDTH))
            seed = int(data.get("seed", DEFAULT_SEED))
        except (TypeError, ValueError, AttributeError) as e:
            raise ConfigurationError(f"malformed window or seed: {e}", field="window") from e

        return cls(
            task=task,
            name=str(data.get("name", task)),
            operator=operator,
            operator_power=power,
            subspace=PatternSubspace.from_config(data["subspace"]) if "subspace" in data
            else PatternSubspace.whole_space(),
            schedule=PowerSchedule.from_config(data["schedule"]) if "schedule" in data else PowerSchedule(),
            tolerances=tolerances,
            window=WindowPolicy(half_width, tolerances.leakage),
            seed=seed,
            blocks={k: v for k, v in data.items() if k not in ("operator", "subspace", "schedule", "tolerances",
                                                               "window", "seed", "task", "name")},
            raw=data,
        )

    def block(self, name: str) -> Dict[str, Any]:
        value = self.blocks.get(name, {})
        if not isinstance(value, dict):
            raise ConfigurationError(f"{name} block must be a mapping", field=name)
        return value

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "task": self.task,
            "name": self.name,
            "subspace": self.subspace.to_config(),
            "schedule": self.schedule.to_config(),
            "tolerances": self.tolerances.to_config(),
            "window": {"half_width": self.window.default_half_width},
            "seed": self.seed,
        }
        if self.operator is not None:
            data["operator"] = dict(self.operator.to_config(), power=self.operator_power)
        data.update(self.blocks)
        return data
