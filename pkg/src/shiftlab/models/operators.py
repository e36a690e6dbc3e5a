"""
Operators acting on lattice vectors: weighted shifts, diagonal stand-ins, powers
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Tuple, Union

import numpy as np

from shiftlab.exceptions import ConfigurationError, DomainError
from shiftlab.models.lattice_vector import parse_scalar
from shiftlab.models.weights import WeightSequence
from shiftlab.utils.config import INVERTIBILITY_FLOOR, MAX_POWER


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def step(self) -> int:
        return 1 if self is Direction.FORWARD else -1


@dataclass(frozen=True)
class ShiftOperator:
    """
    Weighted shift: forward T e_n = w_n e_{n+1}, backward T e_n = w_n e_{n-1}.

    With `one_sided` the shift acts on l2(N): a backward shift annihilates e_0.
    A unimodular `phase` multiplies every application, so lambda*B with a
    negative or complex lambda is phase * |lambda| B. Weight products stay positive.
    """
    direction: Direction
    weights: WeightSequence
    invertible: bool = True
    invertibility_floor: float = INVERTIBILITY_FLOOR
    max_power: int = MAX_POWER
    one_sided: bool = False
    phase: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "phase", complex(self.phase))
        if not np.isclose(abs(self.phase), 1.0, rtol=0.0, atol=1e-12):
            raise ConfigurationError(f"phase must have modulus 1, got {self.phase}", field="operator.phase")
        if self.invertibility_floor <= 0:
            raise ConfigurationError("invertibility floor must be positive", field="operator.invertibility_floor")
        if self.max_power < 1:
            raise ConfigurationError("max_power must be positive", field="operator.max_power")

    @property
    def step(self) -> int:
        return self.direction.step

    @classmethod
    def from_config(cls, block: Dict[str, Any], field: str = "operator") -> "ShiftOperator":
        if not isinstance(block, dict):
            raise ConfigurationError("operator block must be a mapping", field=field)
        direction = block.get("direction", "forward")
        if direction not in (d.value for d in Direction):
            raise ConfigurationError(f"direction must be forward or backward, got {direction!r}", field=f"{field}.direction")
        if "weights" not in block:
            raise ConfigurationError("operator block needs 'weights'", field=f"{field}.weights")
        try:
            phase = parse_scalar(block.get("phase", 1.0))
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed phase: {e}", field=f"{field}.phase") from e
        return cls(
            direction=Direction(direction),
            weights=WeightSequence.from_config(block["weights"], field=f"{field}.weights"),
            invertible=bool(block.get("invertible", True)),
            invertibility_floor=float(block.get("invertibility_floor", INVERTIBILITY_FLOOR)),
            max_power=int(block.get("max_power", MAX_POWER)),
            one_sided=bool(block.get("one_sided", False)),
            phase=phase,
        )

    def to_config(self) -> Dict[str, Any]:
        config = {
            "direction": self.direction.value,
            "weights": self.weights.to_config(),
            "invertible": self.invertible,
            "invertibility_floor": self.invertibility_floor,
            "max_power": self.max_power,
            "one_sided": self.one_sided,
        }
        if self.phase != 1:
            config["phase"] = [self.phase.real, self.phase.imag]
        return config


@dataclass(frozen=True)
class DiagonalOperator:
    """Acts on e_k as lambda_k e_k for listed indices and as zero elsewhere."""
    eigenpairs: Tuple[Tuple[int, complex], ...]

    def __post_init__(self):
        pairs = tuple((int(k), complex(lam)) for k, lam in self.eigenpairs)
        indices = [k for k, _ in pairs]
        if len(set(indices)) != len(indices):
            raise DomainError("diagonal operator indices must be distinct")
        object.__setattr__(self, "eigenpairs", tuple(sorted(pairs)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, complex]]) -> "DiagonalOperator":
        return cls(tuple(pairs))

    @property
    def indices(self) -> np.ndarray:
        return np.array([k for k, _ in self.eigenpairs], dtype=np.int64)

    def eigenvalue(self, k: int) -> complex:
        for index, lam in self.eigenpairs:
            if index == k:
                return lam
        raise DomainError(f"index {k} is not an eigenvector index of the diagonal operator")


@dataclass(frozen=True)
class OperatorPower:
    """The operator base^exponent, e.g. T^2 of a weighted shift."""
    base: Union[ShiftOperator, DiagonalOperator]
    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise DomainError("operator power exponent must be positive")


Operator = Union[ShiftOperator, DiagonalOperator, OperatorPower]
