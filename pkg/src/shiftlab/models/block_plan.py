"""
Block layout for approximate M-hypercyclic vectors of scaled backward shifts
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from shiftlab.exceptions import ConfigurationError, DomainError
from shiftlab.models.lattice_vector import LatticeVector, parse_scalar


@dataclass(frozen=True)
class BlockPlan:
    """
    Targets t_j placed at powers n_j of lambda*B.

    Consecutive powers differ by more than the support span s of the
    targets; with a parity (q, r) every power is congruent to r mod q.
    """
    targets: Tuple[LatticeVector, ...]
    powers: Tuple[int, ...]
    lam: complex
    parity: Optional[Tuple[int, int]] = None
    epsilon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "powers", tuple(int(n) for n in self.powers))
        if abs(self.lam) <= 1:
            raise DomainError(f"|lambda| must exceed 1, got {self.lam}")
        if len(self.targets) != len(self.powers) or not self.targets:
            raise DomainError("a block plan needs one power per target and at least one target")
        if any(t.lo < 0 for t in self.targets):
            raise DomainError("targets must be supported in [0, s]")
        if self.powers[0] < 0:
            raise DomainError("powers must be nonnegative")
        s = self.span
        for n, m in zip(self.powers, self.powers[1:]):
            if m - n <= s:
                raise DomainError(f"blocks overlap: powers {n} and {m} are not more than s={s} apart")
        if self.parity is not None:
            q, r = self.parity
            bad = [n for n in self.powers if n % q != r % q]
            if bad:
                raise DomainError(f"powers {bad} violate the parity constraint {r} mod {q}")

    @property
    def span(self) -> int:
        """s: every target is supported in [0, s]."""
        return max(t.hi for t in self.targets)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "targets": [t.to_dict() for t in self.targets],
            "powers": list(self.powers),
            "lambda": self.lam,
            "parity": list(self.parity) if self.parity else None,
            "epsilon": self.epsilon,
            "span": self.span,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], field: str = "plan") -> "BlockPlan":
        """Load a plan written by to_dict; extra keys are ignored."""
        if not isinstance(data, dict):
            raise ConfigurationError("plan must be a mapping", field=field)
        try:
            targets = tuple(LatticeVector.from_dict(t, f"{field}.targets[{i}]") for i, t in enumerate(data["targets"]))
            lam = parse_scalar(data["lambda"])
            epsilon = data.get("epsilon")
            return cls(
                targets=tuple(LatticeVector(t.lo, t.coeffs, True) if t.lo >= 0 else t for t in targets),
                powers=tuple(int(n) for n in data["powers"]),
                lam=lam.real if lam.imag == 0 else lam,
                parity=tuple(int(q) for q in data["parity"]) if data.get("parity") else None,
                epsilon=float(epsilon) if epsilon is not None else None,
            )
        except ConfigurationError:
            raise
        except KeyError as e:
            raise ConfigurationError(f"plan needs {e}", field=field) from e
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed plan: {e}", field=field) from e


def tail_bound_list(plan: BlockPlan, target_norms: List[float]) -> List[float]:
    """sum_{l > j} |lambda|^(n_j - n_l) * ||t_l|| for every j."""
    bounds = []
    for j, n_j in enumerate(plan.powers):
        total = 0.0
        for n_l, t_norm in zip(plan.powers[j + 1:], target_norms[j + 1:]):
            total += abs(plan.lam) ** (n_j - n_l) * t_norm
        bounds.append(total)
    return bounds
