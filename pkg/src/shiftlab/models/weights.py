"""
Piecewise weight sequences {w_n} indexed by the integers
"""
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from shiftlab.exceptions import ConfigurationError

RULE_KINDS = ("ge", "lt", "range", "mod", "list", "default")

_COMPARISON = re.compile(r"^n\s*(>=|>|<=|<|==)\s*(-?\d+)$")
# "<n>=c" is the threshold form n >= c, paired with "<n><c"
_THRESHOLD = re.compile(r"^<n>\s*=\s*(-?\d+)$")
_MODULUS = re.compile(r"^mod\s+(\d+)\s+in\s+\[([-\d\s,]*)\]$")
_RANGE = re.compile(r"^range\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]$")
_LIST = re.compile(r"^in\s*\[([-\d\s,]*)\]$")


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


@dataclass(frozen=True)
class WeightRule:
    """
    One (predicate, value) pair of a weight sequence.

    `params` depends on `kind`: (c,) for ge/lt, (a, b) for range,
    (q, r_1, ..., r_s) for mod, the explicit indices for list, () for default.
    """
    kind: str
    params: Tuple[int, ...]
    value: float

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigurationError(f"unknown weight rule kind '{self.kind}'")
        if not np.isfinite(self.value) or self.value <= 0:
            raise ConfigurationError(f"weights must be positive and finite, got {self.value}")
        if self.kind == "mod" and (not self.params or self.params[0] < 1):
            raise ConfigurationError("modulus must be a positive integer")
        if self.kind == "range" and self.params[0] > self.params[1]:
            raise ConfigurationError(f"empty range [{self.params[0]}, {self.params[1]}]")

    @classmethod
    def parse(cls, condition: str, value: Any, field: str = "weights") -> "WeightRule":
        """
        Parse the textual form used in scenario files.

        Accepted conditions: "<n>=c" (n >= c), "n>=c", "n>c", "n<c", "n<=c",
        "n==c" ("<n>" is accepted for "n"), "mod q in [r, ...]",
        "range [a, b]", "in [i, j, ...]" and "default".
        """
        try:
            w = float(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"weight value must be a number, got {value!r}", field=f"{field}.w") from e
        text = str(condition).strip()
        try:
            match = _THRESHOLD.match(text)
            if match:
                return cls("ge", (int(match.group(1)),), w)
            text = text.replace("<n>", "n")
            if text == "default":
                return cls("default", (), w)
            match = _COMPARISON.match(text)
            if match:
                op, c = match.group(1), int(match.group(2))
                if op == ">=":
                    return cls("ge", (c,), w)
                if op == ">":
                    return cls("ge", (c + 1,), w)
                if op == "<":
                    return cls("lt", (c,), w)
                if op == "<=":
                    return cls("lt", (c + 1,), w)
                return cls("range", (c, c), w)
            match = _MODULUS.match(text)
            if match:
                q = int(match.group(1))
                residues = tuple(sorted({r % q for r in _int_list(match.group(2))})) if q > 0 else ()
                return cls("mod", (q,) + residues, w)
            match = _RANGE.match(text)
            if match:
                return cls("range", (int(match.group(1)), int(match.group(2))), w)
            match = _LIST.match(text)
            if match:
                return cls("list", tuple(sorted(set(_int_list(match.group(1))))), w)
        except ConfigurationError as e:
            raise ConfigurationError(str(e), field=field) from e
        raise ConfigurationError(f"cannot parse weight condition '{condition}'", field=f"{field}.if")

    def mask(self, indices: np.ndarray) -> np.ndarray:
        """Boolean mask of the indices this rule's predicate matches."""
        if self.kind == "default":
            return np.ones(indices.shape, dtype=bool)
        if self.kind == "ge":
            return indices >= self.params[0]
        if self.kind == "lt":
            return indices < self.params[0]
        if self.kind == "range":
            return (indices >= self.params[0]) & (indices <= self.params[1])
        if self.kind == "mod":
            return np.isin(np.mod(indices, self.params[0]), self.params[1:])
        return np.isin(indices, self.params)

    def shifted(self, offset: int) -> "WeightRule":
        """The rule matching n exactly when this one matches n + offset."""
        if self.kind == "ge":
            return WeightRule("ge", (self.params[0] - offset,), self.value)
        if self.kind == "lt":
            return WeightRule("lt", (self.params[0] - offset,), self.value)
        if self.kind == "range":
            return WeightRule("range", (self.params[0] - offset, self.params[1] - offset), self.value)
        if self.kind == "mod":
            q = self.params[0]
            residues = tuple(sorted({(r - offset) % q for r in self.params[1:]}))
            return WeightRule("mod", (q,) + residues, self.value)
        if self.kind == "list":
            return WeightRule("list", tuple(i - offset for i in self.params), self.value)
        return self

    def reflected(self) -> "WeightRule":
        """The rule matching n exactly when this one matches -n."""
        if self.kind == "ge":
            return WeightRule("lt", (1 - self.params[0],), self.value)
        if self.kind == "lt":
            return WeightRule("ge", (1 - self.params[0],), self.value)
        if self.kind == "range":
            return WeightRule("range", (-self.params[1], -self.params[0]), self.value)
        if self.kind == "mod":
            q = self.params[0]
            residues = tuple(sorted({(-r) % q for r in self.params[1:]}))
            return WeightRule("mod", (q,) + residues, self.value)
        if self.kind == "list":
            return WeightRule("list", tuple(sorted(-i for i in self.params)), self.value)
        return self

    def describe(self) -> str:
        if self.kind == "default":
            return "default"
        if self.kind == "ge":
            return f"n>={self.params[0]}"
        if self.kind == "lt":
            return f"n<{self.params[0]}"
        if self.kind == "range":
            return f"range [{self.params[0]}, {self.params[1]}]"
        if self.kind == "mod":
            return f"mod {self.params[0]} in [{', '.join(str(r) for r in self.params[1:])}]"
        return f"in [{', '.join(str(i) for i in self.params)}]"


@dataclass(frozen=True)
class WeightSequence:
    """
    Rule mapping every integer index to a positive weight.

    Rules are evaluated first-match-wins in declaration order.
    """
    rules: Tuple[WeightRule, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ConfigurationError("a weight sequence needs at least one rule")

    @classmethod
    def constant(cls, w: float) -> "WeightSequence":
        return cls((WeightRule("default", (), w),))

    @classmethod
    def split(cls, threshold: int, at_or_above: float, below: float) -> "WeightSequence":
        """w_n = at_or_above for n >= threshold, below otherwise."""
        return cls((WeightRule("ge", (threshold,), at_or_above), WeightRule("default", (), below)))

    @classmethod
    def from_config(cls, rules: Sequence[Dict[str, Any]], field: str = "operator.weights") -> "WeightSequence":
        """
        Parse a list of {"if": condition, "w": value} entries.

        The last entry must be the "default" rule so that every index is covered.
        """
        if not isinstance(rules, (list, tuple)) or not rules:
            raise ConfigurationError("weights must be a nonempty list of rules", field=field)
        parsed = []
        for i, rule in enumerate(rules):
            entry_field = f"{field}[{i}]"
            if not isinstance(rule, dict) or "if" not in rule or "w" not in rule:
                raise ConfigurationError("each weight rule needs 'if' and 'w'", field=entry_field)
            parsed.append(WeightRule.parse(rule["if"], rule["w"], field=entry_field))
        if parsed[-1].kind != "default":
            raise ConfigurationError("the last weight rule must be 'default'", field=f"{field}[{len(parsed) - 1}].if")
        return cls(tuple(parsed))

    def to_config(self) -> List[Dict[str, Any]]:
        return [{"if": rule.describe(), "w": rule.value} for rule in self.rules]

    def values(self, indices: np.ndarray) -> np.ndarray:
        """
        Weights at the given indices.

        Raises:
            ConfigurationError: if an index matches no rule
        """
        indices = np.asarray(indices, dtype=np.int64)
        out = np.full(indices.shape, np.nan)
        pending = np.ones(indices.shape, dtype=bool)
        for rule in self.rules:
            hit = pending & rule.mask(indices)
            out[hit] = rule.value
            pending &= ~hit
            if not pending.any():
                break
        if pending.any():
            gap = int(indices[pending].flat[0])
            raise ConfigurationError(f"no weight rule matches index {gap}", field="operator.weights")
        return out

    def __call__(self, n: int) -> float:
        return float(self.values(np.array([n]))[0])

    def shifted(self, offset: int) -> "WeightSequence":
        """The sequence v with v_n = w_{n + offset}."""
        return WeightSequence(tuple(rule.shifted(offset) for rule in self.rules))

    def reflected(self) -> "WeightSequence":
        """The sequence v with v_n = w_{-n}."""
        return WeightSequence(tuple(rule.reflected() for rule in self.rules))
