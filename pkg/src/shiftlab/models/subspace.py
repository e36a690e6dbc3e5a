"""
Coordinate (pattern) subspaces of l2(Z) and their orthogonal projections
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from shiftlab.exceptions import ConfigurationError


@dataclass(frozen=True)
class PatternSubspace:
    """
    Closed span of {e_n : n admissible}.

    An index n is admissible when (n mod modulus is a listed residue or n is an
    extra index) and n is not excluded; one-sided subspaces admit only n >= 0.
    """
    modulus: int = 1
    residues: Tuple[int, ...] = (0,)
    extra_indices: Tuple[int, ...] = ()
    excluded_indices: Tuple[int, ...] = ()
    one_sided: bool = False

    def __post_init__(self):
        if self.modulus < 1:
            raise ConfigurationError("modulus must be a positive integer", field="subspace.mod")
        object.__setattr__(self, "residues", tuple(sorted({int(r) % self.modulus for r in self.residues})))
        object.__setattr__(self, "extra_indices", tuple(sorted({int(i) for i in self.extra_indices})))
        object.__setattr__(self, "excluded_indices", tuple(sorted({int(i) for i in self.excluded_indices})))
        if set(self.extra_indices) & set(self.excluded_indices):
            raise ConfigurationError("an index cannot be both extra and excluded", field="subspace.excluded_indices")

    @classmethod
    def whole_space(cls, one_sided: bool = False) -> "PatternSubspace":
        return cls(1, (0,), one_sided=one_sided)

    @classmethod
    def zero(cls, one_sided: bool = False) -> "PatternSubspace":
        """The trivial subspace {0}: no admissible index."""
        return cls(1, (), one_sided=one_sided)

    @classmethod
    def even_zero(cls, one_sided: bool = False) -> "PatternSubspace":
        """Sequences with zeroes on the even entries (support on odd indices)."""
        return cls(2, (1,), one_sided=one_sided)

    @classmethod
    def odd_zero(cls, one_sided: bool = False) -> "PatternSubspace":
        """Sequences with zeroes on the odd entries (support on even indices)."""
        return cls(2, (0,), one_sided=one_sided)

    @classmethod
    def spanned_by(cls, indices: Iterable[int], one_sided: bool = False) -> "PatternSubspace":
        """Span of an explicit list of basis vectors {e_{m_r}}."""
        return cls(1, (), extra_indices=tuple(indices), one_sided=one_sided)

    @classmethod
    def from_config(cls, block: Dict[str, Any], field: str = "subspace") -> "PatternSubspace":
        if not isinstance(block, dict):
            raise ConfigurationError("subspace block must be a mapping", field=field)
        try:
            return cls(
                modulus=int(block.get("mod", 1)),
                residues=tuple(int(r) for r in block.get("residues", [])),
                extra_indices=tuple(int(i) for i in block.get("extra_indices", [])),
                excluded_indices=tuple(int(i) for i in block.get("excluded_indices", [])),
                one_sided=bool(block.get("one_sided", False)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed subspace block: {e}", field=field) from e

    def to_config(self) -> Dict[str, Any]:
        return {
            "mod": self.modulus,
            "residues": list(self.residues),
            "extra_indices": list(self.extra_indices),
            "excluded_indices": list(self.excluded_indices),
            "one_sided": self.one_sided,
        }

    def admissible_mask(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        mask = np.isin(np.mod(indices, self.modulus), self.residues)
        if self.extra_indices:
            mask |= np.isin(indices, self.extra_indices)
        if self.excluded_indices:
            mask &= ~np.isin(indices, self.excluded_indices)
        if self.one_sided:
            mask &= indices >= 0
        return mask

    def is_admissible(self, n: int) -> bool:
        return bool(self.admissible_mask(np.array([n]))[0])

    def admissible_in(self, lo: int, hi: int) -> np.ndarray:
        """Admissible indices inside the window [lo, hi]."""
        grid = np.arange(lo, hi + 1)
        return grid[self.admissible_mask(grid)]

    def complement(self) -> "PatternSubspace":
        """The pattern of the orthogonal complement."""
        residues = tuple(r for r in range(self.modulus) if r not in self.residues)
        return PatternSubspace(
            modulus=self.modulus,
            residues=residues,
            extra_indices=self.excluded_indices,
            excluded_indices=self.extra_indices,
            one_sided=self.one_sided,
        )

    def same_pattern(self, other: "PatternSubspace", lo: int, hi: int) -> bool:
        """Whether two patterns admit the same indices on [lo, hi]."""
        grid = np.arange(lo, hi + 1)
        return bool(np.array_equal(self.admissible_mask(grid), other.admissible_mask(grid)))


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection onto a pattern subspace, or onto its complement."""
    target: PatternSubspace
    complement: bool = False

    def keep_mask(self, indices: np.ndarray) -> np.ndarray:
        mask = self.target.admissible_mask(indices)
        if self.complement:
            # one-sided complement still lives in l2(N)
            mask = ~mask
            if self.target.one_sided:
                mask &= np.asarray(indices) >= 0
        return mask
