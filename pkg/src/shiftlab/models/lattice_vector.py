"""
Finitely supported vectors of l2(Z) and l2(N) on an integer window
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from shiftlab.exceptions import ConfigurationError, DomainError
from shiftlab.utils.config import DEFAULT_HALF_WIDTH, LEAKAGE_TOLERANCE


@dataclass(frozen=True, eq=False)
class LatticeVector:
    """
    Vector of complex coefficients on the closed window [lo, hi].

    Indices outside the window read as zero. When `one_sided` is set the
    vector lives in l2(N) and no coefficient may sit at a negative index.
    """
    lo: int
    coeffs: np.ndarray
    one_sided: bool = False

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if coeffs.size == 0:
            raise DomainError("a lattice vector needs at least one coefficient")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lo", int(self.lo))
        if self.one_sided and self.lo < 0:
            negative = coeffs[: min(-self.lo, coeffs.size)]
            if np.any(negative != 0):
                raise DomainError("one-sided vector has a nonzero coefficient at a negative index")
            object.__setattr__(self, "coeffs", coeffs[-self.lo:] if -self.lo < coeffs.size else np.zeros(1, np.complex128))
            object.__setattr__(self, "lo", 0)
            self.coeffs.setflags(write=False)

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @classmethod
    def zeros(cls, lo: int = 0, hi: int = 0, one_sided: bool = False) -> "LatticeVector":
        if hi < lo:
            raise DomainError(f"empty window [{lo}, {hi}]")
        return cls(lo, np.zeros(hi - lo + 1, dtype=np.complex128), one_sided)

    @classmethod
    def basis(cls, n: int, scale: complex = 1.0, one_sided: bool = False) -> "LatticeVector":
        """The basis vector scale * e_n."""
        return cls(n, np.array([scale], dtype=np.complex128), one_sided)

    @classmethod
    def from_terms(cls, terms: Dict[int, complex], one_sided: bool = False) -> "LatticeVector":
        """
        Build a vector from an {index: coefficient} mapping.

        Args:
            terms: Nonempty mapping from integer index to coefficient
            one_sided: Whether the vector lives in l2(N)

        Returns:
            The vector on the smallest window holding every index
        """
        if not terms:
            return cls.zeros(one_sided=one_sided)
        lo, hi = min(terms), max(terms)
        coeffs = np.zeros(hi - lo + 1, dtype=np.complex128)
        for index, value in terms.items():
            coeffs[index - lo] = value
        return cls(lo, coeffs, one_sided)

    def at(self, n: int) -> complex:
        """Coefficient at index n (zero outside the window)."""
        if self.lo <= n <= self.hi:
            return complex(self.coeffs[n - self.lo])
        return 0j

    def values_at(self, indices: np.ndarray) -> np.ndarray:
        """Coefficients at many indices at once; outside the window reads as zero."""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros(indices.shape, dtype=np.complex128)
        inside = (indices >= self.lo) & (indices <= self.hi)
        out[inside] = self.coeffs[indices[inside] - self.lo]
        return out

    def rewindow(self, lo: int, hi: int) -> "LatticeVector":
        """
        Re-express the vector on [lo, hi].

        Coefficients outside the new window are dropped; callers that need the
        dropped mass use seqspace.truncate instead.
        """
        if hi < lo:
            raise DomainError(f"empty window [{lo}, {hi}]")
        if self.one_sided:
            lo = max(lo, 0)
            hi = max(hi, lo)
        return LatticeVector(lo, self.values_at(np.arange(lo, hi + 1)), self.one_sided)

    def support(self, tol: float = 0.0) -> np.ndarray:
        """Indices whose coefficient modulus exceeds tol."""
        return self.indices[np.abs(self.coeffs) > tol]

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def with_coeffs(self, coeffs: np.ndarray) -> "LatticeVector":
        """Same window and sidedness, new coefficients."""
        return LatticeVector(self.lo, coeffs, self.one_sided)

    def allclose(self, other: "LatticeVector", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        """Coefficientwise comparison over the union of both windows."""
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        grid = np.arange(lo, hi + 1)
        return bool(np.allclose(self.values_at(grid), other.values_at(grid), atol=atol, rtol=rtol))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": self.lo,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "one_sided": self.one_sided,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], field_name: str = "vector") -> "LatticeVector":
        """
        Parse a vector literal {"lo": int, "coeffs": [[re, im], ...]}.

        Plain numbers are accepted for real coefficients.
        """
        if not isinstance(data, dict) or "lo" not in data or "coeffs" not in data:
            raise ConfigurationError("vector literal needs 'lo' and 'coeffs'", field=field_name)
        try:
            lo = int(data["lo"])
            coeffs = [parse_scalar(c) for c in data["coeffs"]]
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"malformed vector literal: {e}", field=field_name) from e
        if not coeffs:
            raise ConfigurationError("vector literal has no coefficients", field=field_name)
        return cls(lo, np.array(coeffs, dtype=np.complex128), bool(data.get("one_sided", False)))

    def __repr__(self) -> str:
        terms = ", ".join(f"{n}: {c:.6g}" for n, c in zip(self.indices, self.coeffs) if c != 0)
        return f"LatticeVector([{self.lo}, {self.hi}]{' one-sided' if self.one_sided else ''} {{{terms}}})"


def scaled_norm(coeffs: np.ndarray) -> float:
    """l2 norm of a coefficient array, scaled by its peak so large coefficients do not overflow."""
    moduli = np.abs(coeffs)
    peak = float(moduli.max()) if moduli.size else 0.0
    if peak == 0.0 or not np.isfinite(peak):
        return peak
    return peak * float(np.sqrt(np.sum((moduli / peak) ** 2)))


def parse_scalar(value: Any) -> complex:
    """Parse a number or an [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex literal must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


@dataclass(frozen=True)
class WindowPolicy:
    """Truncation of the infinite-dimensional space for orbit computations."""
    default_half_width: int = DEFAULT_HALF_WIDTH
    leakage_tolerance: float = LEAKAGE_TOLERANCE

    def __post_init__(self):
        if self.default_half_width < 1:
            raise ConfigurationError("half width must be positive", field="window.half_width")
        if self.leakage_tolerance < 0:
            raise ConfigurationError("leakage tolerance must be nonnegative", field="tolerances.leakage")

    def bounds(self, one_sided: bool = False) -> Tuple[int, int]:
        """The hard window [lo, hi] of the truncated space."""
        if one_sided:
            return 0, 2 * self.default_half_width
        return -self.default_half_width, self.default_half_width

    def bounds_covering(self, vectors: Iterable[LatticeVector], one_sided: bool = False) -> Tuple[int, int]:
        """The policy window, widened so that every given vector fits."""
        lo, hi = self.bounds(one_sided)
        for v in vectors:
            lo, hi = min(lo, v.lo), max(hi, v.hi)
        return lo, hi
