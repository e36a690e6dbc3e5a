"""
Service for projections onto pattern subspaces, membership and invariance checks
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from shiftlab.exceptions import DomainError
from shiftlab.models.lattice_vector import LatticeVector, WindowPolicy
from shiftlab.models.operators import DiagonalOperator, Operator, OperatorPower, ShiftOperator
from shiftlab.models.reports import CriterionReport, Verdict
from shiftlab.models.subspace import PatternSubspace, Projection
from shiftlab.utils.config import MEMBERSHIP_TOLERANCE

logger = logging.getLogger(__name__)


def project(P: Projection, v: LatticeVector) -> LatticeVector:
    """Zero the coefficients the projection does not keep; the window is unchanged."""
    keep = P.keep_mask(v.indices)
    return v.with_coeffs(np.where(keep, v.coeffs, 0))


def membership(v: LatticeVector, M: PatternSubspace, tol: float = MEMBERSHIP_TOLERANCE) -> Tuple[bool, float]:
    """
    Whether v lies in M up to tol.

    Args:
        v: Vector to test
        M: Pattern subspace
        tol: Largest off-pattern modulus still accepted

    Returns:
        (member, largest off-pattern coefficient modulus)
    """
    if tol < 0:
        raise DomainError(f"membership tolerance must be nonnegative, got {tol}")
    off = ~M.admissible_mask(v.indices)
    worst = float(np.abs(v.coeffs[off]).max()) if off.any() else 0.0
    return worst <= tol, worst


def _index_step(op: Operator, n: int) -> Optional[Tuple[int, bool]]:
    """Index displacement of op^n on basis vectors and whether it acts one-sidedly; None for diagonals."""
    if isinstance(op, DiagonalOperator):
        return None
    if isinstance(op, OperatorPower):
        return _index_step(op.base, n * op.exponent)
    if isinstance(op, ShiftOperator):
        return op.step * n, op.one_sided
    raise DomainError(f"unsupported operator type {type(op).__name__}")


def _check_window(M: PatternSubspace, displacement: int, policy: WindowPolicy) -> Tuple[int, int]:
    """A window wide enough to see every extra or excluded index and a few periods of the residues."""
    lo, hi = policy.bounds(M.one_sided)
    special = M.extra_indices + M.excluded_indices
    reach = abs(displacement) + 2 * M.modulus
    if special:
        lo = min(lo, min(special) - reach)
        hi = max(hi, max(special) + reach)
    lo, hi = lo - reach, hi + reach
    if M.one_sided:
        lo = max(lo, 0)
    return lo, hi


def invariance_check(op: Operator, n: int, M: PatternSubspace,
                     policy: Optional[WindowPolicy] = None) -> CriterionReport:
    """
    Decide op^n M ⊆ M from the index pattern.

    A shift moves e_m to a multiple of e_{m+d} with d = +n (forward) or -n
    (backward), so invariance means every admissible index stays admissible
    after moving by d. Images below 0 of a one-sided shift vanish and are
    ignored. Diagonal operators preserve every coordinate subspace.

    Args:
        op: Shift, diagonal operator or operator power
        n: Power, at least 1
        M: Pattern subspace
        policy: Window policy for the scanned index range

    Returns:
        CriterionReport with the first violating index and its image in details
    """
    if n < 1:
        raise DomainError(f"invariance power must be positive, got {n}")
    policy = policy or WindowPolicy()
    step = _index_step(op, n)
    details = {"n": n}
    if step is None:
        details["reason"] = "diagonal operator"
        return CriterionReport("invariance", Verdict.SATISFIED, details=details)

    displacement, one_sided = step
    lo, hi = _check_window(M, displacement, policy)
    details["window"] = [lo, hi]
    sources = M.admissible_in(lo, hi)
    images = sources + displacement
    relevant = images >= 0 if (one_sided or M.one_sided) else np.ones(images.shape, dtype=bool)
    bad = relevant & ~M.admissible_mask(images)
    if bad.any():
        # nonnegative indices first, then negative ones moving away from 0
        rank = np.where(sources >= 0, sources, hi - sources)
        candidates = np.flatnonzero(bad)
        first = int(candidates[np.argmin(rank[candidates])])
        details["first_violation"] = {"index": int(sources[first]), "image": int(images[first])}
        logger.debug(f"invariance fails at n={n}: {sources[first]} -> {images[first]}")
        return CriterionReport("invariance", Verdict.VIOLATED, details=details)
    return CriterionReport("invariance", Verdict.SATISFIED, details=details)


def power_step(M: PatternSubspace) -> int:
    """
    Smallest n >= 1 such that moving by n maps the residue classes of M into themselves.

    The modulus always qualifies.
    """
    residues = set(M.residues)
    for n in range(1, M.modulus + 1):
        if all((r + n) % M.modulus in residues for r in residues):
            return n
    return M.modulus


@dataclass(frozen=True)
class QuotientMap:
    """H -> H/M with classes represented by their M⊥ components."""
    subspace: PatternSubspace

    @property
    def complement(self) -> PatternSubspace:
        return self.subspace.complement()

    def class_of(self, v: LatticeVector) -> LatticeVector:
        """Representative of v + M."""
        return project(Projection(self.subspace, complement=True), v)

    def same_class(self, u: LatticeVector, v: LatticeVector, tol: float = MEMBERSHIP_TOLERANCE) -> bool:
        lo, hi = min(u.lo, v.lo), max(u.hi, v.hi)
        grid = np.arange(lo, hi + 1)
        difference = LatticeVector(lo, u.values_at(grid) - v.values_at(grid))
        return membership(difference, self.subspace, tol)[0]


def complement_and_quotient(M: PatternSubspace) -> Tuple[PatternSubspace, QuotientMap]:
    """M⊥ as a pattern subspace and the quotient map H -> H/M ≅ M⊥."""
    quotient = QuotientMap(M)
    return quotient.complement, quotient
