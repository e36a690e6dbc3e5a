"""
Service for orbit generation, orbit-in-subspace filtering, coverage and the
compression / quotient orbit identities
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from shiftlab.exceptions import DomainError, PreconditionError
from shiftlab.models.lattice_vector import LatticeVector, WindowPolicy
from shiftlab.models.operators import Operator, OperatorPower, ShiftOperator
from shiftlab.models.orbit_trace import (CoverageReport, IdentityReport, InclusionReport, OrbitTrace, PowerCheck,
                                         TargetHit)
from shiftlab.models.subspace import PatternSubspace, Projection
from shiftlab.services import seqspace
from shiftlab.services.shift_ops import operator_power_apply
from shiftlab.services.subspace_ops import invariance_check, membership, project
from shiftlab.utils.config import IDENTITY_TOLERANCE, MEMBERSHIP_TOLERANCE, OVERFLOW_MODULUS

logger = logging.getLogger(__name__)


def _is_one_sided(op: Operator) -> bool:
    if isinstance(op, OperatorPower):
        return _is_one_sided(op.base)
    return isinstance(op, ShiftOperator) and op.one_sided


def orbit(op: Operator, x: LatticeVector, N: int, policy: Optional[WindowPolicy] = None,
          progress: bool = False) -> OrbitTrace:
    """
    Points op^n x for n = 0..N on the policy's hard window.

    Each point is computed directly from x through the power formula. Mass
    pushed outside the window is cut and recorded as leakage.

    Args:
        op: Shift, diagonal operator or operator power
        x: Base point
        N: Largest power, at least 1
        policy: Truncation window and leakage tolerance
        progress: Show a progress bar

    Returns:
        OrbitTrace with N + 1 points
    """
    if N < 1:
        raise DomainError(f"orbit length must be positive, got {N}")
    policy = policy or WindowPolicy()
    lo, hi = policy.bounds_covering([x], x.one_sided or _is_one_sided(op))

    points, leakage = [], []
    overflow = False
    for n in tqdm(range(N + 1), desc="orbit", disable=not progress):
        with np.errstate(over="ignore", invalid="ignore"):
            point, leaked = seqspace.truncate(operator_power_apply(op, n, x), lo, hi)
        moduli = np.abs(point.coeffs)
        if not np.all(np.isfinite(moduli)) or moduli.max() > OVERFLOW_MODULUS:
            if not overflow:
                logger.warning(f"orbit coefficients exceed {OVERFLOW_MODULUS:g} at power {n}")
            overflow = True
        if leaked > policy.leakage_tolerance:
            logger.debug(f"power {n} leaked {leaked:.3e} outside [{lo}, {hi}]")
        points.append(point)
        leakage.append(leaked)

    trace = OrbitTrace(x, list(range(N + 1)), points, leakage, policy.leakage_tolerance, overflow, (lo, hi))
    untrusted = trace.trusted.count(False)
    if untrusted:
        logger.warning(f"{untrusted} of {len(trace)} orbit points leaked more than {policy.leakage_tolerance:g}")
    return trace


def orbit_in_M(tr: OrbitTrace, M: PatternSubspace, tol: float = MEMBERSHIP_TOLERANCE) -> OrbitTrace:
    """The points of the trace that lie in M, powers preserved."""
    return tr.subset([membership(point, M, tol)[0] for point in tr.points])


def projected_orbit_inclusion(tr: OrbitTrace, M: PatternSubspace,
                              tol: float = MEMBERSHIP_TOLERANCE) -> InclusionReport:
    """
    Check Orb ∩ M ⊆ P(Orb) ∩ M point by point.

    Every point that passes membership must coincide with its own projection
    up to tol * sqrt(window size). Points outside M are reported with their
    projection norm and count as holding.
    """
    P = Projection(M)
    checks = []
    for n, point in zip(tr.powers, tr.points):
        inside, _ = membership(point, M, tol)
        projected = project(P, point)
        deviation = seqspace.distance(point, projected)
        bound = tol * np.sqrt(point.coeffs.size)
        checks.append(PowerCheck(
            power=n,
            in_subspace=inside,
            projected_norm=seqspace.norm(projected),
            deviation=deviation,
            holds=(not inside) or deviation <= bound,
        ))
    return InclusionReport(checks, tol)


def _stack(vectors: Sequence[LatticeVector], lo: int, hi: int) -> np.ndarray:
    grid = np.arange(lo, hi + 1)
    return np.stack([v.values_at(grid) for v in vectors])


def coverage(tr: OrbitTrace, M: PatternSubspace, targets: Sequence[LatticeVector], epsilon: float,
             projected: bool = False) -> CoverageReport:
    """
    Epsilon-coverage of targets in M by the trusted points of the trace.

    Args:
        tr: Orbit trace
        M: Subspace holding the targets
        targets: Finitely supported vectors of M
        epsilon: Coverage radius
        projected: Measure distances to the projections P_M of the orbit points

    Returns:
        CoverageReport with the best distance and power per target
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    for j, target in enumerate(targets):
        inside, worst = membership(target, M, 0.0)
        if not inside:
            raise PreconditionError(f"target {j} is not in the subspace (off-pattern modulus {worst:.3g})")

    usable = tr.subset(tr.trusted)
    points = usable.points
    if projected:
        points = [project(Projection(M), v) for v in points]
    if not points or not targets:
        hits = [TargetHit(float("inf"), -1) for _ in targets]
        return CoverageReport(list(targets), epsilon, hits, len(points), tr.window, projected)

    lo = min(v.lo for v in list(points) + list(targets))
    hi = max(v.hi for v in list(points) + list(targets))
    orbit_matrix = _stack(points, lo, hi)
    hits = []
    for row in _stack(targets, lo, hi):
        distances = np.linalg.norm(orbit_matrix - row, axis=1)
        best = int(np.argmin(distances))
        hits.append(TargetHit(float(distances[best]), int(usable.powers[best])))
    report = CoverageReport(list(targets), epsilon, hits, len(points), tr.window, projected)
    logger.info(f"coverage at epsilon={epsilon:g} over {len(points)} points: score {report.score:.3f}")
    return report


def coverage_curve(tr: OrbitTrace, M: PatternSubspace, targets: Sequence[LatticeVector], epsilon: float,
                   checkpoints: Sequence[int], projected: bool = False) -> List[Tuple[int, float]]:
    """Coverage score of the orbit prefixes with powers up to each checkpoint."""
    curve = []
    for N in sorted(checkpoints):
        prefix = tr.subset([n <= N for n in tr.powers])
        curve.append((int(N), coverage(prefix, M, targets, epsilon, projected).score))
    return curve


def _require_invariant(op: Operator, M: PatternSubspace, policy: Optional[WindowPolicy], name: str):
    report = invariance_check(op, 1, M, policy)
    if not report.satisfied:
        raise PreconditionError(
            f"{name} is not invariant under the operator "
            f"(first violation {report.details.get('first_violation')})")


def compression_orbit_identity(op: Operator, x: LatticeVector, Mperp: PatternSubspace, N: int,
                               tol: float = IDENTITY_TOLERANCE,
                               policy: Optional[WindowPolicy] = None) -> IdentityReport:
    """
    Compare the orbit of the compression PT with the projected orbit of T.

    Left side: apply op, then project onto M⊥, N times in a row. Right side:
    project op^n x onto M⊥. Both must agree pointwise up to tol relative.

    Raises:
        PreconditionError: if M⊥ is not invariant under op or x is not in M⊥
    """
    if N < 1:
        raise DomainError(f"orbit length must be positive, got {N}")
    _require_invariant(op, Mperp, policy, "M⊥")
    inside, worst = membership(x, Mperp, 0.0)
    if not inside:
        raise PreconditionError(f"x is not in M⊥ (off-pattern modulus {worst:.3g})")

    P = Projection(Mperp)
    compressed = x
    powers, deviations, supports = [], [], []
    for n in range(N + 1):
        if n > 0:
            compressed = project(P, operator_power_apply(op, 1, compressed))
        direct = project(P, operator_power_apply(op, n, x))
        scale = max(seqspace.norm(direct), 1.0)
        powers.append(n)
        deviations.append(seqspace.distance(compressed, direct) / scale)
        supports.append(set(compressed.support().tolist()) == set(direct.support().tolist()))
    report = IdentityReport("compression", powers, deviations, tol, supports)
    logger.info(f"compression identity over {N} powers: max deviation {report.max_deviation:.3e}")
    return report


def quotient_orbit(op: Operator, x: LatticeVector, M: PatternSubspace, N: int,
                   policy: Optional[WindowPolicy] = None) -> OrbitTrace:
    """
    Orbit of the class x + M under the induced quotient operator.

    Classes are represented by their M⊥ components, so point n is
    P_{M⊥} op^n x.

    Raises:
        PreconditionError: if M or M⊥ is not invariant under op
    """
    if N < 1:
        raise DomainError(f"orbit length must be positive, got {N}")
    Mperp = M.complement()
    _require_invariant(op, M, policy, "M")
    _require_invariant(op, Mperp, policy, "M⊥")
    P = Projection(M, complement=True)
    points = [project(P, operator_power_apply(op, n, x)) for n in range(N + 1)]
    lo = min(v.lo for v in points)
    hi = max(v.hi for v in points)
    return OrbitTrace(x, list(range(N + 1)), points, [0.0] * len(points), 0.0, False, (lo, hi))


def compare_traces(name: str, left: OrbitTrace, right: OrbitTrace, tol: float = IDENTITY_TOLERANCE) -> IdentityReport:
    """Pointwise comparison of two traces over their common powers."""
    by_power = dict(zip(right.powers, right.points))
    powers, deviations, supports = [], [], []
    for n, point in zip(left.powers, left.points):
        if n not in by_power:
            continue
        other = by_power[n]
        powers.append(n)
        deviations.append(seqspace.distance(point, other) / max(seqspace.norm(other), 1.0))
        supports.append(set(point.support().tolist()) == set(other.support().tolist()))
    return IdentityReport(name, powers, deviations, tol, supports)


def compression_trace(op: Operator, x: LatticeVector, Mperp: PatternSubspace, N: int) -> OrbitTrace:
    """Orbit of P x under the compression P T P, computed step by step."""
    P = Projection(Mperp)
    point = project(P, x)
    points = [point]
    for _ in range(N):
        point = project(P, operator_power_apply(op, 1, point))
        points.append(point)
    lo = min(v.lo for v in points)
    hi = max(v.hi for v in points)
    return OrbitTrace(x, list(range(N + 1)), points, [0.0] * len(points), 0.0, False, (lo, hi))
