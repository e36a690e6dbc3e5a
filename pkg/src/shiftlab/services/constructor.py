"""
Service for building approximate M-hypercyclic vectors of scaled backward shifts lambda*B
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from shiftlab.exceptions import DomainError, PreconditionError
from shiftlab.models.block_plan import BlockPlan, tail_bound_list
from shiftlab.models.lattice_vector import LatticeVector
from shiftlab.models.operators import Direction, ShiftOperator
from shiftlab.models.subspace import PatternSubspace
from shiftlab.models.weights import WeightSequence
from shiftlab.services import seqspace
from shiftlab.services.subspace_ops import membership, power_step

logger = logging.getLogger(__name__)


def scaled_backward_shift(lam: complex) -> ShiftOperator:
    """lambda*B on l2(N): e_n -> lambda e_{n-1}, e_0 -> 0; the sign or phase of lambda rides on the operator."""
    if abs(lam) <= 1:
        raise DomainError(f"|lambda| must exceed 1, got {lam}")
    return ShiftOperator(Direction.BACKWARD, WeightSequence.constant(abs(lam)), one_sided=True,
                         phase=lam / abs(lam))


def build_vector(plan: BlockPlan) -> Tuple[LatticeVector, List[float]]:
    """
    x = sum_j lambda^{-n_j} t_j moved right by n_j.

    Then (lambda B)^{n_j} x = t_j + tail_j: earlier blocks fall off the edge at
    index 0 and later ones are damped by lambda^{n_j - n_l}.

    Args:
        plan: Targets, powers and lambda

    Returns:
        The vector x and the certified bound on every ||tail_j||
    """
    x = LatticeVector.zeros(0, 0, one_sided=True)
    for target, n in zip(plan.targets, plan.powers):
        block = seqspace.translate(LatticeVector(target.lo, target.coeffs, True), n)
        x = seqspace.axpy(plan.lam ** (-n), block, x)
    bounds = tail_bound_list(plan, [seqspace.norm(t) for t in plan.targets])
    logger.debug(f"built vector on [{x.lo}, {x.hi}] for {len(plan.targets)} targets")
    return x, bounds


def required_gap(lam: complex, epsilon: float, largest_norm: float = 1.0) -> int:
    """
    Smallest g with largest_norm * r / (1 - r) <= epsilon / 2 for r = |lambda|^{-g}.

    The geometric series bounds every tail when consecutive powers are at least g apart.
    The boundary is inclusive and minimal: epsilon = 1e-3 gives 11 for lambda = 2
    and 764 for lambda = 1.01, where ceil(log(2 / epsilon) / log|lambda|) is also 764.
    Any larger gap, such as the rounded-up 765, certifies as well.
    """
    if abs(lam) <= 1:
        raise DomainError(f"|lambda| must exceed 1, got {lam}")
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if largest_norm == 0:
        return 1
    budget = epsilon / (2.0 * largest_norm)
    # r / (1 - r) <= budget  <=>  r <= budget / (1 + budget)
    g = max(1, math.ceil(math.log((1.0 + budget) / budget) / math.log(abs(lam))))
    while largest_norm * abs(lam) ** (-g) / (1.0 - abs(lam) ** (-g)) > epsilon / 2.0:
        g += 1
    return g


def plan_for_coverage(targets: Sequence[LatticeVector], M: PatternSubspace, lam: complex, epsilon: float,
                      first_power: Optional[int] = None) -> BlockPlan:
    """
    Choose evenly spaced powers so that every tail bound is at most epsilon / 2.

    Powers respect the step that keeps the residue pattern of M in place, so
    the built vector lies in M and every (lambda B)^{n_j} maps M into itself.

    Args:
        targets: Vectors of M supported in [0, s]
        M: One-sided pattern subspace
        lam: Scaling, |lambda| > 1
        epsilon: Coverage radius
        first_power: Power of the first block; one spacing when omitted

    Returns:
        BlockPlan with parity (step, 0)
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if abs(lam) <= 1:
        raise DomainError(f"|lambda| must exceed 1, got {lam}")
    if not targets:
        raise DomainError("at least one target is needed")
    for j, target in enumerate(targets):
        inside, worst = membership(target, M, 0.0)
        if not inside:
            raise PreconditionError(f"target {j} is not in the subspace (off-pattern modulus {worst:.3g})")

    span = max(t.hi for t in targets)
    step = power_step(M)
    largest = max(seqspace.norm(t) for t in targets)
    spacing = span + required_gap(lam, epsilon, largest)
    spacing = int(math.ceil(spacing / step) * step)
    start = spacing if first_power is None else int(first_power)
    if start % step:
        raise DomainError(f"first power {start} is not a multiple of the step {step}")
    powers = [start + j * spacing for j in range(len(targets))]
    logger.info(f"block plan: spacing {spacing} (span {span}, step {step}) for {len(targets)} targets")
    return BlockPlan(tuple(targets), tuple(powers), lam, parity=(step, 0), epsilon=epsilon)


def random_targets(rng: np.random.Generator, M: PatternSubspace, count: int, span: int,
                   complex_values: bool = False) -> List[LatticeVector]:
    """Unit-norm random vectors of M supported in [0, span]."""
    mask = M.admissible_mask(np.arange(0, span + 1))
    if not mask.any():
        raise PreconditionError(f"the subspace has no admissible index in [0, {span}]")
    targets = []
    for _ in range(count):
        v = seqspace.random_vector(rng, 0, span, one_sided=True, complex_values=complex_values, mask=mask)
        targets.append(seqspace.scale(1.0 / seqspace.norm(v), v))
    return targets
