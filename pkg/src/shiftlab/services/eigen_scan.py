"""
Service for scanning eigenvector candidates of shift powers T^p x = lambda x
"""
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from shiftlab.exceptions import ConfigurationError, DomainError, PreconditionError
from shiftlab.models.lattice_vector import LatticeVector
from shiftlab.models.operators import Direction, ShiftOperator
from shiftlab.models.reports import EigenScanResult, EigenVerdict, WindowNorm
from shiftlab.models.subspace import PatternSubspace
from shiftlab.services import seqspace
from shiftlab.services.shift_ops import apply_power
from shiftlab.services.subspace_ops import membership
from shiftlab.utils.config import (DIVERGENCE_GROWTH, DIVERGENCE_RUN, HALF_WIDTHS, MEMBERSHIP_TOLERANCE,
                                   STABILITY_TOLERANCE)

logger = logging.getLogger(__name__)

DISCREPANCY_NOTE = (
    "The candidate's coefficients form two geometric tails with ratios right_ratio and left_ratio; "
    "both the l2 norm and the coefficient sum stay finite whenever both ratios have modulus below 1, "
    "which for the split 1/2 | 3 weights and p = 2 means 1/4 < |lambda| < 9. Verdicts here come from "
    "the computed norms and do not assume that the shift power has no eigenvalues."
)

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

_ANNULUS = re.compile(r"^\s*annulus\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*,\s*(\d+)\s*(?:points)?\s*\)\s*$")


def annulus_grid(r_min: float, r_max: float, count: int) -> List[complex]:
    """
    Deterministic grid on the annulus r_min <= |lambda| <= r_max.

    Radii are log-spaced and include both ends; phases advance by the golden angle.
    """
    if not 0 < r_min <= r_max:
        raise DomainError(f"annulus needs 0 < r_min <= r_max, got {r_min}, {r_max}")
    if count < 1:
        raise DomainError("annulus grid needs at least one point")
    radii = np.geomspace(r_min, r_max, count)
    phases = GOLDEN_ANGLE * np.arange(count)
    return [complex(r * np.cos(t), r * np.sin(t)) for r, t in zip(radii, phases)]


def parse_grid(source) -> List[complex]:
    """
    Parse a lambda grid: "annulus(r_min, r_max, N points)" or a list of scalars / [re, im] pairs.
    """
    if isinstance(source, str):
        match = _ANNULUS.match(source)
        if not match:
            raise ConfigurationError(f"cannot parse grid {source!r}", field="eigen_scan.grid")
        try:
            return annulus_grid(float(match.group(1)), float(match.group(2)), int(match.group(3)))
        except ValueError as e:
            raise ConfigurationError(f"cannot parse grid {source!r}: {e}", field="eigen_scan.grid") from e
    try:
        if isinstance(source, dict):
            block = source["annulus"]
            return annulus_grid(float(block["r_min"]), float(block["r_max"]), int(block["count"]))
        grid = []
        for value in source:
            if isinstance(value, (list, tuple)):
                grid.append(complex(float(value[0]), float(value[1])))
            else:
                grid.append(complex(value))
        return grid
    except (TypeError, ValueError, IndexError, KeyError) as e:
        raise ConfigurationError(f"malformed grid: {e}", field="eigen_scan.grid") from e


def default_anchor(M: PatternSubspace, reach: int) -> int:
    """Admissible index nearest 0, ties going to the negative side."""
    admissible = M.admissible_in(-reach, reach)
    if admissible.size == 0:
        raise PreconditionError(f"the subspace has no admissible index in [{-reach}, {reach}]")
    order = np.lexsort((admissible, np.abs(admissible)))
    return int(admissible[order[0]])


def _step_factors(T: ShiftOperator, p: int, starts: np.ndarray) -> np.ndarray:
    """phase^p prod_{j=n}^{n+p-1} w_j for every chain start n."""
    offsets = starts[:, None] + np.arange(p)[None, :]
    factors = T.weights.values(offsets.reshape(-1)).reshape(offsets.shape).prod(axis=1)
    return factors if T.phase == 1 else factors * T.phase ** p


def eigen_candidate(T: ShiftOperator, p: int, lam: complex, anchor: int, half_width: int) -> LatticeVector:
    """
    Candidate x for T^p x = lambda x on [anchor - half_width, anchor + half_width].

    x_anchor = 1, x_{n+p} = (prod_{j=n}^{n+p-1} w_j / lambda) x_n to the right and
    the inverse recurrence to the left; indices off the anchor's chain are zero.
    """
    lo, hi = anchor - half_width, anchor + half_width
    coeffs = np.zeros(hi - lo + 1, dtype=np.complex128)
    right = np.arange(anchor, hi - p + 1, p)
    left = np.arange(anchor - p, lo - 1, -p)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        coeffs[anchor - lo] = 1.0
        if right.size:
            coeffs[right + p - lo] = np.cumprod(_step_factors(T, p, right) / lam)
        if left.size:
            coeffs[left - lo] = np.cumprod(lam / _step_factors(T, p, left))
    return LatticeVector(lo, coeffs)


def _norm_verdict(values: Sequence[float]) -> EigenVerdict:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return EigenVerdict.INCONCLUSIVE
    if not np.isfinite(values[-1]):
        return EigenVerdict.NORM_DIVERGING
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = values[1:] / values[:-1]
    run = growth[-DIVERGENCE_RUN:]
    # growth must not be slowing down, otherwise the norms are converging slowly
    increments = np.diff(values)[-DIVERGENCE_RUN:]
    sustained = np.all(np.diff(increments) >= 0)
    if run.size >= DIVERGENCE_RUN and np.all(run >= DIVERGENCE_GROWTH) and sustained:
        return EigenVerdict.NORM_DIVERGING
    if abs(values[-1] - values[-2]) <= STABILITY_TOLERANCE * abs(values[-1]):
        return EigenVerdict.NORM_BOUNDED
    return EigenVerdict.INCONCLUSIVE


def _scan_one(T: ShiftOperator, p: int, lam: complex, M: PatternSubspace, half_widths: Sequence[int],
              anchor: int) -> EigenScanResult:
    widest = max(half_widths)
    norms = []
    for half_width in sorted(half_widths):
        candidate = eigen_candidate(T, p, lam, anchor, half_width)
        norms.append(WindowNorm(half_width, seqspace.norm(candidate), seqspace.l1_norm(candidate)))

    candidate = eigen_candidate(T, p, lam, anchor, widest)
    right_start = anchor + ((widest - p) // p) * p
    left_start = anchor - (widest // p) * p
    right_ratio = complex(_step_factors(T, p, np.array([right_start]))[0] / lam)
    left_ratio = complex(lam / _step_factors(T, p, np.array([left_start]))[0])

    with np.errstate(over="ignore", invalid="ignore"):
        image = apply_power(T, p, candidate)
        lo, hi = candidate.lo + p, candidate.hi
        grid = np.arange(lo, hi + 1)
        difference = LatticeVector(lo, image.values_at(grid) - lam * candidate.values_at(grid))
        scale = seqspace.norm(candidate)
        interior_residual = seqspace.norm(difference) / scale if scale and np.isfinite(scale) else float("nan")
    reference = scale if np.isfinite(scale) else 1.0
    inside, _ = membership(candidate, M, MEMBERSHIP_TOLERANCE * max(reference, 1.0))

    tail_verdict = (EigenVerdict.NORM_BOUNDED if abs(right_ratio) < 1 and abs(left_ratio) < 1
                    else EigenVerdict.NORM_DIVERGING)
    coefficients = {int(n): complex(c) for n, c in zip(candidate.indices, candidate.coeffs)
                    if c != 0 and abs(int(n) - anchor) <= 8 * p}
    return EigenScanResult(
        lam=complex(lam),
        anchor=anchor,
        right_ratio=right_ratio,
        left_ratio=left_ratio,
        window_norms=norms,
        verdict=_norm_verdict([w.l2_norm for w in norms]),
        l1_verdict=_norm_verdict([w.l1_sum for w in norms]),
        tail_verdict=tail_verdict,
        interior_residual=float(interior_residual),
        in_subspace=bool(inside),
        coefficients=coefficients,
    )


def eigen_scan(T: ShiftOperator, p: int, lambda_grid: Sequence[complex], M: PatternSubspace,
               half_widths: Sequence[int] = HALF_WIDTHS, anchor: Optional[int] = None, workers: int = 1,
               progress: bool = False) -> List[EigenScanResult]:
    """
    Build and measure eigenvector candidates of T^p for every lambda on the grid.

    Args:
        T: Forward weighted shift
        p: Power of T, at least 1
        lambda_grid: Nonzero complex values to try
        M: Subspace the candidates are tested against
        half_widths: Window half-widths around the anchor, at least two
        anchor: Seed index; the admissible index nearest 0 when omitted
        workers: Threads evaluating grid points; results keep grid order
        progress: Show a progress bar

    Returns:
        One EigenScanResult per grid point, in grid order
    """
    if T.direction is not Direction.FORWARD:
        raise DomainError("the eigen scan handles forward shifts")
    if p < 1:
        raise DomainError(f"p must be positive, got {p}")
    if not half_widths or min(half_widths) < p:
        raise DomainError(f"half widths must be at least p={p}")
    grid = [complex(lam) for lam in lambda_grid]
    zeros = [lam for lam in grid if lam == 0]
    if zeros:
        raise PreconditionError("lambda = 0 is not an admissible eigenvalue candidate")
    if anchor is None:
        anchor = default_anchor(M, max(half_widths))
    elif not M.is_admissible(anchor):
        raise DomainError(f"anchor {anchor} is not an admissible index of the subspace")

    logger.info(f"scanning {len(grid)} lambda values for T^{p} with anchor {anchor}")

    def task(lam: complex) -> EigenScanResult:
        return _scan_one(T, p, lam, M, half_widths, anchor)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(task, grid), total=len(grid), desc="eigen scan", disable=not progress))
    else:
        results = [task(lam) for lam in tqdm(grid, desc="eigen scan", disable=not progress)]

    for result in results:
        logger.debug(f"lambda={result.lam:.4g}: {result.verdict.value} (tail {result.tail_verdict.value})")
    return results
