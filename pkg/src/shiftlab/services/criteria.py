"""
Service for the criterion checkers: shift criterion, propagation along the basis,
M-hypercyclic criterion conditions and the eigenvector witness construction
"""
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from shiftlab.exceptions import DomainError, NoninvertibleOperatorError, PreconditionError
from shiftlab.models.lattice_vector import LatticeVector, WindowPolicy
from shiftlab.models.operators import DiagonalOperator, ShiftOperator
from shiftlab.models.reports import (CriterionReport, CriterionRow, EigenSpanReport, PowerSchedule, Verdict,
                                     WitnessResult)
from shiftlab.models.subspace import PatternSubspace
from shiftlab.services import seqspace
from shiftlab.services.shift_ops import (apply_power, diagonal_power_apply, right_inverse_power_apply,
                                         weight_product)
from shiftlab.services.subspace_ops import invariance_check, membership
from shiftlab.utils.config import IDENTITY_TOLERANCE, LIMIT_TOLERANCE, TREND_WINDOW

logger = logging.getLogger(__name__)

# (coefficient, eigenvalue, eigenvector index)
EigenPair = Tuple[complex, complex, int]


def certify_limit(values: Sequence[float], tol: float = LIMIT_TOLERANCE,
                  trend_window: int = TREND_WINDOW) -> Verdict:
    """
    Finite-sample surrogate for "values -> 0".

    Satisfied when the last value is at most tol and the last trend_window
    values are nonincreasing; violated when the last value exceeds tol and
    the last trend_window values are nondecreasing. Anything else, including
    a sequence shorter than trend_window, is inconclusive.
    """
    values = np.asarray(values, dtype=float)
    if values.size < trend_window or values.size == 0:
        return Verdict.INCONCLUSIVE
    tail = values[-trend_window:]
    steps = np.diff(tail)
    if tail[-1] <= tol and np.all(steps <= 0):
        return Verdict.SATISFIED
    if tail[-1] > tol and np.all(steps >= 0):
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


def _tolerances(tol: float, trend_window: int, **extra: float) -> Dict[str, float]:
    tolerances = {"limit": tol, "trend_window": trend_window}
    tolerances.update(extra)
    return tolerances


def _require_invertible(T: ShiftOperator):
    if not T.invertible:
        raise NoninvertibleOperatorError("the criterion needs an invertible shift")


def _require_admissible(M: PatternSubspace, index: int, name: str = "i_index"):
    if not M.is_admissible(index):
        raise DomainError(f"{name}={index} is not an admissible index of the subspace")


def shift_criterion_check(T: ShiftOperator, M: PatternSubspace, sched: PowerSchedule, i_index: int,
                          tol: float = LIMIT_TOLERANCE, trend_window: int = TREND_WINDOW,
                          policy: Optional[WindowPolicy] = None) -> CriterionReport:
    """
    Check the product-limit and invariance conditions of the shift criterion.

    For every n_k the forward product of T^{n_k} e_{m_i} and the reciprocal
    product of S^{n_k} e_{m_i} are recorded next to the structural check
    T^{n_k} M ⊆ M. Backward shifts use their own index ranges through
    weight_product.

    Each row also carries inverse_tail_product, the reciprocal product that
    leaves out the weight next to m_i (1/w_{m_i-2} ... 1/w_{m_i-n_k-1} for a
    forward shift). For the 1/2 | 3 split at m_i = 1 this is 3^{-n_k}, while
    the S^{n_k} e_{m_i} coefficient is 2 * 3^{-(n_k - 1)}. Its limit is
    reported in details and does not enter the verdict.

    Args:
        T: Invertible weighted shift
        M: Pattern subspace
        sched: Powers n_k
        i_index: Admissible index m_i
        tol: Limit tolerance
        trend_window: Number of trailing values that must be monotone
        policy: Window policy for the invariance scans

    Returns:
        CriterionReport with one row per k
    """
    _require_invertible(T)
    _require_admissible(M, i_index)

    rows = []
    invariance_ok = True
    for k, n_k in enumerate(sched.powers(), start=1):
        invariance = invariance_check(T, n_k, M, policy)
        row = CriterionRow(
            k=k,
            n_k=n_k,
            forward_product=weight_product(T, i_index, n_k),
            inverse_product=weight_product(T, i_index, n_k, inverse=True),
            invariance=invariance.satisfied,
        )
        row.extras["inverse_tail_product"] = weight_product(T, i_index - T.step, n_k, inverse=True)
        if not invariance.satisfied:
            invariance_ok = False
            row.extras["first_violation"] = invariance.details.get("first_violation")
        rows.append(row)
        logger.debug(f"k={k} n_k={n_k} forward={row.forward_product:.3e} inverse={row.inverse_product:.3e}")

    forward_verdict = certify_limit([r.forward_product for r in rows], tol, trend_window)
    inverse_verdict = certify_limit([r.inverse_product for r in rows], tol, trend_window)
    tail_verdict = certify_limit([r.extras["inverse_tail_product"] for r in rows], tol, trend_window)
    verdict = Verdict.VIOLATED if not invariance_ok else Verdict.combine([forward_verdict, inverse_verdict])

    logger.info(f"shift criterion at m_i={i_index}: {verdict.value}")
    return CriterionReport(
        check="shift_criterion",
        verdict=verdict,
        per_k=rows,
        tolerances=_tolerances(tol, trend_window),
        details={
            "direction": T.direction.value,
            "i_index": i_index,
            "forward_limit": forward_verdict.value,
            "inverse_limit": inverse_verdict.value,
            "inverse_tail_limit": tail_verdict.value,
            "invariance": "pass" if invariance_ok else "fail",
            "schedule": sched.to_config(),
        },
    )


def lemma5_propagation(T: ShiftOperator, M: PatternSubspace, sched: PowerSchedule, i_index: int,
                       other_indices: Sequence[int], tol: float = LIMIT_TOLERANCE,
                       trend_window: int = TREND_WINDOW,
                       policy: Optional[WindowPolicy] = None) -> CriterionReport:
    """
    Check that decay of T^{n_k} e_{m_i} carries over to the other basis vectors of M.

    Raises:
        PreconditionError: if T^{n_k} M ⊆ M fails for some n_k
    """
    _require_admissible(M, i_index)
    for index in other_indices:
        _require_admissible(M, index, "other index")

    powers = sched.powers()
    for n_k in powers:
        invariance = invariance_check(T, n_k, M, policy)
        if not invariance.satisfied:
            raise PreconditionError(
                f"T^{n_k} does not map the subspace into itself "
                f"(first violation {invariance.details.get('first_violation')})")

    indices = [i_index] + [int(m) for m in other_indices if int(m) != i_index]
    norms = {m: [] for m in indices}
    rows = []
    for k, n_k in enumerate(powers, start=1):
        row = CriterionRow(k=k, n_k=n_k, invariance=True)
        for m in indices:
            value = seqspace.norm(apply_power(T, n_k, LatticeVector.basis(m, one_sided=T.one_sided and m >= 0)))
            norms[m].append(value)
            row.extras[f"norm[{m}]"] = value
        row.forward_product = norms[i_index][-1]
        rows.append(row)

    per_index = {m: certify_limit(values, tol, trend_window) for m, values in norms.items()}
    seed_verdict = per_index[i_index]
    if seed_verdict is Verdict.SATISFIED:
        verdict = Verdict.combine(list(per_index.values()))
    else:
        # without decay at m_i there is nothing to propagate
        verdict = seed_verdict

    logger.info(f"propagation from m_i={i_index} to {indices[1:]}: {verdict.value}")
    return CriterionReport(
        check="lemma5_propagation",
        verdict=verdict,
        per_k=rows,
        tolerances=_tolerances(tol, trend_window),
        details={"i_index": i_index, "per_index": {str(m): v.value for m, v in per_index.items()}},
    )


def mhc_criterion_conditions(T: ShiftOperator, M: PatternSubspace, sched: PowerSchedule,
                             dense_set: Sequence[LatticeVector], tol: float = LIMIT_TOLERANCE,
                             trend_window: int = TREND_WINDOW, identity_tol: float = IDENTITY_TOLERANCE,
                             policy: Optional[WindowPolicy] = None) -> CriterionReport:
    """
    Check the M-hypercyclic criterion conditions on a dense set D ⊆ M.

    (C1) T^{n_k} d -> 0, (C2) S^{n_k} d -> 0 and (C3) T^{n_k} S^{n_k} d = d for
    every d in D, together with T^{n_k} M ⊆ M.

    Args:
        T: Invertible weighted shift
        M: Pattern subspace
        sched: Powers n_k
        dense_set: Finitely supported vectors of M
        tol: Limit tolerance for (C1) and (C2)
        trend_window: Number of trailing values that must be monotone
        identity_tol: Relative tolerance of (C3)
        policy: Window policy for the invariance scans
    """
    _require_invertible(T)
    if not dense_set:
        raise DomainError("the dense set is empty")
    for j, d in enumerate(dense_set):
        inside, worst = membership(d, M, 0.0)
        if not inside:
            raise PreconditionError(f"dense_set[{j}] is not in the subspace (off-pattern modulus {worst:.3g})")

    c1 = [[] for _ in dense_set]
    c2 = [[] for _ in dense_set]
    identity_ok = True
    invariance_ok = True
    rows = []
    for k, n_k in enumerate(sched.powers(), start=1):
        invariance = invariance_check(T, n_k, M, policy)
        invariance_ok &= invariance.satisfied
        worst_identity = 0.0
        for j, d in enumerate(dense_set):
            pulled = right_inverse_power_apply(T, n_k, d)
            c1[j].append(seqspace.norm(apply_power(T, n_k, d)))
            c2[j].append(seqspace.norm(pulled))
            restored = apply_power(T, n_k, pulled)
            deviation = seqspace.distance(restored, d) / max(seqspace.norm(d), 1.0)
            same_support = set(restored.support().tolist()) == set(d.support().tolist())
            worst_identity = max(worst_identity, deviation)
            if deviation > identity_tol or not same_support:
                identity_ok = False
        rows.append(CriterionRow(
            k=k,
            n_k=n_k,
            forward_product=max(values[-1] for values in c1),
            inverse_product=max(values[-1] for values in c2),
            invariance=invariance.satisfied,
            extras={"identity_deviation": worst_identity},
        ))

    c1_verdict = Verdict.combine([certify_limit(values, tol, trend_window) for values in c1])
    c2_verdict = Verdict.combine([certify_limit(values, tol, trend_window) for values in c2])
    if not invariance_ok or not identity_ok:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.combine([c1_verdict, c2_verdict])

    logger.info(f"M-hypercyclic criterion conditions on {len(dense_set)} vectors: {verdict.value}")
    return CriterionReport(
        check="mhc_criterion",
        verdict=verdict,
        per_k=rows,
        tolerances=_tolerances(tol, trend_window, identity=identity_tol),
        details={
            "c1": c1_verdict.value,
            "c2": c2_verdict.value,
            "c3": "pass" if identity_ok else "fail",
            "invariance": "pass" if invariance_ok else "fail",
            "dense_set_size": len(dense_set),
        },
    )


def _check_pairs(pairs: Sequence[EigenPair], inside: bool, name: str):
    for coefficient, eigenvalue, index in pairs:
        modulus = abs(complex(eigenvalue))
        if np.isclose(modulus, 1.0, rtol=0.0, atol=1e-15):
            raise PreconditionError(f"{name} eigenvalue {eigenvalue} lies on the unit circle")
        if inside and modulus >= 1:
            raise PreconditionError(f"{name} eigenvalue {eigenvalue} must have modulus below 1")
        if not inside and modulus <= 1:
            raise PreconditionError(f"{name} eigenvalue {eigenvalue} must have modulus above 1")


def _combination(pairs: Sequence[EigenPair], scale=lambda lam: 1.0) -> LatticeVector:
    return LatticeVector.from_terms({int(index): complex(c) * scale(complex(lam)) for c, lam, index in pairs})


def spectrum_witness(x_pairs: Sequence[EigenPair], y_pairs: Sequence[EigenPair], p: int, n: int,
                     D: Optional[DiagonalOperator] = None) -> WitnessResult:
    """
    Witness construction of the spectrum criterion.

    With x = sum a_k x_k (|lambda_k| < 1) and y = sum b_k y_k (|mu_k| > 1), where
    the x_k and y_k are eigenvectors of T^p represented by the diagonal stand-in
    D, the correction z_n = sum b_k mu_k^{-n} y_k satisfies
    D^n (x + z_n) = D^n x + y exactly.

    Args:
        x_pairs: (a_k, lambda_k, index) with |lambda_k| < 1
        y_pairs: (b_k, mu_k, index) with |mu_k| > 1
        p: Power of T that D represents
        n: Witness power, n >= 0
        D: Diagonal stand-in for T^p; built from the pairs when omitted

    Returns:
        WitnessResult with z_n, D^n (x + z_n), the residual and the monitored
        norms, labelled with the powers p*n and p*(n+1) of T they stand for
    """
    if p < 1:
        raise DomainError(f"p must be positive, got {p}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if not x_pairs or not y_pairs:
        raise DomainError("both pair lists need at least one entry")
    _check_pairs(x_pairs, True, "x")
    _check_pairs(y_pairs, False, "y")
    indices = [int(index) for _, _, index in list(x_pairs) + list(y_pairs)]
    if len(set(indices)) != len(indices):
        raise DomainError("eigenvector indices must be distinct across x_pairs and y_pairs")

    if D is None:
        D = DiagonalOperator.from_pairs([(int(index), lam) for _, lam, index in list(x_pairs) + list(y_pairs)])
    else:
        for _, lam, index in list(x_pairs) + list(y_pairs):
            if not np.isclose(D.eigenvalue(int(index)), complex(lam), rtol=1e-12, atol=0.0):
                raise PreconditionError(f"D disagrees with the listed eigenvalue at index {index}")

    x = _combination(x_pairs)
    y = _combination(y_pairs)
    z_n = _combination(y_pairs, lambda mu: mu ** (-n))

    x_power = diagonal_power_apply(D, n, x)
    combined = diagonal_power_apply(D, n, seqspace.axpy(1.0, x, z_n))
    target = seqspace.axpy(1.0, x_power, y)
    residual = seqspace.distance(combined, target)

    return WitnessResult(
        n=n,
        z_n=z_n,
        combined=combined,
        residual=residual,
        x_power_norm=seqspace.norm(x_power),
        x_next_power_norm=seqspace.norm(diagonal_power_apply(D, n + 1, x)),
        z_norm=seqspace.norm(z_n),
        t_exponent=p * n,
        t_next_exponent=p * (n + 1),
    )


def witness_bounds(x_pairs: Sequence[EigenPair], y_pairs: Sequence[EigenPair], n: int) -> Tuple[float, float]:
    """
    Upper bounds for the monitored witness norms.

    Returns:
        (||x|| * max|lambda|^n, sum|b| * min|mu|^{-n})
    """
    x = _combination(x_pairs)
    largest = max(abs(complex(lam)) for _, lam, _ in x_pairs)
    smallest = min(abs(complex(mu)) for _, mu, _ in y_pairs)
    coefficient_sum = sum(abs(complex(b)) for b, _, _ in y_pairs)
    return seqspace.norm(x) * largest ** n, coefficient_sum * smallest ** (-n)


def eigen_span_density(small: Sequence[int], large: Sequence[int], M: PatternSubspace,
                       window: Tuple[int, int]) -> EigenSpanReport:
    """
    Coverage of the admissible indices of M on a window by two eigenvector index families.

    A coordinate span intersected with M is dense in M on the window exactly
    when its indices cover every admissible index there.
    """
    lo, hi = window
    if hi < lo:
        raise DomainError(f"empty window [{lo}, {hi}]")
    admissible = M.admissible_in(lo, hi)
    small_uncovered = sorted(int(n) for n in np.setdiff1d(admissible, np.asarray(list(small), dtype=np.int64)))
    large_uncovered = sorted(int(n) for n in np.setdiff1d(admissible, np.asarray(list(large), dtype=np.int64)))
    return EigenSpanReport(
        window=(lo, hi),
        small_dense=not small_uncovered,
        large_dense=not large_uncovered,
        small_uncovered=small_uncovered,
        large_uncovered=large_uncovered,
    )
