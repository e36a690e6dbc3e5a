"""
Service for applying weighted shifts, their right inverses and their powers
"""
import logging

import numpy as np

from shiftlab.exceptions import DomainError, NoninvertibleOperatorError
from shiftlab.models.lattice_vector import LatticeVector
from shiftlab.models.operators import (Direction, DiagonalOperator, Operator, OperatorPower,
                                       ShiftOperator)

logger = logging.getLogger(__name__)


def _check_power(T: ShiftOperator, k: int):
    if k < 0:
        raise DomainError(f"power must be nonnegative, got {k}")
    if k > T.max_power:
        raise DomainError(f"power {k} exceeds max_power={T.max_power}")


def _product_range(T: ShiftOperator, start: int, k: int, inverse: bool) -> np.ndarray:
    """Indices j entering the product for T^k e_start (or S^k e_start when inverse)."""
    if T.direction is Direction.FORWARD:
        return np.arange(start - k, start) if inverse else np.arange(start, start + k)
    return np.arange(start + 1, start + k + 1) if inverse else np.arange(start - k + 1, start + 1)


def _require_floor(T: ShiftOperator, weights: np.ndarray, indices: np.ndarray):
    if not T.invertible:
        raise NoninvertibleOperatorError("operator is flagged non-invertible")
    low = weights < T.invertibility_floor
    if low.any():
        j = int(indices[low][0])
        raise NoninvertibleOperatorError(
            f"weight w_{j}={weights[low][0]:.3g} is below the invertibility floor {T.invertibility_floor:g}")


def weight_product(T: ShiftOperator, start: int, k: int, inverse: bool = False) -> float:
    """
    Coefficient of T^k e_start (or of S^k e_start when inverse is set).

    Forward shifts multiply w_j over [start, start+k-1], or 1/w_j over
    [start-k, start-1] for the inverse; backward shifts use [start-k+1, start]
    and [start+1, start+k]. The empty product (k = 0) is 1. Under- and
    overflow come back as 0.0 and inf.

    Args:
        T: The shift
        start: Index m of the basis vector e_m
        k: Power
        inverse: Use the right inverse S instead of T

    Returns:
        The positive product
    """
    _check_power(T, k)
    if k == 0:
        return 1.0
    indices = _product_range(T, start, k, inverse)
    weights = T.weights.values(indices)
    if inverse:
        _require_floor(T, weights, indices)
    with np.errstate(over="ignore", under="ignore"):
        value = float(np.prod(1.0 / weights if inverse else weights))
    if value == 0.0 or not np.isfinite(value):
        logger.warning(f"weight product from {start} over {k} steps {'under' if value == 0.0 else 'over'}flowed")
    return value


def _window_products(values: np.ndarray, k: int, count: int) -> np.ndarray:
    """
    prod(values[i:i+k]) for i < count in linear time.

    values is cut into blocks of length k; a window starting inside a block is
    the suffix product of that block times the prefix product of the next.
    """
    blocks = -(-values.size // k)
    grid = np.ones(blocks * k)
    grid[: values.size] = values
    grid = grid.reshape(blocks, k)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        prefix = np.cumprod(grid, axis=1).reshape(-1)
        suffix = np.cumprod(grid[:, ::-1], axis=1)[:, ::-1].reshape(-1)
        starts = np.arange(count)
        return np.where(starts % k == 0, suffix[starts], suffix[starts] * prefix[starts + k - 1])


def _power_coefficients(T: ShiftOperator, v: LatticeVector, k: int, inverse: bool) -> np.ndarray:
    """Per-index products of T^k (or S^k) over the window of v."""
    first = _product_range(T, v.lo, k, inverse)
    last = _product_range(T, v.hi, k, inverse)
    span = np.arange(first[0], last[-1] + 1)
    weights = T.weights.values(span)
    if inverse:
        _require_floor(T, weights, span)
        weights = 1.0 / weights
    return _window_products(weights, k, v.coeffs.size)


def _rotate(T: ShiftOperator, coeffs: np.ndarray, k: int) -> np.ndarray:
    """Multiply by phase^k; a unit phase leaves overflowed coefficients untouched."""
    if T.phase == 1:
        return coeffs
    return coeffs * T.phase ** k


def apply_power(T: ShiftOperator, k: int, v: LatticeVector) -> LatticeVector:
    """
    T^k v via the closed-form product per support index.

    The output window is the input window moved k steps in the shift
    direction. A one-sided backward shift drops mass that would cross index 0.
    """
    _check_power(T, k)
    if k == 0:
        return v
    factors = _power_coefficients(T, v, k, inverse=False)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        coeffs = _rotate(T, v.coeffs * factors, k)
    return _place(T, v, coeffs, T.step * k)


def right_inverse_power_apply(T: ShiftOperator, k: int, v: LatticeVector) -> LatticeVector:
    """S^k v for the right inverse S of T."""
    _check_power(T, k)
    if k == 0:
        return v
    factors = _power_coefficients(T, v, k, inverse=True)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        coeffs = _rotate(T, v.coeffs * factors, -k)
    return _place(T, v, coeffs, -T.step * k)


def _place(T: ShiftOperator, v: LatticeVector, coeffs: np.ndarray, offset: int) -> LatticeVector:
    lo = v.lo + offset
    one_sided = v.one_sided or T.one_sided
    if one_sided and lo < 0:
        cut = -lo
        if cut >= coeffs.size:
            return LatticeVector.zeros(0, 0, one_sided=True)
        return LatticeVector(0, coeffs[cut:], True)
    return LatticeVector(lo, coeffs, one_sided)


def apply(T: ShiftOperator, v: LatticeVector) -> LatticeVector:
    """
    One application of T: forward e_n -> w_n e_{n+1}, backward e_n -> w_n e_{n-1}.
    """
    weights = T.weights.values(v.indices)
    return _place(T, v, _rotate(T, v.coeffs * weights, 1), T.step)


def right_inverse_apply(T: ShiftOperator, v: LatticeVector) -> LatticeVector:
    """
    One application of the right inverse S.

    Forward shifts: S e_m = (1/w_{m-1}) e_{m-1}; backward: S e_m = (1/w_{m+1}) e_{m+1}.
    """
    source = v.indices - T.step
    weights = T.weights.values(source)
    _require_floor(T, weights, source)
    return _place(T, v, _rotate(T, v.coeffs / weights, -1), -T.step)


def diagonal_power_apply(D: DiagonalOperator, k: int, v: LatticeVector) -> LatticeVector:
    """
    D^k v: the coefficient at index j is multiplied by lambda_j^k.

    Raises:
        DomainError: if v is supported outside the eigenvector indices
    """
    if k < 0:
        raise DomainError(f"power must be nonnegative, got {k}")
    listed = dict(D.eigenpairs)
    outside = [int(n) for n in v.support() if int(n) not in listed]
    if outside:
        raise DomainError(f"support index {outside[0]} is not an eigenvector index of the diagonal operator")
    if k == 0:
        return v
    lam = np.array([listed.get(int(n), 0.0) for n in v.indices], dtype=np.complex128)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        coeffs = np.where(v.coeffs != 0, v.coeffs * lam ** k, 0)
    return v.with_coeffs(coeffs)


def operator_power_apply(op: Operator, k: int, v: LatticeVector) -> LatticeVector:
    """A^k v for any supported operator type."""
    if isinstance(op, ShiftOperator):
        return apply_power(op, k, v)
    if isinstance(op, DiagonalOperator):
        return diagonal_power_apply(op, k, v)
    if isinstance(op, OperatorPower):
        return operator_power_apply(op.base, k * op.exponent, v)
    raise DomainError(f"unsupported operator type {type(op).__name__}")


def adjoint(T: ShiftOperator) -> ShiftOperator:
    """
    Hilbert adjoint of a weighted shift.

    The adjoint of e_n -> w_n e_{n+1} is the backward shift e_m -> w_{m-1} e_{m-1},
    and symmetrically for backward shifts.
    """
    if T.direction is Direction.FORWARD:
        return ShiftOperator(Direction.BACKWARD, T.weights.shifted(-1), T.invertible,
                             T.invertibility_floor, T.max_power, T.one_sided, T.phase.conjugate())
    return ShiftOperator(Direction.FORWARD, T.weights.shifted(1), T.invertible,
                         T.invertibility_floor, T.max_power, T.one_sided, T.phase.conjugate())


def flip(v: LatticeVector) -> LatticeVector:
    """The unitary U e_n = e_{-n}."""
    if v.one_sided:
        raise DomainError("the flip map is defined on l2(Z) only")
    return LatticeVector(-v.hi, v.coeffs[::-1])


def flip_conjugate(T: ShiftOperator) -> ShiftOperator:
    """U T U: a forward shift with weights w_n becomes a backward shift with weights w_{-n}."""
    direction = Direction.BACKWARD if T.direction is Direction.FORWARD else Direction.FORWARD
    return ShiftOperator(direction, T.weights.reflected(), T.invertible,
                         T.invertibility_floor, T.max_power, T.one_sided, T.phase)
