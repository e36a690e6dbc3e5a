"""
Vector arithmetic of truncated l2(Z): inner products, norms, axpy, truncation
"""
from typing import Optional, Tuple

import numpy as np

from shiftlab.models.lattice_vector import LatticeVector, scaled_norm


def _common_window(u: LatticeVector, v: LatticeVector) -> Tuple[int, int]:
    return min(u.lo, v.lo), max(u.hi, v.hi)


def inner(u: LatticeVector, v: LatticeVector) -> complex:
    """
    l2 inner product <u, v>, linear in u and conjugate-linear in v.

    Only the overlap of the two windows contributes.
    """
    lo, hi = max(u.lo, v.lo), min(u.hi, v.hi)
    if lo > hi:
        return 0j
    a = u.coeffs[lo - u.lo: hi - u.lo + 1]
    b = v.coeffs[lo - v.lo: hi - v.lo + 1]
    return complex(np.vdot(b, a))


def norm(v: LatticeVector) -> float:
    """l2 norm, scaled so that coefficients up to the float range do not overflow."""
    return scaled_norm(v.coeffs)


def l1_norm(v: LatticeVector) -> float:
    """Sum of coefficient moduli."""
    return float(np.sum(np.abs(v.coeffs)))


def axpy(a: complex, x: LatticeVector, y: LatticeVector) -> LatticeVector:
    """
    a*x + y on the union of both windows.

    The result is one-sided only when both inputs are; a one-sided vector
    reads as zero at negative indices, so mixed inputs give a two-sided sum.
    """
    lo, hi = _common_window(x, y)
    grid = np.arange(lo, hi + 1)
    coeffs = a * x.values_at(grid) + y.values_at(grid)
    return LatticeVector(lo, coeffs, x.one_sided and y.one_sided)


def scale(a: complex, v: LatticeVector) -> LatticeVector:
    return v.with_coeffs(a * v.coeffs)


def subtract(u: LatticeVector, v: LatticeVector) -> LatticeVector:
    """u - v"""
    return axpy(-1.0, v, u)


def distance(u: LatticeVector, v: LatticeVector) -> float:
    """l2 distance ||u - v||."""
    lo, hi = _common_window(u, v)
    grid = np.arange(lo, hi + 1)
    return norm(LatticeVector(lo, u.values_at(grid) - v.values_at(grid)))


def truncate(v: LatticeVector, lo: int, hi: int) -> Tuple[LatticeVector, float]:
    """
    Restrict v to the hard window [lo, hi].

    Returns:
        The restricted vector and the l2 norm of the mass outside the window
    """
    inside = v.rewindow(lo, hi)
    outside = v.coeffs[(v.indices < lo) | (v.indices > hi)]
    leakage = 0.0
    if outside.size:
        leakage = norm(LatticeVector(0, outside))
    return inside, leakage


def translate(v: LatticeVector, offset: int) -> LatticeVector:
    """Unweighted translation: the coefficient at n moves to n + offset."""
    if v.one_sided and v.lo + offset < 0:
        kept = v.coeffs[-(v.lo + offset):] if -(v.lo + offset) < v.coeffs.size else np.zeros(1)
        return LatticeVector(0, kept, True)
    return LatticeVector(v.lo + offset, v.coeffs, v.one_sided)


def random_vector(rng: np.random.Generator, lo: int, hi: int, one_sided: bool = False,
                  complex_values: bool = True, mask: Optional[np.ndarray] = None) -> LatticeVector:
    """
    Random vector on [lo, hi] with standard normal coefficients.

    Args:
        rng: Generator supplying the randomness
        lo, hi: Window bounds
        one_sided: Whether the vector lives in l2(N)
        complex_values: Draw imaginary parts too
        mask: Optional boolean mask over the window; coefficients outside it are zero
    """
    size = hi - lo + 1
    coeffs = rng.standard_normal(size).astype(np.complex128)
    if complex_values:
        coeffs = coeffs + 1j * rng.standard_normal(size)
    if mask is not None:
        coeffs = np.where(mask, coeffs, 0)
    return LatticeVector(lo, coeffs, one_sided)
