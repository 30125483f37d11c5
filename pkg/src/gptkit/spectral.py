"""Exact bracketing of the spectral norm and rational singular-vector witnesses.

The largest singular value of a rational matrix is irrational in general, so
nothing here ever computes it. Instead:

* upper bounds come from exactly computable sub-multiplicative norms
  (Frobenius, induced 1 and inf) and from k-th roots of Gram-matrix powers,
  rounded upward to rationals;
* lower bounds are exact Rayleigh values x'^T M x at rational vectors of
  exact norm <= 1.

Floating point appears only to produce candidate vectors (power iteration /
SVD); every reported number is re-derived exactly from the candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .linalg import (
    Mat,
    ONE,
    Vec,
    ZERO,
    dot,
    frobenius_sq,
    induced_inf,
    induced_one,
    mat_mul,
    mat_vec,
    norm_sq,
    root_ceil,
    sqrt_ceil,
    transpose,
    unit_vec,
)


@dataclass(frozen=True)
class RationalUnitVector:
    """A rational vector with an exact certificate that it lies in the unit ball."""

    coords: Vec
    norm_squared: Fraction

    def __post_init__(self):
        if self.norm_squared != norm_sq(self.coords):
            raise ValueError("stale norm certificate")
        if self.norm_squared > 1:
            raise ValueError(f"norm squared {self.norm_squared} exceeds 1")

    def negated(self) -> "RationalUnitVector":
        return RationalUnitVector(tuple(-x for x in self.coords), self.norm_squared)


def clip_to_unit_ball(v: Vec) -> RationalUnitVector:
    """Scale a rational vector into the unit ball, exactly.

    Divides by a rational upper bound on the norm, so the result's exact
    norm-squared never exceeds 1; vectors already inside are untouched.
    """
    n2 = norm_sq(v)
    if n2 <= 1:
        return RationalUnitVector(v, n2)
    bound = sqrt_ceil(n2, bits=16)
    scaled = tuple(x / bound for x in v)
    return RationalUnitVector(scaled, norm_sq(scaled))


def rationalize(values, max_den: int) -> Vec:
    return tuple(Fraction(float(x)).limit_denominator(max_den) for x in values)


def rayleigh(m: Mat, left: RationalUnitVector, right: RationalUnitVector) -> Fraction:
    """Exact x'^T M x; a lower bound for the spectral norm when it is positive."""
    return dot(left.coords, mat_vec(m, right.coords))


def axis_rayleigh(m: Mat) -> tuple[Fraction, RationalUnitVector, RationalUnitVector]:
    """Best Rayleigh value over signed basis-vector pairs: max |M_ij|."""
    rows, cols = len(m), len(m[0]) if m else 0
    best = ZERO
    bi = bj = 0
    sign = 1
    for i in range(rows):
        for j in range(cols):
            a = abs(m[i][j])
            if a > best:
                best, bi, bj = a, i, j
                sign = 1 if m[i][j] > 0 else -1
    left = RationalUnitVector(unit_vec(rows, bi), ONE if rows else ZERO)
    right_coords = unit_vec(cols, bj)
    if sign < 0:
        right_coords = tuple(-x for x in right_coords)
    return best, left, RationalUnitVector(right_coords, ONE if cols else ZERO)


def sigma_sq_upper(m: Mat) -> Fraction:
    """Cheap exact upper bound on the squared spectral norm."""
    return min(frobenius_sq(m), induced_one(m) * induced_inf(m))


def sigma_sq_upper_refined(m: Mat, doublings: int = 0) -> Fraction:
    """Tighter bound via Gram powers: sigma^2 <= ||(M^T M)^k||_F^(1/k).

    With doublings = j the bound uses k = 2^j; it converges to sigma^2 from
    above as j grows. doublings = 0 reproduces sigma_sq_upper.
    """
    best = sigma_sq_upper(m)
    if doublings <= 0:
        return best
    gram = mat_mul(transpose(m), m)
    k = 1
    for _ in range(doublings):
        gram = mat_mul(gram, gram)
        k *= 2
        # ||G^k||_F >= rho(G^k) = sigma^(2k); take the exact rational 2k-th root
        # of the squared Frobenius norm, rounded up.
        bound = root_ceil(frobenius_sq(gram), 2 * k, bits=24)
        if bound < best:
            best = bound
    return best


def float_matrix(m: Mat) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def singular_vector_candidates(m: Mat, precisions=(1 << 8, 1 << 16, 1 << 32)) -> Iterator[tuple[RationalUnitVector, RationalUnitVector]]:
    """Rational unit-ball pairs approximating the top singular vectors.

    Yields the signed axis pair first (exact, often optimal for sparse
    matrices), then SVD-based candidates rounded at increasing precision.
    """
    _, left, right = axis_rayleigh(m)
    yield left, right
    fm = float_matrix(m)
    if not np.all(np.isfinite(fm)):
        return
    try:
        u, _, vt = np.linalg.svd(fm)
    except np.linalg.LinAlgError:
        return
    for max_den in precisions:
        lv = clip_to_unit_ball(rationalize(u[:, 0], max_den))
        rv = clip_to_unit_ball(rationalize(vt[0, :], max_den))
        yield lv, rv


def best_rayleigh(m: Mat, precisions=(1 << 8, 1 << 16, 1 << 32)) -> tuple[Fraction, RationalUnitVector, RationalUnitVector]:
    """Largest exact Rayleigh value found among the candidate pairs."""
    best = None
    for left, right in singular_vector_candidates(m, precisions):
        val = rayleigh(m, left, right)
        if val < 0:
            val, left = -val, left.negated()
        if best is None or val > best[0]:
            best = (val, left, right)
    assert best is not None
    return best
