"""Exact rational scalars, vectors, and matrices.

Everything here is `fractions.Fraction` based and exact: no floats are
accepted or produced. Matrices are tuples of row tuples, vectors are flat
tuples, both immutable and hashable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Fraction
Vec = tuple[Fraction, ...]
Mat = tuple[tuple[Fraction, ...], ...]

ScalarLike = Union[int, str, Fraction]


def frac(x: ScalarLike) -> Fraction:
    """Coerce an int, Fraction, or "num/den" string to an exact Fraction.

    Floats are rejected: every value in this package is exact and a float
    argument is almost certainly a bug at the call site.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}: exact rationals only")
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_scalar(x: Fraction) -> str:
    """Render as "num/den", or just "num" for integers."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vec(entries: Iterable[ScalarLike]) -> Vec:
    return tuple(frac(x) for x in entries)


def mat(rows: Iterable[Iterable[ScalarLike]]) -> Mat:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


ZERO = Fraction(0)
ONE = Fraction(1)


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(n))


def identity(n: int) -> Mat:
    return tuple(unit_vec(n, i) for i in range(n))


def zero_mat(rows: int, cols: int) -> Mat:
    return ((ZERO,) * cols,) * rows


def dot(a: Vec, b: Vec) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dot: lengths {len(a)} != {len(b)}")
    return sum((x * y for x, y in zip(a, b)), ZERO)


def add_vec(a: Vec, b: Vec) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"add_vec: lengths {len(a)} != {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def scale_vec(c: Fraction, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def neg_vec(a: Vec) -> Vec:
    return tuple(-x for x in a)


def mat_vec(m: Mat, a: Vec) -> Vec:
    if m and len(m[0]) != len(a):
        raise ValueError(f"mat_vec: {len(m[0])} columns vs length-{len(a)} vector")
    return tuple(dot(row, a) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    if not a or not b:
        return ()
    if len(a[0]) != len(b):
        raise ValueError(f"mat_mul: inner dimensions {len(a[0])} != {len(b)}")
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_scale(c: Fraction, m: Mat) -> Mat:
    return tuple(tuple(c * x for x in row) for row in m)


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(add_vec(ra, rb) for ra, rb in zip(a, b))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def norm_sq(a: Vec) -> Fraction:
    return sum((x * x for x in a), ZERO)


def frobenius_sq(m: Mat) -> Fraction:
    return sum((x * x for row in m for x in row), ZERO)


def induced_inf(m: Mat) -> Fraction:
    """Max absolute row sum; an exact upper bound family for the spectral norm."""
    return max((sum((abs(x) for x in row), ZERO) for row in m), default=ZERO)


def induced_one(m: Mat) -> Fraction:
    """Max absolute column sum."""
    return induced_inf(transpose(m))


def max_abs_entry(m: Mat) -> Fraction:
    return max((abs(x) for row in m for x in row), default=ZERO)


def rank(m: Mat) -> int:
    """Exact rank by Gaussian elimination over the rationals."""
    rows = [list(r) for r in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


# --- integer root helpers -------------------------------------------------
#
# Rational square/k-th roots are irrational in general; the searches and
# certificates only ever need one-sided rational bounds, built from exact
# integer roots.


def isqrt_ceil(n: int) -> int:
    if n < 0:
        raise ValueError("isqrt_ceil of negative")
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def iroot_floor(n: int, k: int) -> int:
    """Largest integer r with r**k <= n (n >= 0, k >= 1)."""
    if n < 0 or k < 1:
        raise ValueError("iroot_floor needs n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)  # >= true root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def iroot_ceil(n: int, k: int) -> int:
    r = iroot_floor(n, k)
    return r if r ** k == n else r + 1


def sqrt_floor(x: Fraction, bits: int = 0) -> Fraction:
    """Rational r <= sqrt(x); `bits` extra binary digits tighten the bound."""
    if x < 0:
        raise ValueError("sqrt of negative")
    a, b = x.numerator, x.denominator
    s = 1 << bits
    return Fraction(math.isqrt(a * b * s * s), b * s)


def sqrt_ceil(x: Fraction, bits: int = 0) -> Fraction:
    """Rational r >= sqrt(x), exact when x is a perfect rational square."""
    if x < 0:
        raise ValueError("sqrt of negative")
    a, b = x.numerator, x.denominator
    s = 1 << bits
    return Fraction(isqrt_ceil(a * b * s * s), b * s)


def root_ceil(x: Fraction, k: int, bits: int = 0) -> Fraction:
    """Rational r >= x**(1/k)."""
    if x < 0:
        raise ValueError("even roots of negatives are not real")
    a, b = x.numerator, x.denominator
    s = 1 << bits
    return Fraction(iroot_ceil(a * b ** (k - 1) * s ** k, k), b * s)


def lcm_all(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out
