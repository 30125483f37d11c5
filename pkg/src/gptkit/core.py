"""Single and composite system primitives: states, effects, measurements,
transformations, and dense tensors, all in exact rational arithmetic.

Conventions. Vectors live in a distinguished basis whose first coordinate is
the normalisation component: the unit effect is u = (1, 0, ..., 0), states
are (1; v) with Bloch part v, effects are p*(1; f) with scale p >= 0.
Transformations act as scale * [[1, 0], [s, R]]: an affine shift s plus a
linear block R on Bloch parts, with an explicit overall scale so that
unnormalised channels (teleportation outcomes) share the same type.

All values are immutable after construction; every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Iterable, Sequence

from .linalg import (
    Mat,
    ONE,
    Vec,
    ZERO,
    add_vec,
    dot,
    frac,
    identity,
    mat,
    mat_mul,
    mat_scale,
    mat_vec,
    scale_vec,
    transpose,
    vec,
    zero_vec,
)


class DimensionMismatch(ValueError):
    """Raised when two objects with incompatible dimensions are combined."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DimensionMismatch(msg)


@dataclass(frozen=True)
class GptVector:
    """A raw (d+1)-coordinate vector; coordinate 0 is the u-component."""

    coords: Vec

    def __post_init__(self):
        object.__setattr__(self, "coords", vec(self.coords))
        if not self.coords:
            raise ValueError("empty vector")

    @property
    def d(self) -> int:
        return len(self.coords) - 1

    @property
    def first(self) -> Fraction:
        return self.coords[0]

    @property
    def bloch(self) -> Vec:
        return self.coords[1:]


@dataclass(frozen=True)
class State:
    """A normalised state (1; v). The unit coordinate is enforced, not stored."""

    bloch: Vec

    def __post_init__(self):
        object.__setattr__(self, "bloch", vec(self.bloch))

    @property
    def d(self) -> int:
        return len(self.bloch)

    def vector(self) -> GptVector:
        return GptVector((ONE,) + self.bloch)

    @staticmethod
    def from_vector(v: GptVector) -> "State":
        if v.first != 1:
            raise ValueError(f"not normalised: first coordinate {v.first}")
        return State(v.bloch)


def mixed_state(d: int) -> State:
    """The completely mixed state (1; 0)."""
    return State(zero_vec(d))


@dataclass(frozen=True)
class Effect:
    """An effect p*(1; f) with scale p >= 0.

    p = 0 is the zero effect and p = 1, f = 0 the unit effect.
    """

    p: Fraction
    bloch: Vec

    def __post_init__(self):
        object.__setattr__(self, "p", frac(self.p))
        object.__setattr__(self, "bloch", vec(self.bloch))
        if self.p < 0:
            raise ValueError(f"effect scale must be >= 0, got {self.p}")

    @property
    def d(self) -> int:
        return len(self.bloch)

    def vector(self) -> GptVector:
        return GptVector((self.p,) + scale_vec(self.p, self.bloch))


def unit_effect(d: int) -> Effect:
    return Effect(ONE, zero_vec(d))


def zero_effect(d: int) -> Effect:
    return Effect(ZERO, zero_vec(d))


@dataclass(frozen=True)
class Measurement:
    """A finite set of effects that sum to the unit effect."""

    effects: tuple[Effect, ...]

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        if not self.effects:
            raise ValueError("a measurement needs at least one effect")
        d = self.effects[0].d
        _require(all(e.d == d for e in self.effects), "mixed effect dimensions")

    @property
    def d(self) -> int:
        return self.effects[0].d


def validate_measurement(m: Measurement) -> bool:
    """Exact check that the effects sum to the unit effect, coordinatewise."""
    total = m.effects[0].vector().coords
    for e in m.effects[1:]:
        total = add_vec(total, e.vector().coords)
    return total == unit_effect(m.d).vector().coords


@dataclass(frozen=True)
class Transformation:
    """scale * [[1, 0], [shift, block]] acting on (1; v) vectors.

    The block may be rectangular: teleportation channels map one system
    type's Bloch space into another's. `preserves_unit` holds exactly for
    scale 1 regardless of shift and block.
    """

    scale: Fraction
    shift: Vec
    block: Mat

    def __post_init__(self):
        object.__setattr__(self, "scale", frac(self.scale))
        object.__setattr__(self, "shift", vec(self.shift))
        object.__setattr__(self, "block", mat(self.block))
        if self.scale <= 0:
            raise ValueError(f"transformation scale must be > 0, got {self.scale}")
        if len(self.block) != len(self.shift):
            raise ValueError("shift length must match block row count")

    @property
    def out_dim(self) -> int:
        return len(self.shift)

    @property
    def in_dim(self) -> int:
        return len(self.block[0]) if self.block else 0

    @property
    def d(self) -> int:
        _require(self.in_dim == self.out_dim, "rectangular transformation has no single dimension")
        return self.in_dim

    def matrix(self) -> Mat:
        """The full (out+1) x (in+1) matrix, scale included."""
        top = (ONE,) + zero_vec(self.in_dim)
        rows = [top] + [
            (self.shift[i],) + self.block[i] for i in range(self.out_dim)
        ]
        return mat_scale(self.scale, tuple(rows))


def identity_transformation(d: int) -> Transformation:
    return Transformation(ONE, zero_vec(d), identity(d))


def bloch_flip(d: int) -> Transformation:
    """v -> -v: the sign flip on Bloch vectors."""
    return Transformation(ONE, zero_vec(d), mat_scale(Fraction(-1), identity(d)))


def linear_transformation(block: Iterable[Iterable], scale=ONE) -> Transformation:
    """Zero-shift transformation with the given Bloch block."""
    b = mat(block)
    return Transformation(frac(scale), zero_vec(len(b)), b)


def pair(e: Effect, omega: State) -> Fraction:
    """Outcome probability of effect e on state omega: p * (1 + f.v)."""
    _require(e.d == omega.d, f"effect dim {e.d} vs state dim {omega.d}")
    return e.p * (ONE + dot(e.bloch, omega.bloch))


def pair_vectors(e: GptVector, omega: GptVector) -> Fraction:
    _require(e.d == omega.d, f"vector dims {e.d} vs {omega.d}")
    return dot(e.coords, omega.coords)


def apply_vector(t: Transformation, v: GptVector) -> GptVector:
    """Full linear action of t on a raw (possibly unnormalised) vector."""
    _require(t.in_dim == v.d, f"transformation in-dim {t.in_dim} vs vector dim {v.d}")
    w0 = v.first
    bloch = add_vec(scale_vec(w0, t.shift), mat_vec(t.block, v.bloch))
    return GptVector((t.scale * w0,) + scale_vec(t.scale, bloch))


def apply(t: Transformation, omega: State) -> GptVector:
    """Act on a normalised state; the result's first coordinate is t.scale."""
    return apply_vector(t, omega.vector())


def adjoint_vector(t: Transformation, e: GptVector) -> GptVector:
    """The transpose action on effect vectors: pairing is preserved,
    pair_vectors(e, apply_vector(t, w)) == pair_vectors(adjoint_vector(t, e), w).
    """
    _require(t.out_dim == e.d, f"transformation out-dim {t.out_dim} vs vector dim {e.d}")
    first = t.scale * (e.first + dot(t.shift, e.bloch))
    bloch = scale_vec(t.scale, mat_vec(transpose(t.block), e.bloch))
    return GptVector((first,) + bloch)


def compose(t2: Transformation, t1: Transformation) -> Transformation:
    """t2 after t1: block composition multiplies the Bloch blocks and scales."""
    _require(
        t2.in_dim == t1.out_dim,
        f"compose: inner dims {t2.in_dim} != {t1.out_dim}",
    )
    shift = add_vec(t2.shift, mat_vec(t2.block, t1.shift))
    return Transformation(t2.scale * t1.scale, shift, mat_mul(t2.block, t1.block))


def preserves_unit(t: Transformation) -> bool:
    """True iff u^T t = u^T, i.e. the scale is exactly 1."""
    return t.scale == 1


# --- composite systems ------------------------------------------------------
#
# Dense multiway coefficient arrays in the phi_0 = u basis convention.
# Coefficients are stored as integer numerators over one common positive
# denominator in lowest terms; this is an exact representation chosen so
# that large contractions run on machine integers.


@dataclass(frozen=True)
class Tensor:
    """Coefficients of a multipartite vector, indexed by basis labels.

    dims holds d_i + 1 per subsystem; nums is the C-order flat array of
    numerators over the common denominator den > 0, with gcd(nums, den) = 1.
    """

    dims: tuple[int, ...]
    nums: tuple[int, ...]
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        expected = math.prod(self.dims)
        if len(self.nums) != expected:
            raise ValueError(f"expected {expected} coefficients, got {len(self.nums)}")

    @staticmethod
    def from_coeffs(dims: Sequence[int], coeffs: Iterable) -> "Tensor":
        cs = [frac(c) for c in coeffs]
        den = 1
        for c in cs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = tuple(c.numerator * (den // c.denominator) for c in cs)
        return Tensor(tuple(dims), nums, den)._normalized()

    def _normalized(self) -> "Tensor":
        g = self.den
        for n in self.nums:
            g = math.gcd(g, n)
            if g == 1:
                return self
        if g == 1:
            return self
        return Tensor(self.dims, tuple(n // g for n in self.nums), self.den // g)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def coeff(self, index: Sequence[int]) -> Fraction:
        flat = 0
        for i, s in zip(index, self.strides()):
            flat += i * s
        return Fraction(self.nums[flat], self.den)

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.nums)

    def outer(self, other: "Tensor") -> "Tensor":
        nums = tuple(a * b for a in self.nums for b in other.nums)
        return Tensor(self.dims + other.dims, nums, self.den * other.den)._normalized()

    def scaled(self, c) -> "Tensor":
        c = frac(c)
        nums = tuple(c.numerator * n for n in self.nums)
        return Tensor(self.dims, nums, self.den * c.denominator)._normalized()

    def add(self, other: "Tensor") -> "Tensor":
        if self.dims != other.dims:
            raise DimensionMismatch("tensor addition needs identical dims")
        den = self.den * other.den // math.gcd(self.den, other.den)
        a, b = den // self.den, den // other.den
        nums = tuple(a * x + b * y for x, y in zip(self.nums, other.nums))
        return Tensor(self.dims, nums, den)._normalized()

    def pair(self, other: "Tensor") -> Fraction:
        """Full coefficient-wise contraction (the composite outcome pairing)."""
        if self.dims != other.dims:
            raise DimensionMismatch(
                f"pairing dims {self.dims} vs {other.dims}"
            )
        total = sum(a * b for a, b in zip(self.nums, other.nums))
        return Fraction(total, self.den * other.den)

    def contract(self, effect: "Tensor", positions: Sequence[int]) -> "Tensor":
        """Contract `effect` against the given subsystem positions.

        positions[j] is the subsystem of self matched with subsystem j of
        the effect; the result keeps the remaining subsystems in their
        original order.
        """
        positions = tuple(positions)
        if len(positions) != effect.n_subsystems:
            raise DimensionMismatch("one position per effect subsystem")
        if len(set(positions)) != len(positions):
            raise ValueError("duplicate contraction positions")
        for j, p in enumerate(positions):
            if not 0 <= p < self.n_subsystems:
                raise ValueError(f"position {p} out of range")
            if self.dims[p] != effect.dims[j]:
                raise DimensionMismatch(
                    f"subsystem {p} has dim {self.dims[p]}, effect expects {effect.dims[j]}"
                )
        kept = tuple(i for i in range(self.n_subsystems) if i not in positions)
        strides = self.strides()
        kept_dims = tuple(self.dims[i] for i in kept)

        kept_offsets = [0]
        for i in kept:
            kept_offsets = [
                base + a * strides[i] for base in kept_offsets for a in range(self.dims[i])
            ]
        eff_offsets = [0]
        for j, p in enumerate(positions):
            eff_offsets = [
                base + a * strides[p] for base in eff_offsets for a in range(effect.dims[j])
            ]

        nums = self.nums
        out = [0] * len(kept_offsets)
        for e_num, e_off in zip(effect.nums, eff_offsets):
            if e_num:
                for i, k_off in enumerate(kept_offsets):
                    out[i] += e_num * nums[k_off + e_off]
        return Tensor(kept_dims, tuple(out), self.den * effect.den)._normalized()


def state_tensor(omega: State) -> Tensor:
    return Tensor.from_coeffs((omega.d + 1,), omega.vector().coords)


def effect_tensor(e: Effect) -> Tensor:
    return Tensor.from_coeffs((e.d + 1,), e.vector().coords)


def tensor_states(omega_a: State, omega_b: State) -> Tensor:
    """Product state coefficients: c[mu, nu] = a_mu * b_nu."""
    return state_tensor(omega_a).outer(state_tensor(omega_b))


def tensor_effects(e_a: Effect, e_b: Effect) -> Tensor:
    return effect_tensor(e_a).outer(effect_tensor(e_b))


def pair_tensor(e: Tensor, psi: Tensor) -> Fraction:
    return e.pair(psi)


def marginalize(psi: Tensor, keep: int) -> GptVector:
    """Discard the other half of a bipartite tensor against its unit effect.

    In the phi_0 = u convention this keeps the slice where the discarded
    label is 0.
    """
    if psi.n_subsystems != 2:
        raise DimensionMismatch("marginalize expects a bipartite tensor")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    drop = 1 - keep
    unit = Tensor.from_coeffs((psi.dims[drop],), (ONE,) + zero_vec(psi.dims[drop] - 1))
    reduced = psi.contract(unit, (drop,))
    return GptVector(reduced.coeffs())
