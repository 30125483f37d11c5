"""The ball model: states on a radius-eps ball, effects on a radius-eps' ball.

This is the single-system theory used by every consistency certificate in the
package: states are (1; x) with ||x|| <= eps, effects are (1/2)(1; x') with
||x'|| <= eps' plus the unit effect, and the model is a valid GPT exactly
when eps * eps' <= 1 (the boundary case pairs to 0, which the axioms allow).

Its role here is quantitative: a transformation with Bloch block R keeps all
ball pairings nonnegative iff eps * eps' * sigma(R) <= 1, so an upper bound
on the spectral norm of every word product certifies consistency, and a
rational Rayleigh witness beyond 1/(eps * eps') certifies inconsistency.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import Effect, State, unit_effect
from .linalg import (
    Mat,
    ONE,
    Vec,
    frac,
    isqrt_ceil,
    norm_sq,
    scale_vec,
    sqrt_ceil,
    unit_vec,
)
from .spectral import (
    RationalUnitVector,
    axis_rayleigh,
    best_rayleigh,
    clip_to_unit_ball,
    rayleigh,
    sigma_sq_upper,
    sigma_sq_upper_refined,
)

__all__ = [
    "BallFamily",
    "HypersphereGpt",
    "RationalUnitVector",
    "PairingBound",
    "min_pairing_value",
    "embed_certificate",
    "embed_for_norm_bound_sq",
    "sample_extreme",
]


@dataclass(frozen=True)
class BallFamily:
    """All vectors p*(1; x) with ||x|| <= radius, as one parametric family."""

    d: int
    p: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", frac(self.p))
        object.__setattr__(self, "radius", frac(self.radius))
        if self.p <= 0 or self.radius <= 0:
            raise ValueError("scale and radius must be positive")

    def contains_bloch(self, x: Vec) -> bool:
        """Exact membership test for a Bloch part (norm compared squared)."""
        return len(x) == self.d and norm_sq(x) <= self.radius * self.radius


@dataclass(frozen=True)
class HypersphereGpt:
    """State ball of radius epsilon, effect ball of radius epsilon_prime.

    Valid as a single-system theory iff epsilon * epsilon_prime <= 1;
    construction does not enforce that, since the invalid region is exactly
    where inconsistency witnesses live.
    """

    d: int
    epsilon: Fraction
    epsilon_prime: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", frac(self.epsilon))
        object.__setattr__(self, "epsilon_prime", frac(self.epsilon_prime))
        if self.epsilon <= 0 or self.epsilon_prime <= 0:
            raise ValueError("radii must be positive")

    @property
    def state_family(self) -> BallFamily:
        return BallFamily(self.d, ONE, self.epsilon)

    @property
    def effect_family(self) -> BallFamily:
        return BallFamily(self.d, Fraction(1, 2), self.epsilon_prime)

    def is_valid(self) -> bool:
        return self.epsilon * self.epsilon_prime <= 1

    def state(self, x: Vec) -> State:
        if not self.state_family.contains_bloch(x):
            raise ValueError("Bloch part outside the state ball")
        return State(x)

    def effect(self, x: Vec) -> Effect:
        if not self.effect_family.contains_bloch(x):
            raise ValueError("Bloch part outside the effect ball")
        return Effect(Fraction(1, 2), x)


@dataclass(frozen=True)
class PairingBound:
    """Result of minimising (1/2)(1 + ee' x'^T R x) over both balls.

    lower_bound <= true minimum <= witness_value, all exact; the witness pair
    has been re-evaluated in exact arithmetic and achieves witness_value.
    """

    lower_bound: Fraction
    witness_value: Fraction
    x: RationalUnitVector
    x_prime: RationalUnitVector
    sigma_sq_bound: Fraction

    def witness_state(self, gpt: HypersphereGpt) -> State:
        return gpt.state(scale_vec(gpt.epsilon, self.x.coords))

    def witness_effect(self, gpt: HypersphereGpt) -> Effect:
        return gpt.effect(scale_vec(gpt.epsilon_prime, self.x_prime.coords))


class GapNotReached(RuntimeError):
    """The requested lower-bound/witness gap could not be certified."""


def _pairing_from_inner(gpt: HypersphereGpt, inner: Fraction) -> Fraction:
    return (ONE + gpt.epsilon * gpt.epsilon_prime * inner) / 2


def min_pairing_value(
    gpt: HypersphereGpt,
    block: Mat,
    gap: Fraction = Fraction(1, 1024),
    max_rounds: int = 12,
) -> PairingBound:
    """Bracket the minimum ball-state/ball-effect pairing under a Bloch block.

    The minimum over the two balls equals (1 - ee' sigma(R))/2 with sigma the
    spectral norm; sigma is bracketed by rational bounds tightened until the
    witness pairing sits within `gap` of the returned lower bound. gap = 0
    succeeds only when the bracket closes exactly (e.g. diagonal rational R).
    """
    d = gpt.d
    if len(block) != d or any(len(row) != d for row in block):
        raise ValueError(f"block must be {d}x{d}")
    gap = frac(gap)
    if gap < 0:
        raise ValueError("gap must be >= 0")

    ee = gpt.epsilon * gpt.epsilon_prime
    sigma_sq = sigma_sq_upper(block)
    ray, left, right = axis_rayleigh(block)

    for round_no in range(max_rounds):
        sigma_ub = sqrt_ceil(sigma_sq, bits=8 * (round_no + 1))
        lower = _pairing_from_inner(gpt, -sigma_ub)
        witness = _pairing_from_inner(gpt, -ray)
        if witness - lower <= gap:
            return PairingBound(lower, witness, right.negated(), left, sigma_sq)
        # tighten: better Rayleigh candidates, then better Gram-power bounds
        ray2, left2, right2 = best_rayleigh(block, precisions=(1 << (8 * (round_no + 1)),))
        if ray2 > ray:
            ray, left, right = ray2, left2, right2
        sigma_sq = min(sigma_sq, sigma_sq_upper_refined(block, doublings=min(round_no + 1, 6)))
    raise GapNotReached(
        f"could not close the gap to {gap} in {max_rounds} rounds "
        f"(bracket [{_pairing_from_inner(gpt, -ray)}, {_pairing_from_inner(gpt, -sqrt_ceil(sigma_sq))}])"
    )


def embed_certificate(lam: Fraction) -> HypersphereGpt:
    """Largest simple hypersphere with eps = eps' and eps*eps' <= 1/lam.

    Uses the floor-rational of 1/sqrt(lam); exact whenever 1/lam is a perfect
    rational square. The product constraint is re-checked exactly and the
    radius halved if rounding ever violated it (it cannot, but the check is
    cheap insurance).
    """
    lam = frac(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    inv = 1 / lam
    a, b = inv.numerator, inv.denominator
    eps = Fraction(int(__import__("math").isqrt(a * b)), b)
    if eps <= 0:
        eps = inv / 2  # lam so large the floor hit zero; fall back to a safe value
    while eps * eps * lam > 1:
        eps /= 2
    return HypersphereGpt(d=0, epsilon=eps, epsilon_prime=eps)


def embed_for_norm_bound_sq(lambda_sq: Fraction, d: int = 0) -> HypersphereGpt:
    """Hypersphere with (eps*eps')^2 * lambda_sq <= 1, for certificates that
    only carry the squared norm bound (induced-norm bounds are sqrt(d)-scaled
    and irrational, so they are handed around squared)."""
    lambda_sq = frac(lambda_sq)
    if lambda_sq <= 0:
        raise ValueError("lambda_sq must be positive")
    # eps**4 * lambda_sq <= 1: take eps = floor-rational of lambda_sq**(-1/4)
    inv = 1 / lambda_sq
    a, b = inv.numerator, inv.denominator
    import math

    scale = 1 << 16
    eps = Fraction(math.isqrt(math.isqrt(a * b ** 3 * scale ** 4)), b * scale)
    if eps <= 0:
        eps = Fraction(1, isqrt_ceil(isqrt_ceil(lambda_sq.__ceil__())) + 1)
    while eps ** 4 * lambda_sq > 1:
        eps /= 2
    return HypersphereGpt(d=d, epsilon=eps, epsilon_prime=eps)


def _ball_point(rng: random.Random, d: int, radius: Fraction) -> Vec:
    raw = tuple(Fraction(rng.randint(-(1 << 16), 1 << 16), 1 << 16) for _ in range(d))
    inside = clip_to_unit_ball(raw)
    return scale_vec(radius, inside.coords)


def sample_extreme(gpt: HypersphereGpt, count: int, seed: int) -> tuple[list[State], list[Effect]]:
    """Deterministic rational sample of each ball, axis points first.

    Both lists always contain the 2d signed axis points scaled to the radius
    (the representable extreme points); seeded near-boundary points fill up
    to `count` entries. The effect list ends with the unit effect.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    d = gpt.d
    states: list[State] = []
    effects: list[Effect] = []
    for i in range(d):
        axis = unit_vec(d, i)
        for sign in (ONE, -ONE):
            states.append(State(scale_vec(sign * gpt.epsilon, axis)))
            effects.append(Effect(Fraction(1, 2), scale_vec(sign * gpt.epsilon_prime, axis)))
    rng = random.Random(seed)
    while len(states) < count:
        states.append(State(_ball_point(rng, d, gpt.epsilon)))
    while len(effects) < count:
        effects.append(Effect(Fraction(1, 2), _ball_point(rng, d, gpt.epsilon_prime)))
    effects.append(unit_effect(d))
    return states, effects
