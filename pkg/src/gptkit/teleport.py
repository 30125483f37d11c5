"""Teleportation as a probabilistic channel.

Conditioning a bipartite entangled state (correlation matrix Omega, zero
cross blocks) on a bipartite entangled effect (scale p, correlation H)
induces an unnormalised channel on the remaining system whose Bloch block is
the matrix product Omega @ H and whose scale is p. `teleport_channel`
computes that closed form; `teleport_brute` is the dumb three-system tensor
contraction used to validate it and every chain computation built on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    DimensionMismatch,
    GptVector,
    State,
    Tensor,
    Transformation,
    state_tensor,
)
from .linalg import Mat, ONE, ZERO, frac, mat, mat_mul, zero_vec


class NegativeOutcomeWeight(ValueError):
    """Post-selection hit a nonpositive outcome weight: an inconsistency witness."""

    def __init__(self, weight: Fraction):
        super().__init__(f"outcome weight {weight} is not positive")
        self.weight = weight


@dataclass(frozen=True)
class EntangledState:
    """u x u plus correlations between the two Bloch sectors; both marginals
    are automatically the completely mixed state."""

    omega: Mat  # d_c rows, d_b columns

    def __post_init__(self):
        object.__setattr__(self, "omega", mat(self.omega))
        if not self.omega or not self.omega[0]:
            raise ValueError("correlation matrix must be nonempty")

    @property
    def d_c(self) -> int:
        return len(self.omega)

    @property
    def d_b(self) -> int:
        return len(self.omega[0])

    def as_tensor(self) -> Tensor:
        dc, db = self.d_c + 1, self.d_b + 1
        coeffs = [ZERO] * (dc * db)
        coeffs[0] = ONE
        for g in range(self.d_c):
            for n in range(self.d_b):
                coeffs[(g + 1) * db + (n + 1)] = self.omega[g][n]
        return Tensor.from_coeffs((dc, db), coeffs)


@dataclass(frozen=True)
class EntangledEffect:
    """p * (u x u + correlations); the scale p must be positive."""

    p: Fraction
    h: Mat  # d_b rows, d_a columns

    def __post_init__(self):
        object.__setattr__(self, "p", frac(self.p))
        object.__setattr__(self, "h", mat(self.h))
        if self.p <= 0:
            raise ValueError("entangled effect scale must be positive")
        if not self.h or not self.h[0]:
            raise ValueError("correlation matrix must be nonempty")

    @property
    def d_b(self) -> int:
        return len(self.h)

    @property
    def d_a(self) -> int:
        return len(self.h[0])

    def as_tensor(self) -> Tensor:
        db, da = self.d_b + 1, self.d_a + 1
        coeffs = [ZERO] * (db * da)
        coeffs[0] = self.p
        for n in range(self.d_b):
            for m in range(self.d_a):
                coeffs[(n + 1) * da + (m + 1)] = self.p * self.h[n][m]
        return Tensor.from_coeffs((db, da), coeffs)


def teleport_channel(state: EntangledState, effect: EntangledEffect) -> Transformation:
    """The closed-form channel: scale p, zero shift, Bloch block Omega @ H."""
    if state.d_b != effect.d_b:
        raise DimensionMismatch(
            f"shared system dims differ: state {state.d_b}, effect {effect.d_b}"
        )
    return Transformation(effect.p, zero_vec(state.d_c), mat_mul(state.omega, effect.h))


def teleport_brute(state: EntangledState, effect: EntangledEffect, omega_a: State) -> GptVector:
    """Full tensor-contraction route to the conditional output vector.

    Builds the three-system tensor for the entangled state next to the input
    state, then contracts the effect against the shared and input systems.
    No channel algebra is used; this is the oracle the closed form is
    checked against.
    """
    if state.d_b != effect.d_b:
        raise DimensionMismatch("shared system dims differ")
    if effect.d_a != omega_a.d:
        raise DimensionMismatch(
            f"effect input dim {effect.d_a} vs state dim {omega_a.d}"
        )
    full = state.as_tensor().outer(state_tensor(omega_a))  # systems (C, B, A)
    reduced = full.contract(effect.as_tensor(), positions=(1, 2))
    return GptVector(reduced.coeffs())


def condition_and_normalize(v: GptVector) -> tuple[Fraction, State]:
    """Split an unnormalised outcome vector into (probability, state).

    A nonpositive first coordinate is reported as an inconsistency witness
    rather than silently rescaled.
    """
    weight = v.first
    if weight <= 0:
        raise NegativeOutcomeWeight(weight)
    return weight, State(tuple(x / weight for x in v.bloch))


def perfect_channel(d: int, p: Fraction = Fraction(1, 2)) -> Transformation:
    """Identity-correlation teleportation: the channel p * identity."""
    st = EntangledState([[ONE if i == j else ZERO for j in range(d)] for i in range(d)])
    eff = EntangledEffect(p, [[ONE if i == j else ZERO for j in range(d)] for i in range(d)])
    return teleport_channel(st, eff)
