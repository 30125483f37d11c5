"""Compile matrix sets and automaton instances into GPT generating sets.

Two constructions. For a single system, a matrix set becomes zero-shift
transformations (optionally together with the Bloch sign flip), paired with
ball-family states/effects plus one state built from the initial
distribution q and a complementary pair of effects built from the final
vector F scaled by the cut point. For translation-invariant chains the same
matrices become entangled-state correlation blocks, with identity-correlation
entangled effects supplying the teleportation measurements.

The point of both: the added-state/added-effect pairing after a word w equals
(1/2)(1 +- F^T M_w q / cut), so a strictly-negative outcome value exists
exactly when some word's acceptance exceeds the cut point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Effect,
    State,
    Transformation,
    bloch_flip,
    linear_transformation,
    pair,
    unit_effect,
)
from .hypersphere import BallFamily
from .linalg import (
    ONE,
    Vec,
    ZERO,
    dot,
    frac,
    isqrt_ceil,
    mat_vec,
    norm_sq,
    rank,
    scale_vec,
    unit_vec,
    vec,
)
from .teleport import EntangledEffect, EntangledState
from .wordsearch import MatrixSet, PfaInstance, Word, product

HALF = Fraction(1, 2)


def matrix_transformations(ms: MatrixSet) -> tuple[Transformation, ...]:
    """One zero-shift transformation per matrix, in label order."""
    return tuple(linear_transformation(m) for m in ms.matrices)


def transformations_with_flip(ms: MatrixSet) -> tuple[Transformation, ...]:
    """The Bloch flip v -> -v followed by one transformation per matrix.

    The flip forces any compatible state set to be symmetric, which is what
    lets ball families stand in for arbitrary full-dimensional sets.
    """
    return (bloch_flip(ms.d),) + matrix_transformations(ms)


@dataclass(frozen=True)
class SingleSystemGeneratingSet:
    """Explicit states/effects plus parametric ball families for one system."""

    d: int
    states: tuple[State, ...]
    effects: tuple[Effect, ...]
    transformations: tuple[Transformation, ...]
    state_ball: Optional[BallFamily]
    effect_ball: Optional[BallFamily]

    @property
    def epsilon(self) -> Optional[Fraction]:
        return self.state_ball.radius if self.state_ball else None

    @property
    def epsilon_prime(self) -> Optional[Fraction]:
        return self.effect_ball.radius if self.effect_ball else None

    def state_points(self) -> tuple[State, ...]:
        """Explicit states followed by the ball's signed axis points."""
        pts = list(self.states)
        if self.state_ball:
            r = self.state_ball.radius
            for i in range(self.d):
                for sign in (ONE, -ONE):
                    pts.append(State(scale_vec(sign * r, unit_vec(self.d, i))))
        return tuple(pts)

    def effect_points(self) -> tuple[Effect, ...]:
        pts = list(self.effects)
        if self.effect_ball:
            r = self.effect_ball.radius
            p = self.effect_ball.p
            for i in range(self.d):
                for sign in (ONE, -ONE):
                    pts.append(Effect(p, scale_vec(sign * r, unit_vec(self.d, i))))
        return tuple(pts)


def validate_single_system(gs: SingleSystemGeneratingSet) -> list[str]:
    """Single-party GPT checks on the listed generators; [] means valid.

    Ball minima are handled in closed form (exactly, via squared norms), so
    the ball families are covered in full, not just at sample points.
    """
    problems: list[str] = []
    d = gs.d
    u = unit_effect(d)
    if not any(e.p == 1 and all(x == 0 for x in e.bloch) for e in gs.effects):
        problems.append("unit effect missing from the explicit effect list")

    state_rows = [s.vector().coords for s in gs.state_points()]
    if rank(tuple(state_rows)) < d + 1:
        problems.append("states do not span the full space")
    effect_rows = [e.vector().coords for e in gs.effect_points() if e.p > 0]
    if rank(tuple(effect_rows)) < d + 1:
        problems.append("effects do not span the full space")

    eps = gs.epsilon
    eps_p = gs.epsilon_prime

    # explicit x explicit
    for i, e in enumerate(gs.effects):
        for j, s in enumerate(gs.states):
            v = pair(e, s)
            if v < 0:
                problems.append(f"pairing of effect {i} with state {j} is {v}")

    # explicit effect x state ball: min is p*(1 - eps*|f|)
    if eps is not None:
        for i, e in enumerate(gs.effects):
            if e.p > 0 and eps * eps * norm_sq(e.bloch) > 1:
                problems.append(f"effect {i} goes negative on the state ball")
    # effect ball x explicit state: min is (p/1)*(1 - eps'*|v|)
    if eps_p is not None:
        for j, s in enumerate(gs.states):
            if eps_p * eps_p * norm_sq(s.bloch) > 1:
                problems.append(f"state {j} goes negative on the effect ball")
    # ball x ball: min is (1 - eps*eps')/2
    if eps is not None and eps_p is not None and eps * eps_p > 1:
        problems.append(f"ball product {eps * eps_p} exceeds 1")

    # completability: u - e must stay nonnegative on the listed states
    for i, e in enumerate(gs.effects):
        comp = (u.vector().coords[0] - e.vector().coords[0],) + tuple(
            -x for x in e.vector().coords[1:]
        )
        comp_p, comp_bloch = comp[0], comp[1:]
        if comp_p < 0:
            problems.append(f"effect {i} exceeds the unit effect")
            continue
        for j, s in enumerate(gs.states):
            v = comp_p + dot(comp_bloch, s.bloch)
            if v < 0:
                problems.append(f"complement of effect {i} is negative on state {j}")
        if eps is not None and comp_p * comp_p < eps * eps * norm_sq(comp_bloch):
            problems.append(f"complement of effect {i} goes negative on the state ball")
    return problems


def safe_epsilons(pfa: PfaInstance) -> tuple[Fraction, Fraction]:
    """Ball radii guaranteed to keep every non-cut-point pairing nonnegative.

    Products of column-stochastic matrices have spectral norm at most
    sqrt(d), ||M_w q||_2 <= sqrt(d), and ||F||/cut <= sqrt(d)/cut; the crude
    choices eps = cut/d and eps' = 1/ceil(sqrt(d)) then make the ball-ball,
    q-ball, and ball-F pairings nonnegative for every word. All three
    conditions are re-checked here in squared rational form.
    """
    if not pfa.is_stochastic():
        raise ValueError("safe ball radii need column-stochastic matrices")
    d = pfa.d
    lam = pfa.cut
    eps = lam / d
    eps_p = Fraction(1, isqrt_ceil(d))
    assert eps_p * eps_p * d <= 1  # ball effects against teleported q
    assert (eps / lam) * (eps / lam) * d * d <= 1  # F-effects against the state ball
    assert (eps * eps_p) * (eps * eps_p) * d <= 1  # ball against ball
    return eps, eps_p


def cutpoint_effects(pfa: PfaInstance) -> tuple[Effect, Effect]:
    """The complementary pair (1/2)(1, +-F/cut); always a valid measurement."""
    f_over_lam = scale_vec(1 / pfa.cut, pfa.final_vec())
    return (
        Effect(HALF, f_over_lam),
        Effect(HALF, tuple(-x for x in f_over_lam)),
    )


def single_system_generating_set(
    pfa: PfaInstance, eps: Fraction, eps_prime: Fraction
) -> SingleSystemGeneratingSet:
    """Ball families plus the q-state, the +-F/cut effect pair, and one
    transformation per matrix (no flip: stochastic matrices are consistent
    on their own, so the cut-point structure alone carries the question)."""
    eps, eps_prime = frac(eps), frac(eps_prime)
    if eps <= 0 or eps_prime <= 0:
        raise ValueError("ball radii must be positive")
    if eps * eps_prime > 1:
        raise ValueError(f"ball product {eps * eps_prime} exceeds 1")
    d = pfa.d
    e_plus, e_minus = cutpoint_effects(pfa)
    return SingleSystemGeneratingSet(
        d=d,
        states=(State(pfa.q),),
        effects=(e_plus, e_minus, unit_effect(d)),
        transformations=matrix_transformations(pfa.matrices),
        state_ball=BallFamily(d, ONE, eps),
        effect_ball=BallFamily(d, HALF, eps_prime),
    )


def cutpoint_pairing(pfa: PfaInstance, w: Word, sign: int) -> Fraction:
    """Pairing of the q-state with the sign-chosen F-effect after word w:
    (1/2)(1 + sign * F^T M_w q / cut). Negative at sign -1 exactly when the
    word's acceptance exceeds the cut point."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    val = dot(pfa.final_vec(), mat_vec(product(pfa.matrices, w), pfa.q))
    return HALF * (ONE + sign * val / pfa.cut)


# --- translation-invariant chains -------------------------------------------


@dataclass(frozen=True)
class ChainGeneratingSet:
    """Period-2 chain generators: per-parity single-party families plus
    entangled states on (even, odd-below) pairs and entangled effects on
    (odd-above, even) pairs."""

    even_d: int
    odd_d: int
    even_states: tuple[State, ...]
    odd_states: tuple[State, ...]
    even_effects: tuple[Effect, ...]
    odd_effects: tuple[Effect, ...]
    entangled_states: tuple[EntangledState, ...]
    entangled_effects: tuple[EntangledEffect, ...]
    even_state_ball: Optional[BallFamily] = None
    odd_state_ball: Optional[BallFamily] = None
    even_effect_ball: Optional[BallFamily] = None
    odd_effect_ball: Optional[BallFamily] = None

    def __post_init__(self):
        for st in self.entangled_states:
            if st.d_c != self.even_d or st.d_b != self.odd_d:
                raise ValueError("entangled states must correlate (even, odd) blochs")
        for eff in self.entangled_effects:
            if eff.d_b != self.odd_d or eff.d_a != self.even_d:
                raise ValueError("entangled effects must correlate (odd, even) blochs")

    @property
    def generator_counts(self) -> tuple[int, int]:
        """(entangled states, entangled effects) modulo translations."""
        return len(self.entangled_states), len(self.entangled_effects)

    def omega_set(self) -> MatrixSet:
        return MatrixSet(tuple(st.omega for st in self.entangled_states))

    def _axis_states(self, d: int, ball: Optional[BallFamily]) -> list[State]:
        if ball is None:
            return []
        return [
            State(scale_vec(sign * ball.radius, unit_vec(d, i)))
            for i in range(d)
            for sign in (ONE, -ONE)
        ]

    def _axis_effects(self, d: int, ball: Optional[BallFamily]) -> list[Effect]:
        if ball is None:
            return []
        return [
            Effect(ball.p, scale_vec(sign * ball.radius, unit_vec(d, i)))
            for i in range(d)
            for sign in (ONE, -ONE)
        ]

    def even_state_list(self) -> tuple[State, ...]:
        return self.even_states + tuple(self._axis_states(self.even_d, self.even_state_ball))

    def odd_state_list(self) -> tuple[State, ...]:
        return self.odd_states + tuple(self._axis_states(self.odd_d, self.odd_state_ball))

    def even_effect_list(self) -> tuple[Effect, ...]:
        return self.even_effects + tuple(self._axis_effects(self.even_d, self.even_effect_ball))

    def odd_effect_list(self) -> tuple[Effect, ...]:
        return self.odd_effects + tuple(self._axis_effects(self.odd_d, self.odd_effect_ball))


def chain_generators(
    ms: MatrixSet, eps: Fraction = ONE, eps_prime: Fraction = ONE
) -> ChainGeneratingSet:
    """Entangled states from the matrices, the +-identity effect pair, and
    hypersphere single-party families on both parities."""
    eps, eps_prime = frac(eps), frac(eps_prime)
    d = ms.d
    ident = tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))
    neg_ident = tuple(tuple(-x for x in row) for row in ident)
    return ChainGeneratingSet(
        even_d=d,
        odd_d=d,
        even_states=(),
        odd_states=(),
        even_effects=(unit_effect(d),),
        odd_effects=(unit_effect(d),),
        entangled_states=tuple(EntangledState(m) for m in ms.matrices),
        entangled_effects=(EntangledEffect(HALF, ident), EntangledEffect(HALF, neg_ident)),
        even_state_ball=BallFamily(d, ONE, eps),
        odd_state_ball=BallFamily(d, ONE, eps),
        even_effect_ball=BallFamily(d, HALF, eps_prime),
        odd_effect_ball=BallFamily(d, HALF, eps_prime),
    )


def pfa_chain_generating_set(
    pfa: PfaInstance, eps: Fraction, eps_prime: Fraction
) -> ChainGeneratingSet:
    """Chain generators whose even sites additionally carry the q-state and
    the +-F/cut effect pair; odd sites stay pure hypersphere."""
    eps, eps_prime = frac(eps), frac(eps_prime)
    if eps <= 0 or eps_prime <= 0:
        raise ValueError("ball radii must be positive")
    if eps * eps_prime > 1:
        raise ValueError(f"ball product {eps * eps_prime} exceeds 1")
    base = chain_generators(pfa.matrices, eps, eps_prime)
    e_plus, e_minus = cutpoint_effects(pfa)
    return ChainGeneratingSet(
        even_d=base.even_d,
        odd_d=base.odd_d,
        even_states=(State(pfa.q),),
        odd_states=(),
        even_effects=(e_plus, e_minus) + base.even_effects,
        odd_effects=base.odd_effects,
        entangled_states=base.entangled_states,
        entangled_effects=base.entangled_effects,
        even_state_ball=base.even_state_ball,
        odd_state_ball=base.odd_state_ball,
        even_effect_ball=base.even_effect_ball,
        odd_effect_ball=base.odd_effect_ball,
    )
