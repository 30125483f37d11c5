"""Translation-invariant chain semantics.

Sites are indexed by integers with period-2 structure: entangled states live
on (2n, 2n-1) pairs, entangled effects on (2n+1, 2n) pairs, and all sites of
the same parity share one system type. Teleportation therefore moves even
systems up the chain and odd systems down it, and every reachable outcome
probability is, up to positive scale factors, 1 +- a^T Omega_w b where
Omega_w is a word product of the entangled correlation blocks and a, b are
generator Bloch vectors.

The four elementary probability families have closed forms computed through
the teleportation channel algebra; `brute_force_chain` recomputes any of
them (and arbitrary finite scenarios) by assembling the full window tensor
and contracting the scheduled effects one at a time, which is the oracle the
closed forms are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .core import (
    Effect,
    State,
    Tensor,
    Transformation,
    apply,
    effect_tensor,
    pair_vectors,
    state_tensor,
)
from .linalg import (
    Mat,
    ONE,
    Vec,
    ZERO,
    dot,
    identity,
    mat_mul,
    mat_scale,
    mat_vec,
    norm_sq,
    transpose,
    vec,
    zero_vec,
)
from .reductions import ChainGeneratingSet
from .teleport import EntangledEffect, EntangledState
from .wordsearch import (
    BudgetReport,
    CONSISTENT,
    Certificate,
    INCONSISTENT,
    MatrixSet,
    UNKNOWN,
    Verdict,
    Word,
    boundedness_certificate,
    enumerate_products,
    product,
)

EVEN_FORWARD = "even-forward"
ODD_BACKWARD = "odd-backward"

FAMILY_EVEN = "even-teleport-measure"
FAMILY_ODD = "odd-teleport-measure"
FAMILY_SHARED = "shared-state-both-ends"
FAMILY_JOINT = "joint-effect-on-states"


@dataclass(frozen=True)
class TeleportPlan:
    """A teleportation itinerary: resource labels in application order plus
    the +- choice made at each step."""

    direction: str
    word: Word
    signs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(i) for i in self.word))
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if self.direction not in (EVEN_FORWARD, ODD_BACKWARD):
            raise ValueError(f"unknown direction {self.direction!r}")
        if len(self.word) != len(self.signs):
            raise ValueError("one sign per teleportation step")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1")
        if any(i < 1 for i in self.word):
            raise ValueError("labels are 1-based")

    @property
    def steps(self) -> int:
        return len(self.word)

    @property
    def overall_sign(self) -> int:
        return math.prod(self.signs) if self.signs else 1


def even_plan(word, signs=None) -> TeleportPlan:
    word = tuple(word)
    return TeleportPlan(EVEN_FORWARD, word, tuple(signs) if signs else (1,) * len(word))


def odd_plan(word, signs=None) -> TeleportPlan:
    word = tuple(word)
    return TeleportPlan(ODD_BACKWARD, word, tuple(signs) if signs else (1,) * len(word))


@dataclass(frozen=True)
class ChainSpec:
    """A period-2 chain: its generating set plus an optional default window."""

    generators: ChainGeneratingSet
    window: Optional[tuple[int, int]] = None

    period: int = field(default=2, init=False)

    @property
    def even_d(self) -> int:
        return self.generators.even_d

    @property
    def odd_d(self) -> int:
        return self.generators.odd_d

    def dim_at(self, site: int) -> int:
        return self.even_d if site % 2 == 0 else self.odd_d

    def omega(self, label: int) -> Mat:
        states = self.generators.entangled_states
        if not 1 <= label <= len(states):
            raise ValueError(f"entangled-state label {label} outside 1..{len(states)}")
        return states[label - 1].omega


def _signed_product(cs: ChainSpec, plan: TeleportPlan, transposed: bool) -> Mat:
    """Product of step blocks in composition order, overall sign folded in."""
    if transposed:
        acc = identity(cs.odd_d)
        for label in plan.word:  # (O_1 ... O_L)^T = O_L^T ... O_1^T
            acc = mat_mul(acc, cs.omega(label))
        acc = transpose(acc)
    else:
        acc = identity(cs.even_d)
        for label in plan.word:  # later steps multiply from the left
            acc = mat_mul(cs.omega(label), acc)
    return mat_scale(Fraction(plan.overall_sign), acc)


def even_channel(plan: TeleportPlan, cs: ChainSpec) -> Transformation:
    """Channel for teleporting an even system up by 2*steps sites:
    scale 1/2^steps, zero shift, block sign * Omega_w."""
    if plan.direction != EVEN_FORWARD:
        raise ValueError("even_channel needs an even-forward plan")
    scale = Fraction(1, 2 ** plan.steps)
    return Transformation(scale, zero_vec(cs.even_d), _signed_product(cs, plan, transposed=False))


def odd_channel(plan: TeleportPlan, cs: ChainSpec) -> Transformation:
    """Channel for teleporting an odd system down by 2*steps sites: the same
    word's product appears transposed."""
    if plan.direction != ODD_BACKWARD:
        raise ValueError("odd_channel needs an odd-backward plan")
    scale = Fraction(1, 2 ** plan.steps)
    return Transformation(scale, zero_vec(cs.odd_d), _signed_product(cs, plan, transposed=True))


# --- the four closed-form outcome families ----------------------------------


def prob_teleport_even(cs: ChainSpec, omega: State, effect: Effect, plan: TeleportPlan) -> Fraction:
    """Teleport an even state, then measure with an even effect:
    (p/2^L) * (1 + sign * f^T Omega_w v)."""
    return pair_vectors(effect.vector(), apply(even_channel(plan, cs), omega))


def prob_teleport_odd(cs: ChainSpec, omega: State, effect: Effect, plan: TeleportPlan) -> Fraction:
    """Odd counterpart: (p/2^L) * (1 + sign * v^T Omega_w f), the transposed
    product turning the state and effect roles around."""
    return pair_vectors(effect.vector(), apply(odd_channel(plan, cs), omega))


def prob_shared_state(
    cs: ChainSpec,
    label: int,
    even_effect: Effect,
    odd_effect: Effect,
    eplan: TeleportPlan,
    oplan: TeleportPlan,
) -> Fraction:
    """Teleport both halves of an entangled state apart, then measure each
    end: (p p'/2^(L1+L2)) * (1 + sign * f^T Omega_w f') where the word
    concatenates the odd steps (reversed), the state label, and the even
    steps."""
    if eplan.direction != EVEN_FORWARD or oplan.direction != ODD_BACKWARD:
        raise ValueError("prob_shared_state needs one plan of each direction")
    e_block = _signed_product(cs, eplan, transposed=False)
    # the odd channel's transposed block acts on the odd index from the right
    o_forward = mat_scale(Fraction(oplan.overall_sign), _forward_product(cs, oplan.word))
    corr = mat_mul(mat_mul(e_block, cs.omega(label)), o_forward)
    scale = Fraction(1, 2 ** (eplan.steps + oplan.steps))
    inner = dot(even_effect.bloch, mat_vec(corr, odd_effect.bloch))
    return even_effect.p * odd_effect.p * scale * (ONE + inner)


def _forward_product(cs: ChainSpec, word: Word) -> Mat:
    """Omega_{w1} @ Omega_{w2} @ ... (first label leftmost)."""
    acc = identity(cs.odd_d)
    for lab in word:
        acc = mat_mul(acc, cs.omega(lab))
    return acc


def prob_joint_effect(
    cs: ChainSpec,
    even_state: State,
    odd_state: State,
    eplan: TeleportPlan,
    oplan: TeleportPlan,
    effect_label: int,
) -> Fraction:
    """Teleport an even and an odd state to adjacent sites and measure them
    with an entangled effect: (p/2^(L1+L2)) * (1 + sign * v'^T Omega_w v).

    The degenerate case with both plans empty is the direct measurement of
    the product state. The entangled effect's own scale (1/2 in the
    canonical +- pair) is part of the exact value.
    """
    if eplan.direction != EVEN_FORWARD or oplan.direction != ODD_BACKWARD:
        raise ValueError("prob_joint_effect needs one plan of each direction")
    effects = cs.generators.entangled_effects
    if not 1 <= effect_label <= len(effects):
        raise ValueError(f"entangled-effect label {effect_label} outside 1..{len(effects)}")
    eff = effects[effect_label - 1]
    even_vec = apply(even_channel(eplan, cs), even_state)
    odd_vec = apply(odd_channel(oplan, cs), odd_state)
    inner = dot(odd_vec.bloch, mat_vec(eff.h, even_vec.bloch))
    return eff.p * (even_vec.first * odd_vec.first + inner)


# --- brute-force oracle -------------------------------------------------------


@dataclass(frozen=True)
class SiteState:
    site: int
    state: State


@dataclass(frozen=True)
class PairState:
    sites: tuple[int, int]  # (2n, 2n-1)
    state: EntangledState


@dataclass(frozen=True)
class SiteEffect:
    site: int
    effect: Effect


@dataclass(frozen=True)
class PairEffect:
    sites: tuple[int, int]  # (2n+1, 2n)
    effect: EntangledEffect


InitialItem = Union[SiteState, PairState]
ScheduleItem = Union[SiteEffect, PairEffect]


@dataclass(frozen=True)
class Scenario:
    """A finite window of the chain: initial product of generating states
    and an ordered measurement schedule. Sites without a scheduled effect
    are discarded against the unit effect."""

    window: tuple[int, int]
    initial: tuple[InitialItem, ...]
    schedule: tuple[ScheduleItem, ...]


class ScenarioError(ValueError):
    pass


def _item_sites(item) -> tuple[int, ...]:
    return item.sites if hasattr(item, "sites") else (item.site,)


def validate_scenario(cs: ChainSpec, sc: Scenario) -> None:
    """Window coverage, pair parities, and per-site dimensions.

    Entangled resources are only addressable on their designated pairs:
    states on (2n, 2n-1), effects on (2n+1, 2n). Anything else would couple
    systems of the wrong types and is rejected.
    """
    lo, hi = sc.window
    if lo > hi:
        raise ScenarioError("empty window")
    covered: set[int] = set()
    for item in sc.initial:
        sites = _item_sites(item)
        if isinstance(item, PairState):
            a, b = item.sites
            if a % 2 != 0 or b != a - 1:
                raise ScenarioError(f"entangled state on {item.sites}: must sit on (2n, 2n-1)")
            if item.state.d_c != cs.even_d or item.state.d_b != cs.odd_d:
                raise ScenarioError("entangled state dims do not match the chain")
        else:
            if item.state.d != cs.dim_at(item.site):
                raise ScenarioError(f"state at site {item.site} has wrong dimension")
        for s in sites:
            if not lo <= s <= hi:
                raise ScenarioError(f"site {s} outside window {sc.window}")
            if s in covered:
                raise ScenarioError(f"site {s} initialised twice")
            covered.add(s)
    missing = [s for s in range(lo, hi + 1) if s not in covered]
    if missing:
        raise ScenarioError(f"window sites {missing} carry no initial state")

    measured: set[int] = set()
    for item in sc.schedule:
        sites = _item_sites(item)
        if isinstance(item, PairEffect):
            a, b = item.sites
            if a % 2 == 0 or b != a - 1:
                raise ScenarioError(f"entangled effect on {item.sites}: must sit on (2n+1, 2n)")
            if item.effect.d_b != cs.odd_d or item.effect.d_a != cs.even_d:
                raise ScenarioError("entangled effect dims do not match the chain")
        else:
            if item.effect.d != cs.dim_at(item.site):
                raise ScenarioError(f"effect at site {item.site} has wrong dimension")
        for s in sites:
            if not lo <= s <= hi:
                raise ScenarioError(f"scheduled site {s} outside window (window too small)")
            if s in measured:
                raise ScenarioError(f"site {s} measured twice")
            measured.add(s)


def minimal_window(sc: Scenario) -> tuple[int, int]:
    sites = [s for item in sc.initial for s in _item_sites(item)]
    return (min(sites), max(sites))


def shift_scenario(sc: Scenario, periods: int) -> Scenario:
    """Translate every site by `periods` * 2; probabilities are unchanged."""
    k = 2 * periods

    def shift_item(item):
        if isinstance(item, SiteState):
            return SiteState(item.site + k, item.state)
        if isinstance(item, PairState):
            return PairState((item.sites[0] + k, item.sites[1] + k), item.state)
        if isinstance(item, SiteEffect):
            return SiteEffect(item.site + k, item.effect)
        return PairEffect((item.sites[0] + k, item.sites[1] + k), item.effect)

    return Scenario(
        (sc.window[0] + k, sc.window[1] + k),
        tuple(shift_item(i) for i in sc.initial),
        tuple(shift_item(i) for i in sc.schedule),
    )


def brute_force_chain(cs: ChainSpec, sc: Scenario) -> Fraction:
    """Exact joint outcome value by full tensor contraction.

    Assembles the window's product tensor (entangled pairs ordered even site
    first, matching their correlation blocks), then contracts each scheduled
    effect in order; leftover sites are closed with the unit effect. No
    channel algebra is involved.
    """
    validate_scenario(cs, sc)
    axis_sites: list[int] = []
    big: Optional[Tensor] = None
    for item in sc.initial:
        t = item.state.as_tensor() if isinstance(item, PairState) else state_tensor(item.state)
        big = t if big is None else big.outer(t)
        axis_sites.extend(_item_sites(item))
    assert big is not None

    def positions_of(sites: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(axis_sites.index(s) for s in sites)

    for item in sc.schedule:
        if isinstance(item, PairEffect):
            # effect tensor axes are (odd, even) = item.sites order
            et = item.effect.as_tensor()
            pos = positions_of(item.sites)
        else:
            et = effect_tensor(item.effect)
            pos = positions_of((item.site,))
        big = big.contract(et, pos)
        for s in _item_sites(item):
            axis_sites.remove(s)

    for s in list(axis_sites):
        d = cs.dim_at(s)
        unit = Tensor.from_coeffs((d + 1,), (ONE,) + zero_vec(d))
        big = big.contract(unit, (axis_sites.index(s),))
        axis_sites.remove(s)
    return Fraction(big.nums[0], big.den)


# --- scenario builders for the four families ----------------------------------


def _pm_effect(cs: ChainSpec, sign: int) -> EntangledEffect:
    d = cs.even_d
    ident = identity(d)
    h = ident if sign > 0 else mat_scale(Fraction(-1), ident)
    return EntangledEffect(Fraction(1, 2), h)


def scenario_teleport_even(cs: ChainSpec, omega: State, effect: Effect, plan: TeleportPlan) -> Scenario:
    """Window realising prob_teleport_even starting at site 0."""
    L = plan.steps
    initial: list[InitialItem] = [SiteState(0, omega)]
    schedule: list[ScheduleItem] = []
    for m in range(1, L + 1):
        initial.append(PairState((2 * m, 2 * m - 1), cs.generators.entangled_states[plan.word[m - 1] - 1]))
        schedule.append(PairEffect((2 * m - 1, 2 * m - 2), _pm_effect(cs, plan.signs[m - 1])))
    schedule.append(SiteEffect(2 * L, effect))
    return Scenario((0, 2 * L), tuple(initial), tuple(schedule))


def scenario_teleport_odd(cs: ChainSpec, omega: State, effect: Effect, plan: TeleportPlan) -> Scenario:
    """Window realising prob_teleport_odd starting at site 1, walking down."""
    L = plan.steps
    initial: list[InitialItem] = [SiteState(1, omega)]
    schedule: list[ScheduleItem] = []
    for m in range(1, L + 1):
        initial.append(PairState((2 - 2 * m, 1 - 2 * m), cs.generators.entangled_states[plan.word[m - 1] - 1]))
        schedule.append(PairEffect((3 - 2 * m, 2 - 2 * m), _pm_effect(cs, plan.signs[m - 1])))
    schedule.append(SiteEffect(1 - 2 * L, effect))
    return Scenario((1 - 2 * L, 1), tuple(initial), tuple(schedule))


def scenario_shared_state(
    cs: ChainSpec,
    label: int,
    even_effect: Effect,
    odd_effect: Effect,
    eplan: TeleportPlan,
    oplan: TeleportPlan,
) -> Scenario:
    L1, L2 = eplan.steps, oplan.steps
    initial: list[InitialItem] = [PairState((0, -1), cs.generators.entangled_states[label - 1])]
    schedule: list[ScheduleItem] = []
    for m in range(1, L1 + 1):
        initial.append(PairState((2 * m, 2 * m - 1), cs.generators.entangled_states[eplan.word[m - 1] - 1]))
        schedule.append(PairEffect((2 * m - 1, 2 * m - 2), _pm_effect(cs, eplan.signs[m - 1])))
    for m in range(1, L2 + 1):
        initial.append(PairState((-2 * m, -2 * m - 1), cs.generators.entangled_states[oplan.word[m - 1] - 1]))
        schedule.append(PairEffect((-2 * m + 1, -2 * m), _pm_effect(cs, oplan.signs[m - 1])))
    schedule.append(SiteEffect(2 * L1, even_effect))
    schedule.append(SiteEffect(-2 * L2 - 1, odd_effect))
    return Scenario((-2 * L2 - 1, 2 * L1), tuple(initial), tuple(schedule))


def scenario_joint_effect(
    cs: ChainSpec,
    even_state: State,
    odd_state: State,
    eplan: TeleportPlan,
    oplan: TeleportPlan,
    effect_label: int,
) -> Scenario:
    L1, L2 = eplan.steps, oplan.steps
    initial: list[InitialItem] = [SiteState(-2 * L1, even_state), SiteState(2 * L2 + 1, odd_state)]
    schedule: list[ScheduleItem] = []
    for m in range(1, L1 + 1):
        site = -2 * L1 + 2 * m
        initial.append(PairState((site, site - 1), cs.generators.entangled_states[eplan.word[m - 1] - 1]))
        schedule.append(PairEffect((site - 1, site - 2), _pm_effect(cs, eplan.signs[m - 1])))
    for m in range(1, L2 + 1):
        top = 2 * L2 + 3 - 2 * m
        initial.append(PairState((top - 1, top - 2), cs.generators.entangled_states[oplan.word[m - 1] - 1]))
        schedule.append(PairEffect((top, top - 1), _pm_effect(cs, oplan.signs[m - 1])))
    eff = cs.generators.entangled_effects[effect_label - 1]
    schedule.append(PairEffect((1, 0), eff))
    return Scenario((-2 * L1, 2 * L2 + 1), tuple(initial), tuple(schedule))


# --- consistency scan ----------------------------------------------------------


@dataclass(frozen=True)
class ChainWitness:
    """A strictly negative chain outcome value, with the full payload needed
    to replay it through the brute-force oracle."""

    family: str
    word: Word
    sign: int
    left_label: str
    right_label: str
    left_scale: Fraction
    left_bloch: Vec
    right_scale: Fraction
    right_bloch: Vec
    value: Fraction
    scaled: bool


def _require_pm_pair(cs: ChainSpec) -> tuple[int, int]:
    """Labels of the +-identity entangled effects with scale 1/2.

    The scan's per-step sign freedom and its 1/2^L scale factors are only
    valid for that canonical pair, so a chain set without it cannot be
    scanned with this machinery.
    """
    d = cs.even_d
    ident = identity(d)
    neg = mat_scale(Fraction(-1), ident)
    plus = minus = None
    for i, eff in enumerate(cs.generators.entangled_effects, start=1):
        if eff.p == Fraction(1, 2):
            if eff.h == ident:
                plus = i
            elif eff.h == neg:
                minus = i
    if plus is None or minus is None:
        raise ValueError(
            "chain scan needs the complementary identity-correlation effect pair "
            "(1/2)(u u +- sum phi phi) among the entangled effects"
        )
    return plus, minus


def replay_witness(cs: ChainSpec, w: ChainWitness) -> Fraction:
    """Recompute a scan witness through the brute-force oracle.

    Reconstructs a concrete teleportation scenario realising the witness's
    family, word, and sign, and contracts the full window tensor. The result
    equals the witness value (with scale factors included).
    """
    plus, minus = _require_pm_pair(cs)
    L = len(w.word)
    step_signs = (w.sign,) + (1,) * (L - 1) if L else ()
    if w.family == FAMILY_EVEN:
        state = State(w.right_bloch)
        effect = Effect(w.left_scale, w.left_bloch)
        if L == 0:
            if w.sign < 0:
                raise ValueError("an empty even-teleport witness cannot carry a minus sign")
            sc = scenario_teleport_even(cs, state, effect, even_plan(()))
        else:
            sc = scenario_teleport_even(cs, state, effect, even_plan(w.word, step_signs))
    elif w.family == FAMILY_ODD:
        state = State(w.left_bloch)
        effect = Effect(w.right_scale, w.right_bloch)
        # the scan's product is M_w = O_{i_L} ... O_{i_1}; the odd channel
        # realises its transpose for the reversed plan word
        sc = scenario_teleport_odd(cs, state, effect, odd_plan(tuple(reversed(w.word)), step_signs))
    elif w.family == FAMILY_SHARED:
        e_even = Effect(w.left_scale, w.left_bloch)
        e_odd = Effect(w.right_scale, w.right_bloch)
        label, rest = w.word[0], w.word[1:]
        signs = (w.sign,) + (1,) * (len(rest) - 1) if rest else ()
        eplan = even_plan(rest, signs)
        if not rest and w.sign < 0:
            # no teleport step carries the sign; use one odd step with the
            # shared state itself... not possible without another resource,
            # so fold the sign into a single even step when available
            raise ValueError("a length-1 shared-state witness cannot carry a minus sign")
        sc = scenario_shared_state(cs, label, e_even, e_odd, eplan, odd_plan(()))
    elif w.family == FAMILY_JOINT:
        odd_state = State(w.left_bloch)
        even_state = State(w.right_bloch)
        eplan = even_plan(w.word, (1,) * L)
        sc = scenario_joint_effect(
            cs, even_state, odd_state, eplan, odd_plan(()), plus if w.sign > 0 else minus
        )
    else:
        raise ValueError(f"unknown family {w.family}")
    return brute_force_chain(cs, sc)


def _scan_lists(cs: ChainSpec):
    g = cs.generators
    even_states = [(f"even state #{i}", s) for i, s in enumerate(g.even_state_list())]
    odd_states = [(f"odd state #{i}", s) for i, s in enumerate(g.odd_state_list())]
    even_effects = [(f"even effect #{i}", e) for i, e in enumerate(g.even_effect_list())]
    odd_effects = [(f"odd effect #{i}", e) for i, e in enumerate(g.odd_effect_list())]
    return even_states, odd_states, even_effects, odd_effects


def _family_value(
    cs: ChainSpec, family: str, word: Word, sign: int, left, right, scaled: bool
) -> Fraction:
    """Exact outcome value for a scan hit, recomputed from scratch."""
    b = product(cs.generators.omega_set(), word)
    if family == FAMILY_EVEN:
        inner = dot(left.bloch, mat_vec(b, right.bloch))
        r = left.p * Fraction(1, 2 ** len(word)) if scaled else ONE
    elif family == FAMILY_ODD:
        inner = dot(left.bloch, mat_vec(b, right.bloch))
        r = right.p * Fraction(1, 2 ** len(word)) if scaled else ONE
    elif family == FAMILY_SHARED:
        inner = dot(left.bloch, mat_vec(b, right.bloch))
        r = left.p * right.p * Fraction(1, 2 ** (len(word) - 1)) if scaled else ONE
    elif family == FAMILY_JOINT:
        inner = dot(left.bloch, mat_vec(b, right.bloch))
        r = Fraction(1, 2 ** (len(word) + 1)) if scaled else ONE
    else:
        raise ValueError(f"unknown family {family}")
    return r * (ONE + sign * inner)


def consistency_scan(
    cs: ChainSpec,
    max_len: int,
    budget: int,
    t_max: Optional[int] = None,
    threads: int = 1,
    include_scale: bool = True,
) -> Verdict:
    """Scan all four outcome families over all word products within budget.

    Inconsistent: some family value is strictly negative (the witness value
    is recomputed from scratch before returning). Consistent: a boundedness
    certificate for the correlation blocks exists and every family's
    generator-norm product stays within it, covering the ball families in
    closed form. Otherwise Unknown with the budget report.
    """
    g = cs.generators
    even_states, odd_states, even_effects, odd_effects = _scan_lists(cs)

    # left factors multiply Omega_w from the left, right factors from the right
    left_entries = [("effect", lbl, e) for lbl, e in even_effects] + [
        ("state", lbl, s) for lbl, s in odd_states
    ]
    right_entries = [("state", lbl, s) for lbl, s in even_states] + [
        ("effect", lbl, e) for lbl, e in odd_effects
    ]

    def family_of(left_kind: str, right_kind: str) -> str:
        if left_kind == "effect" and right_kind == "state":
            return FAMILY_EVEN
        if left_kind == "state" and right_kind == "effect":
            return FAMILY_ODD
        if left_kind == "effect" and right_kind == "effect":
            return FAMILY_SHARED
        return FAMILY_JOINT

    def check_block(b: Mat, word: Word) -> Optional[ChainWitness]:
        for lk, llbl, lobj in left_entries:
            row = mat_vec(transpose(b), lobj.bloch)  # b^T a, reused across rights
            for rk, rlbl, robj in right_entries:
                fam = family_of(lk, rk)
                if fam == FAMILY_SHARED and not word:
                    continue  # needs at least the shared state's own label
                inner = dot(row, robj.bloch)
                for sign in (1, -1):
                    if sign < 0 and fam in (FAMILY_EVEN, FAMILY_ODD) and not word:
                        continue  # no teleport step supplies a sign
                    if sign < 0 and fam == FAMILY_SHARED and len(word) < 2:
                        continue  # the shared state itself is not a signed step
                    if ONE + sign * inner < 0:
                        value = _family_value(cs, fam, word, sign, lobj, robj, include_scale)
                        assert value < 0
                        return ChainWitness(
                            fam,
                            word,
                            sign,
                            llbl,
                            rlbl,
                            getattr(lobj, "p", ONE),
                            lobj.bloch,
                            getattr(robj, "p", ONE),
                            robj.bloch,
                            value,
                            include_scale,
                        )
        return None

    _require_pm_pair(cs)
    hit = check_block(identity(cs.even_d), ())
    if hit is None:
        enum = enumerate_products(g.omega_set(), max_len, budget, threads)
        for node in enum:
            hit = check_block(node.matrix, node.word)
            if hit is not None:
                break
        if hit is None:
            # certificate path
            cert_verdict = boundedness_certificate(g.omega_set(), t_max or min(max_len, 6))
            if cert_verdict.kind == CONSISTENT:
                cert = cert_verdict.certificate
                if _norm_products_ok(cs, cert.lambda_sq):
                    return Verdict(CONSISTENT, certificate=cert)
            return Verdict(UNKNOWN, budget=enum.report())
    return Verdict(INCONSISTENT, witness=hit)


def _norm_products_ok(cs: ChainSpec, lambda_sq: Fraction) -> bool:
    """Exact per-family check max|a|^2 * max|b|^2 * lambda_sq <= 1.

    Ball families enter through their radii, which covers every ball point,
    not just the sampled axes.
    """
    g = cs.generators

    def max_norm_sq(explicit, ball) -> Fraction:
        m = max((norm_sq(x.bloch) for x in explicit), default=ZERO)
        if ball is not None:
            m = max(m, ball.radius * ball.radius)
        return m

    ev_state = max_norm_sq(g.even_states, g.even_state_ball)
    od_state = max_norm_sq(g.odd_states, g.odd_state_ball)
    ev_eff = max_norm_sq(g.even_effects, g.even_effect_ball)
    od_eff = max_norm_sq(g.odd_effects, g.odd_effect_ball)
    pairs = [
        (ev_eff, ev_state),  # even teleport-and-measure
        (od_state, od_eff),  # odd teleport-and-measure
        (ev_eff, od_eff),    # shared state measured at both ends
        (od_state, ev_state),  # joint effect on teleported states
    ]
    return all(a * b * lambda_sq <= 1 for a, b in pairs)
