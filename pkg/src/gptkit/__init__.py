"""gptkit: exact-rational generalised-probabilistic-theory toolkit.

States, effects, transformations, and composites over exact rationals;
teleportation channels with a tensor-contraction oracle; word-product
searches for negative-probability witnesses; sub-multiplicative-norm
boundedness certificates; and compilers from probabilistic-automaton
instances into the corresponding generating sets, for single systems and
translation-invariant chains.
"""

from .core import (
    DimensionMismatch,
    Effect,
    GptVector,
    Measurement,
    State,
    Tensor,
    Transformation,
    apply,
    compose,
    marginalize,
    mixed_state,
    pair,
    pair_tensor,
    preserves_unit,
    tensor_effects,
    tensor_states,
    unit_effect,
    validate_measurement,
    zero_effect,
)
from .hypersphere import (
    BallFamily,
    HypersphereGpt,
    RationalUnitVector,
    embed_certificate,
    embed_for_norm_bound_sq,
    min_pairing_value,
    sample_extreme,
)
from .teleport import (
    EntangledEffect,
    EntangledState,
    NegativeOutcomeWeight,
    condition_and_normalize,
    teleport_brute,
    teleport_channel,
)
from .wordsearch import (
    CONSISTENT,
    INCONSISTENT,
    UNKNOWN,
    MatrixSet,
    PfaInstance,
    Verdict,
    acceptance,
    boundedness_certificate,
    cutpoint_witness_search,
    enumerate_products,
    norms,
    product,
    unboundedness_witness_search,
)
from .reductions import (
    ChainGeneratingSet,
    SingleSystemGeneratingSet,
    chain_generators,
    cutpoint_pairing,
    matrix_transformations,
    pfa_chain_generating_set,
    safe_epsilons,
    single_system_generating_set,
    transformations_with_flip,
    validate_single_system,
)
from .chainsim import (
    ChainSpec,
    Scenario,
    TeleportPlan,
    brute_force_chain,
    consistency_scan,
    even_channel,
    even_plan,
    odd_channel,
    odd_plan,
    prob_joint_effect,
    prob_shared_state,
    prob_teleport_even,
    prob_teleport_odd,
    replay_witness,
)

__version__ = "0.1.0"
