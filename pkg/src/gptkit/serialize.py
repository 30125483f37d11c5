"""JSON documents with exact rational scalars.

Every number that is not structurally an integer (a dimension, a site index,
a word label) is serialized as the string "num/den" (or "num" when the
denominator is 1); floats never appear. Documents are dumped with sorted
keys and fixed separators, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .chainsim import (
    ChainSpec,
    PairEffect,
    PairState,
    Scenario,
    SiteEffect,
    SiteState,
    TeleportPlan,
    ChainWitness,
)
from .core import Effect, State, Transformation
from .hypersphere import BallFamily, HypersphereGpt
from .linalg import Mat, Vec, format_scalar, frac, mat, transpose, vec
from .reductions import ChainGeneratingSet, SingleSystemGeneratingSet
from .spectral import RationalUnitVector
from .teleport import EntangledEffect, EntangledState
from .wordsearch import (
    BudgetReport,
    Certificate,
    CutpointWitness,
    MatrixSet,
    NormWitness,
    PfaInstance,
    Verdict,
    Word,
)


class DocumentError(ValueError):
    """A document failed to parse; the message names the offending field."""


def _scal(x: Fraction) -> str:
    return format_scalar(x)


def _vec_json(v: Vec) -> list[str]:
    return [_scal(x) for x in v]


def _mat_json(m: Mat) -> list[list[str]]:
    return [[_scal(x) for x in row] for row in m]


def _parse_scalar(x: Any, where: str) -> Fraction:
    try:
        return frac(x)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def _parse_vec(x: Any, where: str) -> Vec:
    if not isinstance(x, list):
        raise DocumentError(f"{where}: expected a list")
    return tuple(_parse_scalar(e, f"{where}[{i}]") for i, e in enumerate(x))


def _parse_mat(x: Any, where: str) -> Mat:
    if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
        raise DocumentError(f"{where}: expected a list of rows")
    rows = tuple(_parse_vec(r, f"{where}[{i}]") for i, r in enumerate(x))
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise DocumentError(f"{where}: ragged rows")
    return rows


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("top-level document must be an object")
    return doc


# --- simple objects ----------------------------------------------------------


def state_json(s: State, **extra) -> dict:
    return {"v": _vec_json(s.bloch), **extra}


def state_from(doc: dict, where: str = "state") -> State:
    return State(_parse_vec(doc.get("v"), f"{where}.v"))


def effect_json(e: Effect, **extra) -> dict:
    return {"p": _scal(e.p), "f": _vec_json(e.bloch), **extra}


def effect_from(doc: dict, where: str = "effect") -> Effect:
    return Effect(_parse_scalar(doc.get("p"), f"{where}.p"), _parse_vec(doc.get("f"), f"{where}.f"))


def transformation_json(t: Transformation) -> dict:
    return {"scale": _scal(t.scale), "shift": _vec_json(t.shift), "block": _mat_json(t.block)}


def transformation_from(doc: dict, where: str = "transformation") -> Transformation:
    return Transformation(
        _parse_scalar(doc.get("scale", 1), f"{where}.scale"),
        _parse_vec(doc.get("shift"), f"{where}.shift"),
        _parse_mat(doc.get("block"), f"{where}.block"),
    )


def entangled_state_json(s: EntangledState) -> dict:
    return {"omega": _mat_json(s.omega)}


def entangled_state_from(doc: dict, where: str = "entangled_state") -> EntangledState:
    return EntangledState(_parse_mat(doc.get("omega"), f"{where}.omega"))


def entangled_effect_json(e: EntangledEffect) -> dict:
    return {"p": _scal(e.p), "H": _mat_json(e.h)}


def entangled_effect_from(doc: dict, where: str = "entangled_effect") -> EntangledEffect:
    return EntangledEffect(
        _parse_scalar(doc.get("p"), f"{where}.p"), _parse_mat(doc.get("H"), f"{where}.H")
    )


def ball_json(b: BallFamily, role: str, parity: str | None = None) -> dict:
    doc = {"d": b.d, "p": _scal(b.p), "radius": _scal(b.radius), "role": role}
    if parity is not None:
        doc["parity"] = parity
    return doc


def ball_from(doc: dict, where: str = "ball_family") -> BallFamily:
    return BallFamily(
        int(doc.get("d", 0)),
        _parse_scalar(doc.get("p"), f"{where}.p"),
        _parse_scalar(doc.get("radius"), f"{where}.radius"),
    )


def hypersphere_json(g: HypersphereGpt) -> dict:
    return {"d": g.d, "epsilon": _scal(g.epsilon), "epsilon_prime": _scal(g.epsilon_prime)}


def hypersphere_from(doc: dict) -> HypersphereGpt:
    return HypersphereGpt(
        int(doc.get("d", 0)),
        _parse_scalar(doc.get("epsilon"), "hypersphere.epsilon"),
        _parse_scalar(doc.get("epsilon_prime"), "hypersphere.epsilon_prime"),
    )


# --- matrix sets and automata --------------------------------------------------


def matrix_set_json(ms: MatrixSet) -> dict:
    return {"dim": ms.d, "matrices": [_mat_json(m) for m in ms.matrices]}


def matrix_set_from(doc: dict) -> MatrixSet:
    raw = doc.get("matrices")
    if not isinstance(raw, list):
        raise DocumentError("matrices: expected a list")
    mats = tuple(_parse_mat(m, f"matrices[{i}]") for i, m in enumerate(raw))
    dim = doc.get("dim")
    return MatrixSet(mats, dim=int(dim) if dim is not None else None)


def pfa_json(pfa: PfaInstance) -> dict:
    return {
        "matrices": [_mat_json(m) for m in pfa.matrices.matrices],
        "q": _vec_json(pfa.q),
        "F": list(pfa.final),
        "lambda": _scal(pfa.cut),
        "convention": "column",
    }


def pfa_from(doc: dict) -> PfaInstance:
    convention = doc.get("convention", "column")
    if convention not in ("column", "row"):
        raise DocumentError(f"convention: expected 'column' or 'row', got {convention!r}")
    raw = doc.get("matrices")
    if not isinstance(raw, list) or not raw:
        raise DocumentError("matrices: expected a nonempty list")
    mats = [_parse_mat(m, f"matrices[{i}]") for i, m in enumerate(raw)]
    if convention == "row":
        mats = [transpose(m) for m in mats]
    try:
        return PfaInstance(
            MatrixSet(tuple(mats)),
            _parse_vec(doc.get("q"), "q"),
            tuple(doc.get("F", ())),
            _parse_scalar(doc.get("lambda"), "lambda"),
        )
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


# --- generating sets ------------------------------------------------------------


def single_set_json(gs: SingleSystemGeneratingSet, meta: dict | None = None) -> dict:
    doc = {
        "kind": "single",
        "dimension": gs.d,
        "states": [state_json(s) for s in gs.states],
        "effects": [effect_json(e) for e in gs.effects],
        "transformations": [transformation_json(t) for t in gs.transformations],
        "entangled_states": [],
        "entangled_effects": [],
        "ball_families": [],
    }
    if gs.state_ball:
        doc["ball_families"].append(ball_json(gs.state_ball, role="state"))
    if gs.effect_ball:
        doc["ball_families"].append(ball_json(gs.effect_ball, role="effect"))
    if meta:
        doc["meta"] = meta
    return doc


def single_set_from(doc: dict) -> SingleSystemGeneratingSet:
    d = int(doc.get("dimension", 0))
    state_ball = effect_ball = None
    for b in doc.get("ball_families", []):
        fam = ball_from(b)
        if b.get("role") == "state":
            state_ball = fam
        elif b.get("role") == "effect":
            effect_ball = fam
    return SingleSystemGeneratingSet(
        d=d,
        states=tuple(state_from(s, f"states[{i}]") for i, s in enumerate(doc.get("states", []))),
        effects=tuple(effect_from(e, f"effects[{i}]") for i, e in enumerate(doc.get("effects", []))),
        transformations=tuple(
            transformation_from(t, f"transformations[{i}]")
            for i, t in enumerate(doc.get("transformations", []))
        ),
        state_ball=state_ball,
        effect_ball=effect_ball,
    )


def chain_set_json(cg: ChainGeneratingSet, meta: dict | None = None) -> dict:
    doc = {
        "kind": "chain",
        "even_dimension": cg.even_d,
        "odd_dimension": cg.odd_d,
        "states": [state_json(s, parity="even") for s in cg.even_states]
        + [state_json(s, parity="odd") for s in cg.odd_states],
        "effects": [effect_json(e, parity="even") for e in cg.even_effects]
        + [effect_json(e, parity="odd") for e in cg.odd_effects],
        "transformations": [],
        "entangled_states": [entangled_state_json(s) for s in cg.entangled_states],
        "entangled_effects": [entangled_effect_json(e) for e in cg.entangled_effects],
        "ball_families": [],
    }
    for ball, role, parity in (
        (cg.even_state_ball, "state", "even"),
        (cg.odd_state_ball, "state", "odd"),
        (cg.even_effect_ball, "effect", "even"),
        (cg.odd_effect_ball, "effect", "odd"),
    ):
        if ball:
            doc["ball_families"].append(ball_json(ball, role=role, parity=parity))
    if meta:
        doc["meta"] = meta
    return doc


def chain_set_from(doc: dict) -> ChainGeneratingSet:
    even_d = int(doc.get("even_dimension", 0))
    odd_d = int(doc.get("odd_dimension", even_d))
    balls = {"state": {}, "effect": {}}
    for b in doc.get("ball_families", []):
        balls[b.get("role", "state")][b.get("parity", "even")] = ball_from(b)

    def split(items, build, where):
        even, odd = [], []
        for i, item in enumerate(items):
            target = odd if item.get("parity") == "odd" else even
            target.append(build(item, f"{where}[{i}]"))
        return tuple(even), tuple(odd)

    even_states, odd_states = split(doc.get("states", []), state_from, "states")
    even_effects, odd_effects = split(doc.get("effects", []), effect_from, "effects")
    return ChainGeneratingSet(
        even_d=even_d,
        odd_d=odd_d,
        even_states=even_states,
        odd_states=odd_states,
        even_effects=even_effects,
        odd_effects=odd_effects,
        entangled_states=tuple(
            entangled_state_from(s, f"entangled_states[{i}]")
            for i, s in enumerate(doc.get("entangled_states", []))
        ),
        entangled_effects=tuple(
            entangled_effect_from(e, f"entangled_effects[{i}]")
            for i, e in enumerate(doc.get("entangled_effects", []))
        ),
        even_state_ball=balls["state"].get("even"),
        odd_state_ball=balls["state"].get("odd"),
        even_effect_ball=balls["effect"].get("even"),
        odd_effect_ball=balls["effect"].get("odd"),
    )


def generating_set_from(doc: dict):
    kind = doc.get("kind")
    if kind == "single":
        return single_set_from(doc)
    if kind == "chain":
        return chain_set_from(doc)
    raise DocumentError(f"kind: expected 'single' or 'chain', got {kind!r}")


# --- verdicts --------------------------------------------------------------------


def _word_json(w: Word) -> list[int]:
    return list(w)


def _unit_vector_json(v: RationalUnitVector) -> dict:
    return {"coords": _vec_json(v.coords), "norm_squared": _scal(v.norm_squared)}


def verdict_json(v: Verdict, **extra) -> dict:
    doc: dict = {"verdict": v.kind, **extra}
    w = v.witness
    if isinstance(w, CutpointWitness):
        doc["witness"] = {
            "type": "cutpoint",
            "word": _word_json(w.word),
            "value": _scal(w.value),
            "cut": _scal(w.cut),
        }
    elif isinstance(w, NormWitness):
        doc["witness"] = {
            "type": "norm-threshold",
            "word": _word_json(w.word),
            "rayleigh": _scal(w.rayleigh),
            "threshold": _scal(w.threshold),
            "left": _unit_vector_json(w.left),
            "right": _unit_vector_json(w.right),
        }
    elif isinstance(w, ChainWitness):
        doc["witness"] = {
            "type": "chain",
            "family": w.family,
            "word": _word_json(w.word),
            "sign": w.sign,
            "left": w.left_label,
            "right": w.right_label,
            "value": _scal(w.value),
            "scaled": w.scaled,
        }
    elif w is not None:
        raise TypeError(f"cannot serialize witness {type(w).__name__}")
    if v.certificate is not None:
        c = v.certificate
        doc["certificate"] = {
            "norm": c.norm,
            "block_len": c.block_len,
            "lambda_sq": _scal(c.lambda_sq),
            "dim": c.dim,
        }
    if v.budget is not None:
        b = v.budget
        doc["budget"] = {
            "max_len": b.max_len,
            "budget": b.budget,
            "emitted": b.emitted,
            "visited": b.visited,
            "exhausted": b.exhausted,
        }
    return doc


# --- scenarios -------------------------------------------------------------------


def plan_json(p: TeleportPlan) -> dict:
    return {
        "direction": p.direction,
        "word": list(p.word),
        "signs": ["+" if s > 0 else "-" for s in p.signs],
    }


def plan_from(doc: dict, where: str = "plan") -> TeleportPlan:
    signs = tuple(1 if s in ("+", 1) else -1 for s in doc.get("signs", []))
    return TeleportPlan(doc.get("direction", ""), tuple(doc.get("word", [])), signs)


def scenario_json(sc: Scenario, plan: TeleportPlan | None = None) -> dict:
    initial = []
    for item in sc.initial:
        if isinstance(item, SiteState):
            initial.append({"site": item.site, "state": state_json(item.state)})
        else:
            initial.append({"sites": list(item.sites), "entangled_state": entangled_state_json(item.state)})
    schedule = []
    for item in sc.schedule:
        if isinstance(item, SiteEffect):
            schedule.append({"site": item.site, "effect": effect_json(item.effect)})
        else:
            schedule.append({"sites": list(item.sites), "entangled_effect": entangled_effect_json(item.effect)})
    doc = {"window": list(sc.window), "initial": initial, "schedule": schedule}
    if plan is not None:
        doc["plan"] = plan_json(plan)
    return doc


def scenario_from(doc: dict) -> Scenario:
    window = doc.get("window")
    if not isinstance(window, list) or len(window) != 2:
        raise DocumentError("window: expected [lo, hi]")
    initial = []
    for i, item in enumerate(doc.get("initial", [])):
        if "site" in item:
            initial.append(SiteState(int(item["site"]), state_from(item.get("state", {}), f"initial[{i}].state")))
        else:
            sites = item.get("sites")
            if not isinstance(sites, list) or len(sites) != 2:
                raise DocumentError(f"initial[{i}].sites: expected [even, odd]")
            initial.append(
                PairState((int(sites[0]), int(sites[1])), entangled_state_from(item.get("entangled_state", {}), f"initial[{i}]"))
            )
    schedule = []
    for i, item in enumerate(doc.get("schedule", [])):
        if "site" in item:
            schedule.append(SiteEffect(int(item["site"]), effect_from(item.get("effect", {}), f"schedule[{i}].effect")))
        else:
            sites = item.get("sites")
            if not isinstance(sites, list) or len(sites) != 2:
                raise DocumentError(f"schedule[{i}].sites: expected [odd, even]")
            schedule.append(
                PairEffect((int(sites[0]), int(sites[1])), entangled_effect_from(item.get("entangled_effect", {}), f"schedule[{i}]"))
            )
    return Scenario((int(window[0]), int(window[1])), tuple(initial), tuple(schedule))
