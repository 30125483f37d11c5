"""Command-line front end.

Commands load JSON documents, run the searches/certifications, and emit
text or JSON reports. Exit status encodes the three-valued outcome:

    0  consistent (certificate found)
    1  inconsistent (witness found)
    2  unknown (budget exhausted)
    3  usage or parse error

Reports contain only exact rational strings and embed the construction
parameters (radii, norm bounds, words), so replaying a report needs no
recomputation; identical inputs and seed give byte-identical JSON output
regardless of thread count.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import serialize as ser
from .chainsim import ChainSpec, consistency_scan, replay_witness
from .core import State, apply
from .hypersphere import embed_for_norm_bound_sq
from .linalg import format_scalar, frac, vec
from .reductions import (
    chain_generators,
    pfa_chain_generating_set,
    safe_epsilons,
    single_system_generating_set,
    validate_single_system,
)
from .teleport import EntangledEffect, EntangledState, teleport_brute, teleport_channel
from .wordsearch import (
    CONSISTENT,
    INCONSISTENT,
    UNKNOWN,
    Verdict,
    boundedness_certificate,
    cutpoint_witness_search,
    format_word,
    unboundedness_witness_search,
)

EXIT_USAGE = 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code (2) collides with the
    'unknown' verdict, so usage errors are re-raised and mapped to 3."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    max_len: Optional[int] = None
    budget: Optional[int] = None
    threads: int = 1
    fmt: str = "text"
    seed: int = 0
    oracle: bool = False
    out: Optional[str] = None
    threshold: Fraction = Fraction(1)
    t_max: Optional[int] = None
    chain: bool = False
    epsilon: Optional[Fraction] = None
    epsilon_prime: Optional[Fraction] = None
    count: int = 20

    def require_budgets(self):
        if self.max_len is None or self.budget is None:
            raise UsageError("--max-len and --budget are mandatory for search commands")


def _read_doc(path: str) -> dict:
    try:
        with open(path) as fh:
            return ser.loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(report: dict, lines: list[str], cfg: RunConfig) -> None:
    if cfg.fmt == "json":
        payload = ser.dumps(report)
    else:
        payload = "\n".join(lines) + "\n"
    sys.stdout.write(payload)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(ser.dumps(report))


def _verdict_lines(v: Verdict) -> list[str]:
    lines = [f"verdict: {v.kind}"]
    w = v.witness
    if w is not None:
        if hasattr(w, "cut"):
            lines.append(f"witness word: {format_word(w.word)}")
            lines.append(f"acceptance: {format_scalar(w.value)} > cut point {format_scalar(w.cut)}")
        elif hasattr(w, "rayleigh"):
            lines.append(f"witness word: {format_word(w.word)}")
            lines.append(
                f"rayleigh value: {format_scalar(w.rayleigh)} > threshold {format_scalar(w.threshold)}"
            )
        elif hasattr(w, "family"):
            lines.append(f"family: {w.family}")
            lines.append(f"witness word: {format_word(w.word)}")
            lines.append(f"sign: {'+' if w.sign > 0 else '-'}")
            lines.append(f"generators: {w.left_label} vs {w.right_label}")
            lines.append(f"outcome value: {format_scalar(w.value)}")
    if v.certificate is not None:
        c = v.certificate
        lines.append(f"certificate: norm {c.norm}, block length {c.block_len}")
        lines.append(f"lambda squared: {format_scalar(c.lambda_sq)}")
    if v.budget is not None:
        b = v.budget
        lines.append(
            f"budget: max_len {b.max_len}, node budget {b.budget}, "
            f"emitted {b.emitted}, exhausted {b.exhausted}"
        )
    return lines


def cmd_check_transformations(cfg: RunConfig) -> int:
    """Semi-decide consistency of the zero-shift transformations of a matrix
    set: certificate first, then an unboundedness witness hunt against
    --threshold (the hypersphere with eps*eps' = 1/threshold)."""
    cfg.require_budgets()
    ms = ser.matrix_set_from(_read_doc(cfg.inputs[0]))
    t_max = cfg.t_max if cfg.t_max is not None else min(cfg.max_len, 8)
    verdict = boundedness_certificate(ms, t_max)
    report = {"command": "check-transformations", "input": cfg.inputs[0], "seed": cfg.seed}
    if verdict.kind == CONSISTENT:
        cert = verdict.certificate
        gpt = embed_for_norm_bound_sq(cert.lambda_sq, ms.d)
        report.update(
            ser.verdict_json(
                verdict,
                epsilon=format_scalar(gpt.epsilon),
                epsilon_prime=format_scalar(gpt.epsilon_prime),
            )
        )
        lines = _verdict_lines(verdict) + [
            f"hypersphere radii: epsilon {format_scalar(gpt.epsilon)}, "
            f"epsilon' {format_scalar(gpt.epsilon_prime)}"
        ]
        _emit(report, lines, cfg)
        return verdict.exit_code

    verdict = unboundedness_witness_search(ms, cfg.threshold, cfg.max_len, cfg.budget, cfg.threads)
    extra = {}
    lines = _verdict_lines(verdict)
    if verdict.kind == INCONSISTENT:
        w = verdict.witness
        eps = Fraction(1)
        eps_prime = 1 / cfg.threshold
        pairing = Fraction(1, 2) * (1 - eps * eps_prime * w.rayleigh)
        extra = {
            "epsilon": format_scalar(eps),
            "epsilon_prime": format_scalar(eps_prime),
            "negative_pairing": format_scalar(pairing),
        }
        lines.append(
            f"hypersphere witness: eps {format_scalar(eps)}, eps' {format_scalar(eps_prime)}, "
            f"pairing {format_scalar(pairing)}"
        )
    report.update(ser.verdict_json(verdict, threshold=format_scalar(cfg.threshold), **extra))
    _emit(report, lines, cfg)
    return verdict.exit_code


def cmd_certify(cfg: RunConfig) -> int:
    """Boundedness certificate only; never returns an inconsistency."""
    if cfg.t_max is None:
        raise UsageError("--t-max is mandatory for certify")
    ms = ser.matrix_set_from(_read_doc(cfg.inputs[0]))
    verdict = boundedness_certificate(ms, cfg.t_max)
    report = {"command": "certify", "input": cfg.inputs[0]}
    report.update(ser.verdict_json(verdict))
    _emit(report, _verdict_lines(verdict), cfg)
    return verdict.exit_code


def _stochastic_diagnosis(doc: dict) -> Optional[str]:
    from .linalg import ZERO

    pfa = ser.pfa_from(doc)
    for mi, m in enumerate(pfa.matrices.matrices, start=1):
        for j in range(pfa.d):
            col = [m[i][j] for i in range(pfa.d)]
            if any(x < 0 for x in col):
                return f"matrix {mi}, column {j + 1}: negative entry"
            if sum(col, ZERO) != 1:
                return f"matrix {mi}, column {j + 1}: sums to {format_scalar(sum(col, ZERO))}, not 1"
    return None


def cmd_compile_pfa(cfg: RunConfig) -> int:
    """Compile an automaton instance into a generating-set document."""
    doc = _read_doc(cfg.inputs[0])
    diagnosis = _stochastic_diagnosis(doc)
    if diagnosis is not None:
        raise UsageError(f"matrices are not column-stochastic: {diagnosis}")
    pfa = ser.pfa_from(doc)
    if cfg.epsilon is not None and cfg.epsilon_prime is not None:
        eps, eps_prime = cfg.epsilon, cfg.epsilon_prime
    else:
        eps, eps_prime = safe_epsilons(pfa)
    meta = {
        "epsilon": format_scalar(eps),
        "epsilon_prime": format_scalar(eps_prime),
        "cut": format_scalar(pfa.cut),
    }
    if cfg.chain:
        out_doc = ser.chain_set_json(pfa_chain_generating_set(pfa, eps, eps_prime), meta=meta)
        lines = [
            "compiled chain generating set",
            f"entangled states: {len(out_doc['entangled_states'])}, "
            f"entangled effects: {len(out_doc['entangled_effects'])}",
        ]
    else:
        gs = single_system_generating_set(pfa, eps, eps_prime)
        problems = validate_single_system(gs)
        out_doc = ser.single_set_json(gs, meta=meta)
        lines = [
            "compiled single-system generating set",
            f"states: {len(out_doc['states'])} explicit + state ball, "
            f"effects: {len(out_doc['effects'])} explicit + effect ball",
        ]
        if problems:
            lines += [f"validation: {p}" for p in problems]
            out_doc["validation"] = problems
    lines.append(f"epsilon: {format_scalar(eps)}, epsilon': {format_scalar(eps_prime)}")
    _emit(out_doc, lines, cfg)
    return 0


def cmd_witness(cfg: RunConfig) -> int:
    """Hunt for a negative-probability witness in an automaton or chain doc."""
    cfg.require_budgets()
    doc = _read_doc(cfg.inputs[0])
    if doc.get("kind") == "chain":
        return _chain_scan_impl(cfg, doc, command="witness")
    pfa = ser.pfa_from(doc)
    verdict = cutpoint_witness_search(pfa, cfg.max_len, cfg.budget, cfg.threads)
    report = {"command": "witness", "input": cfg.inputs[0], "seed": cfg.seed}
    lines = _verdict_lines(verdict)
    extra = {}
    if verdict.kind == INCONSISTENT:
        from .reductions import cutpoint_pairing

        w = verdict.witness
        gpt_value = cutpoint_pairing(pfa, w.word, -1)
        extra["gpt_value"] = format_scalar(gpt_value)
        lines.append(f"negative outcome value: {format_scalar(gpt_value)}")
    report.update(ser.verdict_json(verdict, **extra))
    _emit(report, lines, cfg)
    return verdict.exit_code


def _chain_scan_impl(cfg: RunConfig, doc: dict, command: str) -> int:
    cg = ser.chain_set_from(doc)
    cs = ChainSpec(cg)
    verdict = consistency_scan(cs, cfg.max_len, cfg.budget, t_max=cfg.t_max, threads=cfg.threads)
    report = {"command": command, "input": cfg.inputs[0], "seed": cfg.seed}
    lines = _verdict_lines(verdict)
    extra = {}
    if verdict.kind == INCONSISTENT and cfg.oracle:
        oracle_value = replay_witness(cs, verdict.witness)
        match = oracle_value == verdict.witness.value
        extra["oracle_value"] = format_scalar(oracle_value)
        extra["oracle_match"] = match
        lines.append(f"oracle cross-check: {format_scalar(oracle_value)} ({'match' if match else 'MISMATCH'})")
    if verdict.kind == CONSISTENT:
        gpt = embed_for_norm_bound_sq(verdict.certificate.lambda_sq, cs.even_d)
        extra["epsilon"] = format_scalar(gpt.epsilon)
        extra["epsilon_prime"] = format_scalar(gpt.epsilon_prime)
    report.update(ser.verdict_json(verdict, **extra))
    _emit(report, lines, cfg)
    return verdict.exit_code


def cmd_chain_scan(cfg: RunConfig) -> int:
    cfg.require_budgets()
    doc = _read_doc(cfg.inputs[0])
    if doc.get("kind") != "chain":
        raise UsageError("chain-scan expects a chain generating-set document")
    return _chain_scan_impl(cfg, doc, command="chain-scan")


def cmd_telep_demo(cfg: RunConfig) -> int:
    """Seeded random teleportation instances: closed-form channel vs the
    tensor-contraction oracle, with exact equality required."""
    rng = random.Random(cfg.seed)

    def rfrac():
        return Fraction(rng.randint(-6, 6), rng.randint(1, 6))

    rows = []
    mismatches = 0
    for i in range(cfg.count):
        da, db, dc = (rng.randint(1, 3) for _ in range(3))
        st = EntangledState([[rfrac() for _ in range(db)] for _ in range(dc)])
        eff = EntangledEffect(
            Fraction(rng.randint(1, 4), rng.randint(1, 4)),
            [[rfrac() for _ in range(da)] for _ in range(db)],
        )
        omega = State(vec([rfrac() for _ in range(da)]))
        via_channel = apply(teleport_channel(st, eff), omega)
        via_tensor = teleport_brute(st, eff, omega)
        equal = via_channel.coords == via_tensor.coords
        mismatches += 0 if equal else 1
        rows.append(
            {
                "dims": [da, db, dc],
                "weight": format_scalar(via_channel.first),
                "equal": equal,
            }
        )
    report = {
        "command": "telep-demo",
        "seed": cfg.seed,
        "count": cfg.count,
        "mismatches": mismatches,
        "instances": rows,
    }
    lines = [f"teleportation instances: {cfg.count}, mismatches: {mismatches}"] + [
        f"  dims {r['dims']}: outcome weight {r['weight']}, equal {r['equal']}" for r in rows
    ]
    _emit(report, lines, cfg)
    return 0 if mismatches == 0 else 1


def build_parser() -> Parser:
    parser = Parser(prog="gptkit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        if needs_input:
            p.add_argument("inputs", nargs=1, metavar="INPUT", help="input JSON document")
        p.add_argument("--max-len", type=int, default=None, help="maximum word length")
        p.add_argument("--budget", type=int, default=None, help="maximum distinct products to visit")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--oracle", action="store_true", help="re-verify witnesses through the tensor oracle")
        p.add_argument("--out", default=None, help="also write the JSON report here")
        p.add_argument("--threshold", default="1", help="norm threshold for unboundedness witnesses")
        p.add_argument("--t-max", dest="t_max", type=int, default=None, help="max certificate block length")
        p.add_argument("--chain", action="store_true", help="compile a chain generating set")
        p.add_argument("--epsilon", default=None)
        p.add_argument("--epsilon-prime", dest="epsilon_prime", default=None)
        p.add_argument("--count", type=int, default=20)
        p.set_defaults(func=func)
        return p

    add("check-transformations", cmd_check_transformations, "semi-decide consistency of a transformation set")
    add("certify", cmd_certify, "boundedness certificate for a matrix set")
    add("compile-pfa", cmd_compile_pfa, "compile an automaton into a generating set")
    add("witness", cmd_witness, "search for a negative-probability witness")
    add("chain-scan", cmd_chain_scan, "scan a chain generating set for inconsistencies")
    add("telep-demo", cmd_telep_demo, "teleportation channel vs oracle demo", needs_input=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = RunConfig(
            command=ns.command,
            inputs=getattr(ns, "inputs", []),
            max_len=ns.max_len,
            budget=ns.budget,
            threads=ns.threads,
            fmt=ns.fmt,
            seed=ns.seed,
            oracle=ns.oracle,
            out=ns.out,
            threshold=frac(ns.threshold),
            t_max=ns.t_max,
            chain=ns.chain,
            epsilon=frac(ns.epsilon) if ns.epsilon is not None else None,
            epsilon_prime=frac(ns.epsilon_prime) if ns.epsilon_prime is not None else None,
            count=ns.count,
        )
        return ns.func(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ser.DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
