"""Termination checking strategies producing proof reports."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .gen import lhs_instances
from .manifest import Manifest
from .modular import ModularConfig, SplitSpec, check_modular_sn, explicit_split, split_fo_ho
from .orders import TypeOrder, synthesize_precedence
from .printing import show
from .report import Obligation, ProofReport
from .rewrite import LoopWitness, NonSN, SN, find_loop, sn_oracle
from .rules import ComputationSystem
from .schema import GSConfig, GSResult, check_general_schema

STRATEGIES = ("auto", "gs", "modular", "oracle", "loop")


@dataclass
class CheckOptions:
    subterm: Optional[str] = None
    clause5: Optional[str] = None
    type_order: Optional[str] = None
    weights_bound: Optional[int] = None
    oracle_depth: Optional[int] = None
    oracle_width: Optional[int] = None
    split: Optional[str] = None  # "auto" or "manifest"
    external_fo: Optional[str] = None
    loop_seed_depth: int = 2
    loop_steps: int = 50


def _settings(m: Manifest, o: CheckOptions) -> dict:
    def num(key: str, given: Optional[int], default: int) -> int:
        return given if given is not None else int(m.option(key, str(default)))

    return {
        "gs": GSConfig(
            TypeOrder(o.type_order or m.option("type-order", "default")),
            o.subterm or m.option("subterm", "stable"),
            o.clause5 or m.option("clause5", "lex"),
        ),
        "weights_bound": num("weights-bound", o.weights_bound, 2),
        "oracle_depth": num("oracle-depth", o.oracle_depth, 3),
        "oracle_width": num("oracle-width", o.oracle_width, 10_000),
        "strict_layer": m.option("layer", "relaxed") == "strict",
    }


# --- general schema -------------------------------------------------------------


def gs_obligations(res: GSResult) -> list[Obligation]:
    obs = [
        Obligation(
            "precedence",
            "discharged" if res.well_founded else "failed",
            [f"{line}" for line in res.precedence.describe()] or ["(no strict relations used)"],
        )
    ]
    for o in res.outcomes:
        name = f"rule ({o.rule.name})"
        if o.ok:
            assert o.derivation is not None
            obs.append(Obligation(name, "discharged", o.derivation.lines()))
        else:
            assert o.failure is not None
            obs.append(Obligation(name, "failed", [o.failure.describe()]))
    return obs


def check_gs(m: Manifest, o: CheckOptions, name: str = "") -> ProofReport:
    s = _settings(m, o)
    cs = m.system
    prec = synthesize_precedence(cs, m.precedence or None)
    res = check_general_schema(cs, s["gs"], prec)
    obs = gs_obligations(res)
    obs[0].evidence.insert(0, f"subterm ordering: {res.config.variant}, clause 5: {res.config.extension}, type order: {res.config.order.kind}")
    rep = ProofReport("YES" if res.ok else "MAYBE", "GS", name, obs, [] if res.ok else res.reasons())
    rep.artifacts["gs"] = res
    return rep


# --- modular ------------------------------------------------------------------------


def _manifest_split(m: Manifest, cs: ComputationSystem) -> Optional[SplitSpec]:
    if m.split == "explicit":
        return explicit_split(cs, m.split_a, m.split_b)
    if m.split == "auto-fo":
        return split_fo_ho(cs)
    return None


def candidate_splits(m: Manifest, o: CheckOptions) -> list[tuple[str, SplitSpec]]:
    cs = m.system
    if o.split == "auto":
        return [("auto first-order split", split_fo_ho(cs))]
    if o.split == "manifest":
        sp = _manifest_split(m, cs)
        return [("manifest split", sp)] if sp else []
    out = []
    sp = _manifest_split(m, cs)
    if sp is not None:
        out.append(("manifest split", sp))
    if m.split != "auto-fo":
        out.append(("auto first-order split", split_fo_ho(cs)))
    return out


def check_modular(m: Manifest, o: CheckOptions, name: str = "", skip_trivial: bool = False) -> ProofReport:
    s = _settings(m, o)
    cs = m.system
    cfg = ModularConfig(s["gs"], s["weights_bound"], o.external_fo, s["strict_layer"], m.precedence)
    reasons: list[str] = []
    last: Optional[ProofReport] = None
    splits = candidate_splits(m, o)
    if not splits:
        return ProofReport("MAYBE", "MODULAR", name, [], ["no split available"])
    for label, sp in splits:
        if skip_trivial and (not sp.rulesA or not sp.rulesB):
            reasons.append(f"{label}: one part is empty")
            continue
        res = check_modular_sn(cs, sp, cfg)
        obs = list(res.obligations)
        if res.ok:
            rep = ProofReport("YES", "MODULAR", name, obs)
            rep.artifacts["modular"] = res
            return rep
        reasons.extend(f"{label}: obligation {n} failed" for n in res.failed)
        for ob in obs:
            if not ob.ok:
                reasons.extend(f"{label}: {e}" for e in ob.evidence)
        last = ProofReport("MAYBE", "MODULAR", name, obs, reasons)
    return last or ProofReport("MAYBE", "MODULAR", name, [], reasons)


# --- oracle and loops ---------------------------------------------------------------


def witness_lines(w: LoopWitness, cs: ComputationSystem) -> list[str]:
    lines = [show(t) for t in w.terms]
    kind = "cycle" if w.is_cycle else f"term {w.start} reappears at position {list(w.position)}"
    return [f"{i}: {t}" for i, t in enumerate(lines)] + [f"{kind}; replay {'succeeds' if w.replay(cs) else 'FAILS'}"]


def check_loop(m: Manifest, o: CheckOptions, name: str = "") -> ProofReport:
    s = _settings(m, o)
    cs = m.system
    w = find_loop(cs, seed_depth=o.loop_seed_depth, step_budget=o.loop_steps, width_budget=s["oracle_width"])
    if w is None:
        return ProofReport("MAYBE", "LOOP", name, [Obligation("loop search", "failed", ["no loop found from lhs instances"])],
                           ["no loop found"])
    rep = ProofReport("NO", "LOOP", name, [Obligation("loop", "discharged", witness_lines(w, cs))])
    rep.artifacts["witness"] = w
    return rep


def oracle_seeds(cs: ComputationSystem, depth: int) -> list:
    seeds: list = []
    for r in cs.rules:
        seeds.extend(lhs_instances(cs, r, depth))
    return seeds


def check_oracle(m: Manifest, o: CheckOptions, name: str = "") -> ProofReport:
    s = _settings(m, o)
    cs = m.system
    seeds = oracle_seeds(cs, s["oracle_depth"])
    res = sn_oracle(cs, seeds, depth_budget=50, width_budget=s["oracle_width"])
    if isinstance(res, NonSN):
        rep = ProofReport("NO", "ORACLE", name, [Obligation("non-termination", "discharged", witness_lines(res.witness, cs))])
        rep.artifacts["witness"] = res.witness
        return rep
    if isinstance(res, SN):
        ev = [f"{len(seeds)} lhs instances of depth <= {s['oracle_depth']} terminate, longest reduction {res.max_depth}"]
        return ProofReport("MAYBE", "ORACLE", name, [Obligation("bounded exploration", "discharged", ev)],
                           ["bounded exploration is not a termination proof"])
    return ProofReport("MAYBE", "ORACLE", name, [Obligation("bounded exploration", "failed", [res.reason])], [res.reason])


# --- driver -----------------------------------------------------------------------------


def run_check(m: Manifest, strategy: str = "auto", options: Optional[CheckOptions] = None, name: str = "") -> ProofReport:
    o = options or CheckOptions()
    start = time.perf_counter()
    if strategy == "gs":
        rep = check_gs(m, o, name)
    elif strategy == "modular":
        rep = check_modular(m, o, name)
    elif strategy == "oracle":
        rep = check_oracle(m, o, name)
    elif strategy == "loop":
        rep = check_loop(m, o, name)
    elif strategy == "auto":
        reasons: list[str] = []
        rep = check_gs(m, o, name)
        if rep.verdict != "YES":
            reasons.extend(f"GS: {r}" for r in rep.reasons)
            rep = check_modular(m, o, name, skip_trivial=True)
        if rep.verdict != "YES":
            reasons.extend(f"MODULAR: {r}" for r in rep.reasons)
            rep = check_loop(m, o, name)
        if rep.verdict == "MAYBE":
            reasons.extend(f"LOOP: {r}" for r in rep.reasons)
            rep = ProofReport("MAYBE", "NONE", name, [], reasons)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    rep.timings["total"] = time.perf_counter() - start
    return rep
