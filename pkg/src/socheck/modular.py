"""Modular termination: split a system into a lower part A and an upper
part B, then discharge

    (0) the combination assumptions, including the A-layer condition,
    (i) accessibility of every rhs metavariable of A,
    (ii) termination of A together with the projection rules,
    (iii) termination of B by the general schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .fo_dp import prove_dp
from .fotrs import NotFirstOrder, fo_rules, run_external
from .orders import TypeOrder, synthesize_precedence
from .printing import show
from .report import Obligation
from .rules import ComputationSystem, Rule, make_rule
from .schema import STABLE, STRUCTURAL, GSConfig, GSResult, accessible_metavars, check_general_schema
from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, fun_symbols, metavars
from .types import FunType, MolType, Signature, mangle
from .weights import LinearWeight, find_linear_weights, monotonicity_violations, verify_weights


class InvalidSplit(Exception):
    pass


class NameClash(Exception):
    pass


@dataclass(frozen=True)
class SplitSpec:
    sigmaA: frozenset[str]
    sigmaB: frozenset[str]
    theta: frozenset[str]
    rulesA: tuple[Rule, ...]
    rulesB: tuple[Rule, ...]

    @staticmethod
    def from_rules(sig: Signature, rulesA: Iterable[Rule], rulesB: Iterable[Rule]) -> "SplitSpec":
        ra, rb = tuple(rulesA), tuple(rulesB)
        a = frozenset(r.head for r in ra)
        b = frozenset(r.head for r in rb)
        theta = frozenset(sig.symbols) - a - b
        return SplitSpec(a, b, theta, ra, rb)

    def problems(self) -> list[str]:
        """Violations of the partition assumptions (empty when valid)."""
        out = []
        both = self.sigmaA & self.sigmaB
        if both:
            out.append(f"symbols defined in both parts: {', '.join(sorted(both))}")
        allowed = self.sigmaA | self.theta
        for r in self.rulesA:
            bad = (fun_symbols(r.lhs) | fun_symbols(r.rhs)) - allowed
            if bad:
                out.append(f"rule ({r.name}) of A mentions {', '.join(sorted(bad))} outside A and the constructors")
        return out


def explicit_split(cs: ComputationSystem, names_a: Sequence[str], names_b: Sequence[str]) -> SplitSpec:
    known = {r.name for r in cs.rules}
    unknown = [n for n in list(names_a) + list(names_b) if n not in known]
    if unknown:
        raise InvalidSplit(f"split names unknown rules: {', '.join(unknown)}")
    overlap = set(names_a) & set(names_b)
    if overlap:
        raise InvalidSplit(f"rules in both parts: {', '.join(sorted(overlap))}")
    missing = known - set(names_a) - set(names_b)
    if missing:
        raise InvalidSplit(f"rules in neither part: {', '.join(sorted(missing))}")
    a = [cs.rule(n) for n in names_a]
    b = [cs.rule(n) for n in names_b]
    return SplitSpec.from_rules(cs.signature, a, b)


def split_fo_ho(cs: ComputationSystem) -> SplitSpec:
    """Largest lower part whose defined symbols are first-order and whose
    rules never mention an upper-part symbol."""
    sig = cs.signature
    a_syms = {f for f in cs.defined if sig.symbols[f].is_first_order()}
    changed = True
    while changed:
        changed = False
        b_syms = cs.defined - a_syms
        for r in cs.rules:
            if r.head in a_syms and (fun_symbols(r.lhs) | fun_symbols(r.rhs)) & b_syms:
                a_syms.discard(r.head)
                changed = True
    ra = [r for r in cs.rules if r.head in a_syms]
    rb = [r for r in cs.rules if r.head not in a_syms]
    return SplitSpec.from_rules(sig, ra, rb)


# --- obligation (0): the A-layer condition ------------------------------------


def _sub_meta_terms(t: MetaTerm) -> Iterable[MetaTerm]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Fun):
            stack.extend(a.body for a in reversed(s.args))
        elif isinstance(s, MetaApp):
            stack.extend(reversed(s.args))
        elif isinstance(s, Abs):
            stack.append(s.body)


def _pattern_like(t: MetaTerm, strict: bool) -> Optional[MetaTerm]:
    for s in _sub_meta_terms(t):
        if isinstance(s, MetaApp):
            idx = [a.index for a in s.args if isinstance(a, Bound)]
            if len(idx) != len(s.args) or (strict and len(set(idx)) != len(idx)):
                return s
    return None


def check_A_layer(
    rule: Rule, sigmaA: Iterable[str], theta: Iterable[str], strict: bool = False
) -> tuple[bool, Optional[MetaTerm]]:
    """Every A-headed sub-meta-term of either side uses only A symbols and
    constructors, and its meta-applications take bound variables.

    ``strict`` also demands distinct bound variables (full patterns); the
    default accepts repeats such as ``X[v,v]``."""
    a, allowed = set(sigmaA), set(sigmaA) | set(theta)
    for side in (rule.lhs, rule.rhs):
        for s in _sub_meta_terms(side):
            if isinstance(s, Fun) and s.symbol in a:
                if not fun_symbols(s) <= allowed or _pattern_like(s, strict) is not None:
                    return False, s
    return True, None


# --- projection rules -----------------------------------------------------------


def projection_names(ty: MolType) -> tuple[str, str]:
    return f"pair_{mangle(ty)}", f"bot_{mangle(ty)}"


def build_projection_rules(types: Iterable[MolType], sig: Signature) -> tuple[dict[str, FunType], list[Rule]]:
    """Pairing and bottom at each type, with the two projection rules."""
    extra: dict[str, FunType] = {}
    for ty in sorted(set(types), key=str):
        pair, bot = projection_names(ty)
        for n in (pair, bot):
            if n in sig.symbols:
                raise NameClash(f"projection symbol {n} is already declared")
        extra[pair] = FunType((((), ty), ((), ty)), ty)
        extra[bot] = FunType((), ty)
    full = sig.extended(extra)
    rules = []
    for name, ft in extra.items():
        if not name.startswith("pair_"):
            continue
        lhs = Fun(name, (Abs((), MetaApp("M1")), Abs((), MetaApp("M2"))))
        suffix = name[len("pair_"):]
        rules.append(make_rule(full, f"proj1_{suffix}", lhs, MetaApp("M1")))
        rules.append(make_rule(full, f"proj2_{suffix}", lhs, MetaApp("M2")))
    return extra, rules


def a_with_projections(cs: ComputationSystem, split: SplitSpec) -> ComputationSystem:
    """A together with Proj at the result types of A-defined symbols, over
    the signature of A symbols, constructors and the projection symbols."""
    sig = cs.signature.restricted(set(split.sigmaA | split.theta))
    types = {sig.symbols[f].result for f in split.sigmaA}
    extra, proj = build_projection_rules(types, cs.signature)
    return ComputationSystem(sig.extended(extra), list(split.rulesA) + proj)


# --- obligation (i) --------------------------------------------------------------


def check_A_accessible(sig: Signature, rulesA: Iterable[Rule], order: TypeOrder) -> tuple[bool, list[str]]:
    failures = []
    for r in rulesA:
        assert isinstance(r.lhs, Fun)
        acc: set[str] = set()
        for a in r.lhs.args:
            acc |= accessible_metavars(sig, a, order)
        missing = sorted(set(metavars(r.rhs)) - acc)
        if missing:
            failures.append(f"rule ({r.name}): {', '.join(missing)} not accessible")
    return not failures, failures


# --- orchestration --------------------------------------------------------------


@dataclass
class ModularConfig:
    gs: GSConfig = field(default_factory=GSConfig)
    weights_bound: int = 2
    external_fo: Optional[str] = None
    strict_layer: bool = False
    precedence: list = field(default_factory=list)


@dataclass
class ModularResult:
    ok: bool
    split: SplitSpec
    obligations: list[Obligation]
    precedence: list[str] = field(default_factory=list)
    weights: Optional[dict[str, LinearWeight]] = None
    gs: Optional[GSResult] = None

    @property
    def failed(self) -> list[str]:
        return [o.name for o in self.obligations if not o.ok]


OB_ASSUME = "(0) combination assumptions"
OB_ACCESS = "(i) A accessible"
OB_LOWER = "(ii) A with projections terminates"
OB_UPPER = "(iii) B satisfies the general schema"


def _obligation_assumptions(split: SplitSpec, strict: bool) -> Obligation:
    ev = [
        "A = {" + ", ".join(r.name for r in split.rulesA) + "}",
        "B = {" + ", ".join(r.name for r in split.rulesB) + "}",
    ]
    problems = split.problems()
    for r in split.rulesA + split.rulesB:
        ok, bad = check_A_layer(r, split.sigmaA, split.theta, strict)
        if not ok:
            problems.append(f"rule ({r.name}) violates the A-layer condition at {show(bad)}")
    if problems:
        return Obligation(OB_ASSUME, "failed", ev + problems)
    ev.append("A-layer condition holds on both sides of every rule")
    ev.append("finitely branching: finite rule set with pattern matching")
    return Obligation(OB_ASSUME, "discharged", ev)


def _obligation_lower(cs: ComputationSystem, split: SplitSpec, cfg: ModularConfig) -> tuple[Obligation, Optional[dict]]:
    lower = a_with_projections(cs, split)
    ev: list[str] = []
    b = cfg.weights_bound
    res = find_linear_weights(lower, b, b)
    if res.weights is not None:
        w = res.weights
        used = sorted({f for r in lower.rules for f in fun_symbols(r.lhs) | fun_symbols(r.rhs)})
        ev.append("linear weights: " + "; ".join(f"{f}: {w[f]}" for f in used))
        ev.extend(c.inequality() for c in verify_weights(lower, w).values())
        bad = monotonicity_violations(lower, w)
        if bad:
            return Obligation(OB_LOWER, "failed", ev + bad), None
        ev.append("coefficients are positive on every redex-hosting position")
        return Obligation(OB_LOWER, "discharged", ev), w
    ev.append(f"linear weights: {res.reason}")
    try:
        fo = fo_rules(lower.rules)
    except NotFirstOrder as e:
        ev.append(f"dependency pairs: not applicable ({e})")
        return Obligation(OB_LOWER, "failed", ev), None
    dp = prove_dp(fo, coeff_bound=1, const_bound=1)
    ev.extend(f"dependency pairs: {line}" for line in dp.log)
    if dp.proved:
        return Obligation(OB_LOWER, "discharged", ev), None
    if cfg.external_fo:
        verdict = run_external(cfg.external_fo, fo)
        ev.append(f"external prover: {verdict}")
        if verdict == "YES":
            return Obligation(OB_LOWER, "discharged", ev), None
    return Obligation(OB_LOWER, "failed", ev), None


def _obligation_upper(cs: ComputationSystem, split: SplitSpec, cfg: ModularConfig) -> tuple[Obligation, GSResult]:
    upper = ComputationSystem(cs.signature, list(split.rulesB))
    prec = synthesize_precedence(upper, cfg.precedence or None)
    res = check_general_schema(upper, cfg.gs, prec)
    if not res.ok and cfg.gs.variant == STABLE:
        retry = check_general_schema(upper, GSConfig(cfg.gs.order, STRUCTURAL, cfg.gs.extension), prec)
        if retry.ok:
            res = retry
    ev = [f"subterm ordering: {res.config.variant}, clause 5: {res.config.extension}"]
    ev.extend(f"precedence: {line}" for line in prec.describe())
    for o in res.outcomes:
        if o.ok:
            ev.append(f"rule ({o.rule.name}): in the computable closure")
    ev.extend(res.reasons())
    return Obligation(OB_UPPER, "discharged" if res.ok else "failed", ev), res


def check_modular_sn(cs: ComputationSystem, split: SplitSpec, cfg: Optional[ModularConfig] = None) -> ModularResult:
    cfg = cfg or ModularConfig()
    names = {r.name for r in split.rulesA + split.rulesB}
    if names != {r.name for r in cs.rules} or len(names) != len(split.rulesA) + len(split.rulesB):
        raise InvalidSplit("split does not partition the rules")
    obs = [_obligation_assumptions(split, cfg.strict_layer)]
    ok_i, why = check_A_accessible(cs.signature, split.rulesA, cfg.gs.order)
    obs.append(Obligation(OB_ACCESS, "discharged" if ok_i else "failed",
                          ["every rhs metavariable of A is accessible"] if ok_i else why))
    lower, weights = _obligation_lower(cs, split, cfg)
    obs.append(lower)
    upper, gs = _obligation_upper(cs, split, cfg)
    obs.append(upper)
    ok = all(o.ok for o in obs)
    return ModularResult(ok, split, obs, gs.precedence.describe(), weights, gs)
