"""End-to-end acceptance criteria; one summary line per criterion is printed
at the end of the run (see conftest)."""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time

import pytest
from hypothesis import HealthCheck, assume, given, seed, settings
from hypothesis import strategies as st

from socheck.cli import main
from socheck.gen import base_env, lhs_instances, random_term
from socheck.labelling import UNDEFINED, LabellingLab
from socheck.modular import a_with_projections, explicit_split
from socheck.report import parse_machine_report
from socheck.rewrite import BudgetExhausted, NonSN, SN, one_step_reducts, sn_oracle
from socheck.rules import RuleError, infer_meta_context
from socheck.subst import substitute_metavars
from socheck.terms import Abs, Bound, Fun, MetaApp, fun_symbols, is_second_order_pattern, loose_indices
from socheck.typecheck import typecheck
from socheck.weights import LinearWeight, find_linear_weights, verify_weights

from conftest import load

PROPERTY_SETTINGS = settings(
    max_examples=500,
    deadline=None,
    database=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)


def run_cli(args: list[str], capsys) -> tuple[int, str, float]:
    start = time.perf_counter()
    code = main(args)
    elapsed = time.perf_counter() - start
    return code, capsys.readouterr().out, elapsed


def machine(name: str, capsys, *flags: str):
    code, out, elapsed = run_cli(["check", name, *flags, "--format", "machine"], capsys)
    return code, parse_machine_report(out), elapsed


@pytest.mark.criterion(1, "recursor by GS is YES")
def test_recursor_gs_yes(capsys):
    code, rep, elapsed = machine("recursor", capsys, "--strategy", "gs")
    assert (code, rep.verdict, rep.method) == (0, "YES", "GS")
    assert all(o.ok for o in rep.obligations)
    assert elapsed < 1.0


@pytest.mark.criterion(2, "prefix-sum by GS is MAYBE at (ps2), clause (fun ps=ps)")
def test_prefix_sum_gs_maybe(capsys):
    code, rep, elapsed = machine("prefix-sum", capsys, "--strategy", "gs")
    assert (code, rep.verdict) == (2, "MAYBE")
    failed = [o for o in rep.obligations if not o.ok]
    assert [o.name for o in failed] == ["rule (ps2)"]
    assert "clause (fun ps=ps) fails" in failed[0].evidence[0]
    assert any("rule (ps2)" in r and "fun ps=ps" in r for r in rep.reasons)
    assert elapsed < 1.0


@pytest.mark.criterion(3, "MAM by GS is YES")
def test_mam_gs_yes(capsys):
    code, rep, elapsed = machine("mam", capsys, "--strategy", "gs")
    assert (code, rep.verdict, rep.method) == (0, "YES", "GS")
    assert len([o for o in rep.obligations if o.name.startswith("rule")]) == 8
    assert elapsed < 5.0


# den[get](x) = 2x+2, den[put](v,x) = x+1, den[sub](x,v) = 2x+1, pairs x+y+1, bottom 0
GSTATE_WEIGHTS = {
    "get": LinearWeight(2, (2,)),
    "put": LinearWeight(1, (0, 1)),
    "sub": LinearWeight(1, (2, 0)),
    "return": LinearWeight(0, (0,)),
    "pair_F_N": LinearWeight(1, (1, 1)),
    "bot_F_N": LinearWeight(0, ()),
}

# (coefficients, constant) of lhs and rhs, hand-evaluated per rule
FROZEN_INEQUALITIES = {
    "lu": (({"X": 2}, 4), ({"X": 1}, 0)),
    "ll": (({"X": 4}, 6), ({"X": 2}, 2)),
    "uu": (({"X": 1}, 2), ({"X": 1}, 1)),
    "ul": (({"X": 2}, 3), ({"X": 2}, 2)),
    "sub1": (({}, 1), ({}, 0)),
    "sub2": (({"M": 2}, 1), ({"M": 1}, 0)),
    "sub3": (({"M": 4}, 5), ({"M": 4}, 4)),
    "sub4": (({"M": 2}, 3), ({"M": 2}, 2)),
    "proj1_F_N": (({"M1": 1, "M2": 1}, 1), ({"M1": 1}, 0)),
    "proj2_F_N": (({"M1": 1, "M2": 1}, 1), ({"M2": 1}, 0)),
}


def numeric_weight(t, env: dict[str, int]) -> int:
    """Independent evaluator: weight of ``t`` with metavariables valued by ``env``."""
    if isinstance(t, Bound):
        return 0
    if isinstance(t, MetaApp):
        return env[t.name] + sum(numeric_weight(a, env) for a in t.args)
    assert isinstance(t, Fun)
    w = GSTATE_WEIGHTS[t.symbol]
    return w.const + sum(c * numeric_weight(a.body, env) for c, a in zip(w.coeffs, t.args))


@pytest.mark.criterion(4, "gstate: GS MAYBE with (ul)/(sub4) conflict; reference weights verify; search finds weights")
def test_gstate_conflict_and_weights(capsys):
    start = time.perf_counter()
    code, rep, _ = machine("gstate", capsys, "--strategy", "gs")
    assert (code, rep.verdict) == (2, "MAYBE")
    assert "precedence conflict: (ul) requires put >Σ sub while (sub4) requires sub >Σ put" in rep.reasons

    m = load("gstate")
    cs = m.system
    split = explicit_split(cs, [r.name for r in cs.rules], [])
    lower = a_with_projections(cs, split)
    checks = verify_weights(lower, GSTATE_WEIGHTS)
    assert sorted(checks) == sorted(FROZEN_INEQUALITIES)
    for name, c in checks.items():
        (lc, lk), (rc, rk) = FROZEN_INEQUALITIES[name]
        assert c.ok, c.reason
        assert dict(c.lhs.coeffs) == lc and c.lhs.const == lk
        assert dict(c.rhs.coeffs) == rc and c.rhs.const == rk
        rule = lower.rule(name)
        for vals in ({}, {"X": 1, "M": 1, "M1": 1, "M2": 1}, {"X": 3, "M": 5, "M1": 2, "M2": 7}):
            env = {k: vals.get(k, 0) for k in ("X", "M", "M1", "M2", "V", "W", "K")}
            assert numeric_weight(rule.lhs, env) == lk + sum(v * env[k] for k, v in lc.items())
            assert numeric_weight(rule.rhs, env) == rk + sum(v * env[k] for k, v in rc.items())
    assert checks["ul"].inequality() == "(ul) 2*X + 3 > 2*X + 2"
    assert checks["sub4"].inequality() == "(sub4) 2*M + 3 > 2*M + 2"

    found = find_linear_weights(lower, 2, 2)
    assert found.weights is not None
    assert all(c.ok for c in verify_weights(lower, found.weights).values())
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(5, "handle: structural GS YES with handler > lam; stable GS MAYBE on (h_g)")
def test_handle_structural_and_stable(capsys):
    code, rep, t1 = machine("handle", capsys, "--strategy", "gs", "--subterm", "structural")
    assert (code, rep.verdict, rep.method) == (0, "YES", "GS")
    assert "handler > lam" in rep.obligation("precedence").evidence
    code, rep, t2 = machine("handle", capsys, "--strategy", "gs", "--subterm", "stable")
    assert (code, rep.verdict) == (2, "MAYBE")
    assert [o.name for o in rep.obligations if not o.ok] == ["rule (h_g)"]
    assert t1 + t2 < 5.0


@pytest.mark.criterion(6, "effect-full by the modular theorem with the manifest split is YES")
def test_effect_full_modular(capsys):
    code, rep, elapsed = machine("effect-full", capsys, "--strategy", "modular")
    assert (code, rep.verdict, rep.method) == (0, "YES", "MODULAR")
    names = [o.name for o in rep.obligations]
    assert names == [
        "(0) combination assumptions",
        "(i) A accessible",
        "(ii) A with projections terminates",
        "(iii) B satisfies the general schema",
    ]
    assert all(o.status == "discharged" for o in rep.obligations)
    assert rep.obligations[0].evidence[0] == "A = {lu, ll, uu, ul, sub1, sub2, sub3, sub4}"
    assert any(e.startswith("linear weights:") for e in rep.obligations[2].evidence)
    assert "precedence: handler > lam" in rep.obligations[3].evidence
    assert elapsed < 30.0


@pytest.mark.criterion(7, "mapDivMinusHard auto is YES via MODULAR with A = (3)-(7), B = (1)-(2)")
def test_map_div_minus_hard_auto(capsys):
    code, rep, elapsed = machine("mapDivMinusHard", capsys, "--strategy", "auto")
    assert (code, rep.verdict, rep.method) == (0, "YES", "MODULAR")
    ev = rep.obligations[0].evidence
    assert ev[0] == "A = {3, 4, 5, 6, 7}"
    assert ev[1] == "B = {1, 2}"
    assert all(o.ok for o in rep.obligations)
    assert elapsed < 30.0


# --- criterion 8: property suite ---------------------------------------------------

CORPUS = ["recursor", "prefix-sum", "stl-beta", "mam", "gstate", "handle", "effect-full", "mapDivMinusHard", "proj-demo"]
_MANIFESTS = {n: load(n) for n in CORPUS}
_EFFECT = _MANIFESTS["effect-full"]
_EFFECT_SPLIT = explicit_split(_EFFECT.system, _EFFECT.split_a, _EFFECT.split_b)
_LAB = LabellingLab(_EFFECT.system, _EFFECT_SPLIT, max_states=3000)


def _env(sig):
    return base_env(sorted(sig.mol_types(), key=str))


@st.composite
def rule_and_assignment(draw):
    m = _MANIFESTS[draw(st.sampled_from(CORPUS))]
    rule = draw(st.sampled_from(m.rules))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    theta = {}
    for name, argtys, res in rule.context:
        body = random_term(m.signature, res, 3, rng, scope=tuple(argtys))
        assume(body is not None)
        theta[name] = Abs(tuple(argtys), body)
    return m, rule, theta


@pytest.mark.criterion(8, "property suite: substitution typing, subject reduction, trace commutation, simulation")
@seed(20240611)
@PROPERTY_SETTINGS
@given(rule_and_assignment())
def test_property_substitution_preserves_types(case):
    m, rule, theta = case
    env = _env(m.signature)
    for side in (rule.lhs, rule.rhs):
        inst = substitute_metavars(theta, side, strict=True)
        assert typecheck(m.signature, {}, env, inst) == rule.type


@st.composite
def typed_term(draw, names=tuple(CORPUS), depth=4):
    m = _MANIFESTS[draw(st.sampled_from(names))]
    ty = draw(st.sampled_from(sorted({ft.result for ft in m.signature.symbols.values()}, key=str)))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    t = random_term(m.signature, ty, depth, rng)
    assume(t is not None)
    return m, ty, t


@pytest.mark.criterion(8, "property suite: substitution typing, subject reduction, trace commutation, simulation")
@seed(20240612)
@PROPERTY_SETTINGS
@given(typed_term())
def test_property_subject_reduction(case):
    m, ty, t = case
    env = _env(m.signature)
    assert typecheck(m.signature, {}, env, t) == ty
    for _, u in one_step_reducts(m.system, t):
        assert typecheck(m.signature, {}, env, u) == ty


def _b_free_patterns():
    out = []
    sigmaB = set(_EFFECT_SPLIT.sigmaB)
    for r in _EFFECT_SPLIT.rulesA + _EFFECT_SPLIT.rulesB:
        for side in (r.lhs, r.rhs):
            stack = [side]
            while stack:
                s = stack.pop()
                if isinstance(s, Fun):
                    if not fun_symbols(s) & sigmaB and is_second_order_pattern(s) and s not in out:
                        out.append(s)
                    stack.extend(a.body for a in s.args)
    return out


def _usable(p) -> bool:
    if loose_indices(p):
        return False
    try:
        infer_meta_context(_EFFECT.signature, p)
    except RuleError:
        return False
    return True


_PATTERNS = [p for p in _b_free_patterns() if _usable(p)]


@st.composite
def pattern_and_assignment(draw):
    pat = draw(st.sampled_from(_PATTERNS))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    theta = {}
    for name, (argtys, res) in infer_meta_context(_EFFECT.signature, pat).items():
        body = random_term(_EFFECT.signature, res, 3, rng, scope=tuple(argtys))
        assume(body is not None)
        theta[name] = Abs(tuple(argtys), body)
    return pat, theta


@pytest.mark.criterion(8, "property suite: substitution typing, subject reduction, trace commutation, simulation")
@seed(20240613)
@PROPERTY_SETTINGS
@given(pattern_and_assignment())
def test_property_trace_commutes_with_substitution(case):
    pat, theta = case
    try:
        traced = {}
        for name, a in theta.items():
            r = _LAB.trace(a.body)
            if r is UNDEFINED:
                return
            traced[name] = Abs(a.types, r)
        lhs = _LAB.trace(substitute_metavars(theta, pat))
    except BudgetExhausted:
        return
    assert lhs == substitute_metavars(traced, pat)


_EFFECT_REDEXES = [s for r in _EFFECT.rules for s in lhs_instances(_EFFECT.system, r, 3, cap=60)]


@st.composite
def effect_seed(draw):
    if draw(st.booleans()):
        return draw(st.sampled_from(_EFFECT_REDEXES))
    return draw(typed_term(names=("effect-full",), depth=3))[2]


@pytest.mark.criterion(8, "property suite: substitution typing, subject reduction, trace commutation, simulation")
@seed(20240614)
@PROPERTY_SETTINGS
@given(effect_seed())
def test_property_simulation(s):
    for _, t in one_step_reducts(_EFFECT.system, s):
        try:
            ok = _LAB.simulation_check(s, t)
        except BudgetExhausted:
            continue
        assert ok


# --- criterion 9: oracle cross-validation -----------------------------------------


YES_SYSTEMS = [
    ("recursor", "gs", ()),
    ("mam", "gs", ()),
    ("stl-beta", "gs", ()),
    ("proj-demo", "gs", ()),
    ("handle", "gs", ("--subterm", "structural")),
    ("effect-full", "modular", ()),
    ("mapDivMinusHard", "auto", ()),
]


@pytest.mark.criterion(9, "oracle finds no loop in YES systems; f(c) -> f(c) is NO with a replayable 1-cycle")
def test_oracle_cross_validation(capsys):
    start = time.perf_counter()
    for name, strategy, flags in YES_SYSTEMS:
        code, rep, _ = machine(name, capsys, "--strategy", strategy, *flags)
        assert rep.verdict == "YES", name
        cs = load(name).system
        seeds = [s for r in cs.rules for s in lhs_instances(cs, r, 3)]
        res = sn_oracle(cs, seeds, depth_budget=60, width_budget=200_000)
        assert not isinstance(res, NonSN), (name, res)
        assert isinstance(res, SN), (name, res)
    code, rep, _ = machine("loop", capsys, "--strategy", "auto")
    assert (code, rep.verdict, rep.method) == (1, "NO", "LOOP")
    from socheck.check import CheckOptions, check_loop

    w = check_loop(load("loop"), CheckOptions()).artifacts["witness"]
    assert w.is_cycle and len(w.terms) - 1 - w.start == 1
    assert w.replay(load("loop").system)
    assert time.perf_counter() - start < 300


# --- criterion 10: byte-stable regression output ------------------------------------

REGRESSION = [
    ("recursor", ["--strategy", "gs"]),
    ("prefix-sum", ["--strategy", "gs"]),
    ("mam", ["--strategy", "gs"]),
    ("gstate", ["--strategy", "gs"]),
    ("handle", ["--strategy", "gs", "--subterm", "structural"]),
    ("effect-full", ["--strategy", "modular"]),
    ("mapDivMinusHard", ["--strategy", "auto"]),
]


@pytest.mark.criterion(10, "the seven regression systems give byte-identical machine reports across runs")
def test_machine_output_byte_stable():
    outputs = []
    for hashseed in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        run = []
        for name, flags in REGRESSION:
            proc = subprocess.run(
                [sys.executable, "-m", "socheck.cli", "check", name, *flags, "--format", "machine"],
                capture_output=True, env=env, check=False,
            )
            assert proc.returncode in (0, 2), proc.stderr
            run.append(proc.stdout)
        outputs.append(run)
    assert outputs[0] == outputs[1]
    verdicts = [parse_machine_report(o.decode()).verdict for o in outputs[0]]
    assert verdicts == ["YES", "MAYBE", "YES", "MAYBE", "YES", "YES", "YES"]
