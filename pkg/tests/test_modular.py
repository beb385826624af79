from socheck.check import CheckOptions, check_modular
from socheck.fo_dp import dependency_pairs, prove_dp, subterm_criterion, unify
from socheck.fotrs import emit_fo_trs, fo_rules, parse_fo_trs
from socheck.gen import lhs_instances
from socheck.manifest import parse_manifest
from socheck.modular import (
    OB_ASSUME,
    ModularConfig,
    a_with_projections,
    build_projection_rules,
    check_A_accessible,
    check_A_layer,
    check_modular_sn,
    explicit_split,
    split_fo_ho,
)
from socheck.orders import TypeOrder
from socheck.rewrite import SN, sn_oracle
from socheck.rules import ComputationSystem
from socheck.types import Atomic, Con

from conftest import load

FN = Con("F", (Atomic("N"),))
GSTATE_A = ["lu", "ll", "uu", "ul", "sub1", "sub2", "sub3", "sub4"]


def test_a_layer_examples():
    m = load("effect-full")
    sp = explicit_split(m.system, m.split_a, m.split_b)
    ok, bad = check_A_layer(m.system.rule("h_g"), sp.sigmaA, sp.theta)
    assert ok and bad is None
    assert check_A_layer(m.system.rule("beta"), sp.sigmaA, sp.theta) == (True, None)
    # (ll) repeats a bound variable: accepted by default, rejected when strict
    assert check_A_layer(m.system.rule("ll"), sp.sigmaA, sp.theta)[0]
    assert not check_A_layer(m.system.rule("ll"), sp.sigmaA, sp.theta, strict=True)[0]


def _with_violation():
    text = load_text("gstate") + "0 : -> N\nh : (N -> F(N)), F(N) -> F(N)\n(bad) h(x.M[x], T) -> put(0, M[0])\n"
    return parse_manifest(text).system


def load_text(name):
    from importlib.resources import files

    return files("socheck").joinpath("corpus", f"{name}.sol").read_text()


def test_injected_layer_violation_is_maybe_citing_assumptions():
    cs = _with_violation()
    sp = explicit_split(cs, GSTATE_A, ["bad"])
    assert not check_A_layer(cs.rule("bad"), sp.sigmaA, sp.theta)[0]
    res = check_modular_sn(cs, sp)
    assert not res.ok and OB_ASSUME in res.failed


def test_projection_rules():
    m = load("gstate")
    extra, rules = build_projection_rules({FN}, m.signature)
    assert sorted(extra) == ["bot_F_N", "pair_F_N"]
    assert [r.name for r in rules] == ["proj1_F_N", "proj2_F_N"]
    assert build_projection_rules(set(), m.signature) == ({}, [])
    proj = ComputationSystem(m.signature.extended(extra), rules)
    seeds = [s for r in rules for s in lhs_instances(proj, r, 4)]
    assert isinstance(sn_oracle(proj, seeds, depth_budget=50), SN)


def test_split_examples():
    sp = split_fo_ho(load("mapDivMinusHard").system)
    assert [r.name for r in sp.rulesA] == ["3", "4", "5", "6", "7"]
    assert [r.name for r in sp.rulesB] == ["1", "2"]
    fo = split_fo_ho(load("loop").system)
    assert [r.name for r in fo.rulesA] == ["loop"] and not fo.rulesB
    rec = split_fo_ho(load("recursor").system)
    assert not rec.rulesA and [r.name for r in rec.rulesB] == ["recZ", "recS"]


def test_accessibility():
    g = load("gstate")
    assert check_A_accessible(g.signature, g.rules, TypeOrder("default")) == (True, [])
    assert check_A_accessible(g.signature, [], TypeOrder("default")) == (True, [])
    # accessibility starts at the lhs argument bodies, so the root is exempt
    # and the (a3) type condition bites at g below it: F(N) is not < F(N)
    text = "type F/1\natomic N\ng : (F(N) -> F(N)) -> F(N)\nh : F(N) -> F(N)\nc : -> F(N)\n"
    root = parse_manifest(text + "(r) g(x.M[x]) -> M[c]\n")
    assert check_A_accessible(root.signature, root.rules, TypeOrder("default"))[0]
    below = parse_manifest(text + "(r) h(g(x.M[x])) -> M[c]\n")
    ok, failures = check_A_accessible(below.signature, below.rules, TypeOrder("default"))
    assert not ok and failures == ["rule (r): M not accessible"]


def test_modular_examples():
    m = load("effect-full")
    res = check_modular_sn(m.system, explicit_split(m.system, m.split_a, m.split_b))
    assert res.ok and len(res.obligations) == 4
    md = load("mapDivMinusHard")
    res = check_modular_sn(md.system, split_fo_ho(md.system), ModularConfig())
    assert res.ok
    rep = check_modular(md, CheckOptions(), "mapDivMinusHard")
    assert rep.verdict == "YES"


def test_fo_export():
    md = load("mapDivMinusHard")
    lower = a_with_projections(md.system, split_fo_ho(md.system))
    fo = fo_rules(lower.rules)
    doc = emit_fo_trs(fo)
    assert len(fo) == 7 and "minus(W,0) -> W" in doc
    back = parse_fo_trs(doc)
    assert [(r.lhs, r.rhs) for r in back] == [(r.lhs, r.rhs) for r in fo]
    assert emit_fo_trs([]) == ""


def test_dependency_pairs():
    md = load("mapDivMinusHard")
    fo = fo_rules(split_fo_ho(md.system).rulesA)
    pairs = dependency_pairs(fo)
    roots = sorted({(p.lhs[0], p.rhs[0]) for p in pairs})
    assert roots == [("div#", "div#"), ("div#", "minus#"), ("minus#", "minus#"), ("minus#", "p#")]
    assert unify(("f", "x"), ("f", ("a",))) == {"x": ("a",)}
    assert unify("x", ("f", "x")) is None
    res = prove_dp(fo)
    assert res.proved and res.log


def test_subterm_criterion_on_decreasing_pair():
    rules = parse_fo_trs("(VAR x y)\n(RULES\n  f(s(x), y) -> f(x, y)\n)\n")
    pairs = dependency_pairs(rules)
    assert subterm_criterion(pairs) is not None
