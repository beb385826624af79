from socheck.gen import lhs_instances
from socheck.manifest import parse_manifest
from socheck.matching import match
from socheck.printing import show
from socheck.rewrite import NonSN, SN, find_loop, normalize, one_step_reducts, sn_oracle
from socheck.rules import ComputationSystem
from socheck.subst import substitute_metavars
from socheck.terms import Abs, Bound, Fun, MetaApp
from socheck.types import Atomic

from conftest import load, term

TM = "get(x.put(inc(x),get(y.put(y,get(z.return(z))))))"


def tiny(rules: str):
    return parse_manifest("atomic o\nc : -> o\nf : o -> o\ng : o -> o\n" + rules).system


def test_match_beta():
    m = load("mam")
    beta = m.system.rule("beta")
    subject = term(m, "lam(x.app(lam(y.y), x)) @ unit")
    theta = match(beta.lhs, subject)
    assert theta is not None
    assert set(theta) == {"M", "V"}
    assert substitute_metavars(theta, beta.lhs) == subject
    assert show(theta["V"].body) == "unit"


def test_match_rejects_captured_variable():
    a = Atomic("a")
    lhs = Fun("lam", (Abs((a,), Fun("app", (Abs((), MetaApp("L")), Abs((), Bound(0))))),))
    subject = Fun("lam", (Abs((a,), Fun("app", (Abs((), Bound(0)), Abs((), Bound(0))))),))
    assert match(lhs, subject) is None


def test_match_nullary_metavariable():
    assert match(MetaApp("M"), Fun("unit")) == {"M": Abs((), Fun("unit"))}


def test_one_step_reducts_examples():
    mam = load("mam")
    out = one_step_reducts(mam.system, term(mam, "prj1(cpair(unit, unit))"))
    assert [(r.rule.name, r.position, show(u)) for r, u in out] == [("prod1", (), "unit")]
    assert one_step_reducts(mam.system, term(mam, "unit")) == []
    g = load("effect-full")
    out = one_step_reducts(g.system, term(g, "put(0, put(0, return(0)))"))
    assert [(r.rule.name, show(u)) for r, u in out] == [("uu", "put(0,return(0))")]


def test_normalize_effect_term():
    m = load("effect-full")
    t = term(m, f"apps(runState({TM}), 0)")
    assert show(normalize(m.system, t, strategy="outermost")) == "inc(0)"
    # innermost optimises tm with gstate first and gets stuck at a sub
    stuck = normalize(m.system, t, strategy="innermost")
    assert "sub(w.put(w,return(w)),inc(0))" in show(stuck)


def test_normalize_trivial_and_gstate():
    m = load("gstate")
    t = term(m, "get(w.get(v.put(v, return(w))))", allow_free=True)
    assert normalize(ComputationSystem(m.signature, []), t) == t
    assert show(normalize(m.system, t)) == "get(w.return(w))"


def test_sn_oracle_examples():
    mam = load("mam").system
    seeds = [s for r in mam.rules for s in lhs_instances(mam, r, 3)]
    assert isinstance(sn_oracle(mam, seeds, depth_budget=50), SN)
    loop = tiny("(l) f(c) -> f(c)")
    res = sn_oracle(loop, [Fun("f", (Abs((), Fun("c")),))])
    assert isinstance(res, NonSN)
    assert res.witness.is_cycle and res.witness.replay(loop)
    assert isinstance(sn_oracle(tiny(""), [Fun("c")]), SN)


def test_find_loop_examples():
    grow = tiny("(l) f(c) -> g(f(c))")
    w = find_loop(grow, 1, 5)
    assert w is not None and not w.is_cycle and w.replay(grow)
    assert show(w.terms[0]) == "f(c)"
    assert find_loop(load("recursor").system, 3, 50) is None
    assert find_loop(tiny(""), 3, 50) is None
