import pytest

from socheck.labelling import UNDEFINED, LabellingLab, forget, tuple_of_set
from socheck.manifest import parse_manifest
from socheck.modular import explicit_split
from socheck.printing import show
from socheck.rewrite import reducts
from socheck.terms import Abs, Fun, Var
from socheck.types import Atomic, Con

from conftest import load, term

FN = Con("F", (Atomic("N"),))


@pytest.fixture(scope="module")
def eff():
    m = load("effect-full")
    return m, LabellingLab(m.system, explicit_split(m.system, m.split_a, m.split_b))


def test_tuple_of_set(eff):
    m, _ = eff
    assert show(tuple_of_set([], FN)) == "bot_F_N"
    r0 = term(m, "return(0)")
    assert show(tuple_of_set([r0], FN)) == "pair_F_N(return(0),bot_F_N)"
    three = [term(m, "return(inc(0))"), r0, term(m, "get(x.return(x))")]
    assert show(tuple_of_set(three, FN)) == (
        "pair_F_N(get(x.return(x)),pair_F_N(return(0),pair_F_N(return(inc(0)),bot_F_N)))"
    )
    assert tuple_of_set(three, FN) == tuple_of_set(reversed(three), FN)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("return(0)", "return(0)"),
        ("get(v.return(v))", "get(v.return(v))"),
        ("bang(thunk(return(0)))", "pair_F_N(return(0),bot_F_N)"),
        ("apps(lams(x.inc(x)),0)", "pair_N(inc(0),bot_N)"),
        # two reducts with equal traces, and the final normal form
        ("let(return(0), x.bang(thunk(return(x))))", "pair_F_N(pair_F_N(return(0),bot_F_N),pair_F_N(return(0),bot_F_N))"),
    ],
)
def test_trace(eff, text, expected):
    m, lab = eff
    assert show(lab.trace(term(m, text))) == expected


def test_trace_of_variables_and_stuck_b_terms(eff):
    m, lab = eff
    assert lab.trace(Var("x")) == Var("x")
    assert lab.trace_label(Var("x")) == Var("x")
    stuck = term(m, "apps(u, 0)", allow_free=True)
    assert reducts(m.system, stuck) == []
    assert show(lab.trace(stuck)) == "bot_N"


def test_trace_undefined_on_loops():
    m = parse_manifest("atomic o\nc : -> o\nf : o -> o\n(l) f(c) -> f(c)\n")
    lab = LabellingLab(m.system, explicit_split(m.system, [], ["l"]))
    assert lab.trace(term(m, "f(c)")) is UNDEFINED


def test_trace_label(eff):
    m, lab = eff
    t = term(m, "get(v.return(v))")
    assert show(lab.trace_label(t)) == "get{get(v.return(v))}(v.return(v))"
    for text in ("let(return(0), x.bang(thunk(get(v.put(v, return(x))))))", "put(0, sub(w.return(w), inc(0)))"):
        s = term(m, text)
        assert forget(lab.trace_label(s)) == s


def test_label_rule(eff):
    m, lab = eff
    lr = lab.label_rule(m.system.rule("lu"), {"X": Abs((), term(m, "return(0)"))})
    assert show(lr.lhs) == "get{get(v.put(v,return(0)))}(v.put{put(v,return(0))}(v,X))"
    assert show(lr.rhs) == "X"
    assert forget(lr.lhs) == m.system.rule("lu").lhs
    beta = m.system.rule("beta")
    lb = lab.label_rule(beta, {})
    assert (lb.lhs, lb.rhs) == (beta.lhs, beta.rhs)


def test_decl_step(eff):
    m, lab = eff
    r0 = term(m, "return(0)")
    body = Abs((), term(m, "get(x.return(x))"))
    pair = tuple_of_set([r0], FN)
    assert lab.decl_step(Fun("put", (Abs((), term(m, "0")), body), pair), Fun("put", (Abs((), term(m, "0")), body), r0))
    same = Fun("put", (Abs((), term(m, "0")), body), r0)
    assert not lab.decl_step(same, same)
    lu = term(m, "get(v.put(v, return(0)))")
    assert lab.decl_step(Fun("return", (Abs((), term(m, "0")),), lu), Fun("return", (Abs((), term(m, "0")),), r0))


def test_labelled_steps(eff):
    m, lab = eff
    s = lab.trace_label(term(m, "get(v.put(v, return(0)))"))
    steps = lab.labelled_one_step(s)
    assert term(m, "return(0)") in steps
    normal = lab.trace_label(term(m, "return(0)"))
    assert lab.labelled_one_step(normal) == []


def test_simulation_examples(eff):
    m, lab = eff
    for text in ("get(v.put(v, return(0)))", "apps(lams(x.inc(x)),0)", "let(return(0), x.bang(thunk(get(v.put(v, return(x))))))"):
        s = term(m, text)
        for t in reducts(m.system, s):
            assert lab.simulation_check(s, t)
    with pytest.raises(ValueError):
        lab.simulation_check(term(m, "return(0)"), term(m, "return(0)"))
