from socheck.orders import TypeOrder, synthesize_precedence
from socheck.rules import ComputationSystem
from socheck.schema import GSConfig, accessible_metavars, check_general_schema, in_computable_closure
from socheck.terms import Abs, MetaApp
from socheck.types import Atomic, Con

from conftest import load

N = Atomic("N")
FN = Con("F", (N,))


def test_type_order():
    o = TypeOrder("default")
    assert o.lt(N, FN)
    assert o.le(Atomic("b"), Atomic("b"))
    assert not o.lt(FN, N)
    assert not TypeOrder("identity").lt(N, FN)
    a, b = Atomic("a"), Atomic("b")
    assert TypeOrder("embedding").lt(Con("L", (a,)), Con("L", (Con("Arr", (a, b)),)))
    assert not o.lt(Con("L", (a,)), Con("L", (Con("Arr", (a, b)),)))


def test_precedence_gstate_and_handle():
    g = synthesize_precedence(load("gstate").system)
    assert g.eq("put", "sub") and g.is_well_founded()
    h = synthesize_precedence(load("handle").system)
    assert h.gt("handler", "lam") and "handler > lam" in h.describe()
    m = load("gstate")
    empty = synthesize_precedence(ComputationSystem(m.signature, []))
    assert not empty.gt("get", "put") and not empty.gt("put", "get")


def test_accessible_metavars():
    rec = load("recursor")
    sig = rec.signature
    order = TypeOrder("identity")
    recS = rec.system.rule("recS")
    assert "V" in accessible_metavars(sig, recS.lhs.args[2], order)
    assert "M" in accessible_metavars(sig, Abs((), MetaApp("M")), order)
    g = load("gstate")
    assert "X" in accessible_metavars(g.signature, g.system.rule("lu").lhs, TypeOrder("default"))


def _closure(m, name, order):
    r = m.system.rule(name)
    prec = synthesize_precedence(m.system)
    return in_computable_closure(m.signature, r.head, r.lhs.args, r.rhs, prec, GSConfig(TypeOrder(order)))


def test_computable_closure_examples():
    rec = load("recursor")
    ok, der, _ = _closure(rec, "recS", "identity")
    assert ok and der.lines()
    ok, _, _ = _closure(rec, "recZ", "identity")
    assert ok
    ps = load("prefix-sum")
    ok, _, failure = _closure(ps, "ps2", "default")
    assert not ok and "fun ps=ps" in failure.describe()


def test_general_schema_corpus():
    assert check_general_schema(load("recursor").system, GSConfig(TypeOrder("identity"))).ok
    assert check_general_schema(load("mam").system).ok
    res = check_general_schema(load("gstate").system)
    assert not res.ok
    assert "ll" in {o.rule.name for o in res.failing}
    assert any("(ul) requires put >Σ sub while (sub4) requires sub >Σ put" in c for c in res.conflicts)


def test_clause5_variants_agree_on_corpus():
    for name, order in [("recursor", "identity"), ("mam", "default"), ("stl-beta", "embedding")]:
        cs = load(name).system
        for ext in ("lex", "multiset"):
            assert check_general_schema(cs, GSConfig(TypeOrder(order), "stable", ext)).ok, (name, ext)


def test_structural_variant_handles_handler():
    cs = load("handle").system
    assert check_general_schema(cs, GSConfig(TypeOrder("default"), "structural")).ok
    res = check_general_schema(cs, GSConfig(TypeOrder("default"), "stable"))
    assert [o.rule.name for o in res.failing] == ["h_g"]
