import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socheck.check import run_check
from socheck.cli import corpus_names, main
from socheck.report import METHODS, STATUSES, VERDICTS, Obligation, ProofReport, emit_report, parse_machine_report

from conftest import load

text = st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=20)


@settings(max_examples=200, deadline=None, database=None)
@given(
    st.sampled_from(VERDICTS),
    st.sampled_from(METHODS),
    st.lists(st.tuples(text, st.sampled_from(STATUSES), st.lists(text, max_size=3)), max_size=4, unique_by=lambda o: o[0]),
    st.lists(text, max_size=3),
)
def test_machine_report_round_trip(verdict, method, obs, reasons):
    rep = ProofReport(verdict, method, "sys", [Obligation(n, s, list(e)) for n, s, e in obs], list(reasons))
    back = parse_machine_report(emit_report(rep, "machine"))
    assert (back.verdict, back.method, back.system) == (verdict, method, "sys")
    assert [(o.name, o.status, o.evidence) for o in back.obligations] == [(n, s, list(e)) for n, s, e in obs]
    assert back.reasons == list(reasons)


def test_yes_report_lists_derivations():
    rep = run_check(load("mam"), "gs", name="mam")
    assert rep.verdict == "YES"
    beta = rep.obligation("rule (beta)")
    assert beta.ok and beta.evidence
    human = emit_report(rep)
    assert human.startswith("YES (GS) for mam\n") and "[discharged] rule (beta)" in human


def test_maybe_report_names_rule_and_clause():
    rep = run_check(load("prefix-sum"), "gs", name="prefix-sum")
    assert rep.verdict == "MAYBE" and rep.exit_code == 2
    assert any(r.startswith("rule (ps2): ") and "fun ps=ps" in r for r in rep.reasons)


def test_run_check_examples():
    assert run_check(load("recursor")).method == "GS"
    rep = run_check(load("mapDivMinusHard"))
    assert (rep.verdict, rep.method) == ("YES", "MODULAR")
    rep = run_check(load("loop"))
    assert (rep.verdict, rep.method, rep.exit_code) == ("NO", "LOOP", 1)


def test_oracle_strategy_never_says_yes():
    rep = run_check(load("mam"), "oracle")
    assert (rep.verdict, rep.method) == ("MAYBE", "ORACLE")
    assert run_check(load("loop"), "oracle").verdict == "NO"


def test_cli_check_human(capsys):
    assert main(["check", "recursor"]) == 0
    assert capsys.readouterr().out.startswith("YES (GS) for recursor")


def test_cli_normalize(capsys):
    assert main(["normalize", "gstate", "--term", "put(V, put(W, return(V)))"]) == 0
    assert capsys.readouterr().out == "put(W,return(V))\n"
    assert main(["normalize", "loop", "--term", "f(c)", "--fuel", "5"]) == 2
    assert "fuel exhausted" in capsys.readouterr().out


def test_cli_trace(capsys):
    assert main(["trace", "effect-full", "--term", "get(v.return(v))", "--split", "manifest"]) == 0
    out = capsys.readouterr().out
    assert out == "trace: get(v.return(v))\nlabel: get{get(v.return(v))}(v.return(v))\n"


def test_cli_simulate(capsys):
    assert main(["simulate-labelling", "effect-full", "--seed-depth", "1", "--limit", "30"]) == 0
    assert "failed: 0" in capsys.readouterr().out


def test_cli_emit_fo(capsys):
    assert main(["emit-fo", "mapDivMinusHard"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("(VAR ") and "minus(W,0) -> W" in out
    assert main(["emit-fo", "recursor", "--split", "auto"]) == 0
    assert capsys.readouterr().out == ""


def test_cli_errors(capsys, tmp_path):
    assert main(["check", "no-such-system"]) == 3
    assert "no such file" in capsys.readouterr().err
    bad = tmp_path / "bad.sol"
    bad.write_text("atomic o\n(r) f -> f\n")
    assert main(["check", str(bad)]) == 3
    assert capsys.readouterr().err.startswith("error: 2:")


@pytest.mark.parametrize("name", corpus_names())
def test_every_bundled_system_gets_a_verdict(name, capsys):
    code = main(["check", name, "--format", "machine"])
    rep = parse_machine_report(capsys.readouterr().out)
    assert code == rep.exit_code
