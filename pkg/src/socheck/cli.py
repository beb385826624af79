"""Command-line interface."""

from __future__ import annotations

import argparse
import sys
from importlib.resources import files
from pathlib import Path
from typing import Optional, Sequence

from .check import STRATEGIES, CheckOptions, candidate_splits, run_check
from .fotrs import NotFirstOrder, emit_fo_trs, fo_rules
from .labelling import UNDEFINED, LabellingLab
from .manifest import Manifest, ManifestError, parse_manifest, parse_term
from .modular import a_with_projections, split_fo_ho
from .printing import show
from .report import emit_report
from .rewrite import BudgetExhausted, normalize, reducts

EXIT_ERROR = 3


def corpus_names() -> list[str]:
    return sorted(p.name[: -len(".sol")] for p in files("socheck").joinpath("corpus").iterdir() if p.name.endswith(".sol"))


def load_manifest(ref: str) -> tuple[str, Manifest]:
    """A path, or the name of a bundled corpus file."""
    path = Path(ref)
    if path.is_file():
        return path.stem, parse_manifest(path.read_text())
    bundled = files("socheck").joinpath("corpus", ref if ref.endswith(".sol") else ref + ".sol")
    if bundled.is_file():
        return ref.removesuffix(".sol"), parse_manifest(bundled.read_text())
    raise FileNotFoundError(f"no such file or bundled system: {ref} (bundled: {', '.join(corpus_names())})")


def _split(m: Manifest, which: Optional[str]):
    o = CheckOptions(split=which)
    found = candidate_splits(m, o)
    return found[0][1] if found else split_fo_ho(m.system)


def cmd_check(args: argparse.Namespace) -> int:
    name, m = load_manifest(args.file)
    opts = CheckOptions(
        subterm=args.subterm,
        clause5=args.clause5,
        weights_bound=args.weights_bound,
        oracle_depth=args.oracle_depth,
        split=args.split,
        external_fo=args.external_fo,
    )
    rep = run_check(m, args.strategy, opts, name)
    sys.stdout.write(emit_report(rep, args.format))
    return rep.exit_code


def cmd_normalize(args: argparse.Namespace) -> int:
    _, m = load_manifest(args.file)
    t = parse_term(m.signature, args.term, allow_free=True)
    try:
        nf = normalize(m.system, t, fuel=args.fuel, strategy=args.strategy)
    except BudgetExhausted as e:
        print(f"fuel exhausted; reached {show(e.partial) if e.partial is not None else '?'}")
        return 2
    print(show(nf))
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    _, m = load_manifest(args.file)
    t = parse_term(m.signature, args.term, allow_free=True)
    lab = LabellingLab(m.system, _split(m, args.split), max_states=args.budget)
    try:
        tr = lab.trace(t)
        lt = lab.trace_label(t)
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}")
        return 2
    if tr is UNDEFINED:
        print("undefined (the term is not strongly normalizing)")
        return 1
    print(f"trace: {show(tr)}")
    print(f"label: {show(lt)}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    from .gen import lhs_instances

    _, m = load_manifest(args.file)
    cs = m.system
    lab = LabellingLab(cs, _split(m, args.split), max_states=args.budget)
    checked = failed = skipped = 0
    seeds = []
    for r in cs.rules:
        seeds.extend(lhs_instances(cs, r, args.seed_depth, cap=args.limit))
    for s in seeds[: args.limit]:
        for t in reducts(cs, s):
            try:
                ok = lab.simulation_check(s, t)
            except BudgetExhausted:
                skipped += 1
                continue
            checked += 1
            if not ok:
                failed += 1
                print(f"FAIL {show(s)} -> {show(t)}")
    print(f"steps checked: {checked}, failed: {failed}, skipped (budget): {skipped}")
    return 0 if failed == 0 else 1


def cmd_emit_fo(args: argparse.Namespace) -> int:
    _, m = load_manifest(args.file)
    sp = _split(m, args.split)
    lower = a_with_projections(m.system, sp)
    try:
        sys.stdout.write(emit_fo_trs(fo_rules(lower.rules)))
    except NotFirstOrder as e:
        print(f"not first-order: {e}", file=sys.stderr)
        return EXIT_ERROR
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="socheck", description="Termination checking for second-order computation systems.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="prove or disprove termination")
    c.add_argument("file", help="manifest path or bundled system name")
    c.add_argument("--strategy", choices=STRATEGIES, default="auto")
    c.add_argument("--subterm", choices=["stable", "structural"])
    c.add_argument("--clause5", choices=["lex", "multiset"])
    c.add_argument("--weights-bound", type=int)
    c.add_argument("--oracle-depth", type=int)
    c.add_argument("--split", choices=["auto", "manifest"])
    c.add_argument("--format", choices=["human", "machine"], default="human")
    c.add_argument("--external-fo", metavar="COMMAND")
    c.set_defaults(func=cmd_check)

    n = sub.add_parser("normalize", help="rewrite a term to normal form")
    n.add_argument("file")
    n.add_argument("--term", required=True)
    n.add_argument("--fuel", type=int, default=10_000)
    n.add_argument("--strategy", choices=["innermost", "outermost"], default="innermost")
    n.set_defaults(func=cmd_normalize)

    t = sub.add_parser("trace", help="trace and trace labelling of a term")
    t.add_argument("file")
    t.add_argument("--term", required=True)
    t.add_argument("--split", choices=["auto", "manifest"])
    t.add_argument("--budget", type=int, default=2000)
    t.set_defaults(func=cmd_trace)

    s = sub.add_parser("simulate-labelling", help="check the labelled simulation on sampled steps")
    s.add_argument("file")
    s.add_argument("--seed-depth", type=int, default=2)
    s.add_argument("--split", choices=["auto", "manifest"])
    s.add_argument("--limit", type=int, default=200)
    s.add_argument("--budget", type=int, default=2000)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("emit-fo", help="print the lower part with projections as a first-order system")
    e.add_argument("file")
    e.add_argument("--split", choices=["auto", "manifest"])
    e.set_defaults(func=cmd_emit_fo)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
