"""First-order rewrite systems: conversion, a plain-text exchange format,
and a hook for external termination provers.

A first-order term is either a variable (``str``) or a tuple
``(symbol, arg1, ..., argn)``.  The document format is::

    (VAR X Y)
    (RULES
      minus(X,0) -> X
      p(s(Y)) -> Y
    )

Constants are written without parentheses.  Rules appear in input order,
variables in order of first occurrence.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .rules import Rule
from .terms import Abs, Fun, MetaApp, MetaTerm

FOTerm = Union[str, tuple]


class NotFirstOrder(Exception):
    pass


@dataclass(frozen=True)
class FORule:
    name: str
    lhs: FOTerm
    rhs: FOTerm

    def __str__(self) -> str:
        return f"{show_fo(self.lhs)} -> {show_fo(self.rhs)}"


def to_fo(t: MetaTerm) -> FOTerm:
    if isinstance(t, MetaApp):
        if t.args:
            raise NotFirstOrder(f"meta-application {t.name} has arguments")
        return t.name
    if isinstance(t, Fun):
        out = [t.symbol]
        for a in t.args:
            if a.arity:
                raise NotFirstOrder(f"{t.symbol} has a binding argument")
            out.append(to_fo(a.body))
        return tuple(out)
    raise NotFirstOrder(f"not a first-order term: {t!r}")


def from_fo(t: FOTerm) -> MetaTerm:
    if isinstance(t, str):
        return MetaApp(t, ())
    return Fun(t[0], tuple(Abs((), from_fo(a)) for a in t[1:]))


def fo_rules(rules: Iterable[Rule]) -> list[FORule]:
    out = []
    for r in rules:
        try:
            out.append(FORule(r.name, to_fo(r.lhs), to_fo(r.rhs)))
        except NotFirstOrder as e:
            raise NotFirstOrder(f"rule {r.name}: {e}") from e
    return out


def variables(t: FOTerm, acc: Optional[list[str]] = None) -> list[str]:
    acc = [] if acc is None else acc
    if isinstance(t, str):
        if t not in acc:
            acc.append(t)
    else:
        for a in t[1:]:
            variables(a, acc)
    return acc


def show_fo(t: FOTerm) -> str:
    if isinstance(t, str):
        return t
    if len(t) == 1:
        return t[0]
    return f"{t[0]}({','.join(show_fo(a) for a in t[1:])})"


def emit_fo_trs(rules: Sequence[FORule]) -> str:
    if not rules:
        return ""
    vs: list[str] = []
    for r in rules:
        variables(r.lhs, vs)
        variables(r.rhs, vs)
    lines = []
    if vs:
        lines.append(f"(VAR {' '.join(vs)})")
    lines.append("(RULES")
    lines.extend(f"  {r}" for r in rules)
    lines.append(")")
    return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"\s*(->|[(),]|[^\s(),]+)")


def _parse_term(text: str, vs: set[str]) -> FOTerm:
    toks = _TOKEN.findall(text)
    pos = 0

    def term() -> FOTerm:
        nonlocal pos
        name = toks[pos]
        pos += 1
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args = [term()]
            while toks[pos] == ",":
                pos += 1
                args.append(term())
            if toks[pos] != ")":
                raise ValueError(f"expected ')' in {text!r}")
            pos += 1
            return (name, *args)
        return name if name in vs else (name,)

    t = term()
    if pos != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return t


def parse_fo_trs(text: str) -> list[FORule]:
    vs: set[str] = set()
    rules: list[FORule] = []
    in_rules = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("(VAR"):
            vs = set(line[4:].rstrip(")").split())
        elif line == "(RULES":
            in_rules = True
        elif line == ")":
            in_rules = False
        elif in_rules:
            lhs, _, rhs = line.partition("->")
            rules.append(FORule(str(len(rules) + 1), _parse_term(lhs, vs), _parse_term(rhs, vs)))
        else:
            raise ValueError(f"unexpected line {line!r}")
    return rules


def run_external(command: str, rules: Sequence[FORule], timeout: float = 60.0) -> str:
    """Write the rules to a temporary file, run ``command <file>`` and read
    YES/NO/MAYBE from the first line of its output (anything else is MAYBE)."""
    fd, path = tempfile.mkstemp(suffix=".trs")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(emit_fo_trs(rules))
        try:
            proc = subprocess.run(shlex.split(command) + [path], capture_output=True, text=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired):
            return "MAYBE"
        first = proc.stdout.strip().splitlines()[:1]
        verdict = first[0].strip().upper() if first else ""
        return verdict if verdict in ("YES", "NO", "MAYBE") else "MAYBE"
    finally:
        os.unlink(path)
