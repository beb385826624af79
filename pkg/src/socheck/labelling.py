"""Trace labelling, executable at desk scale.

The trace map replaces every B-headed term by a tuple (built with the
pairing symbols) of the traces of everything it reduces to.  Trace
labelling attaches to each A-symbol the trace of the term it heads.  A
labelled step is either an instance of a labelled rule or a "decreasing"
step that only replaces a label ``v`` by some ``w`` reachable from ``v``
by A-with-projection reduction and strict subterms.

Labels live in the binder scope of the node that carries them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import networkx as nx

from .modular import SplitSpec, check_A_layer, projection_names
from .printing import show
from .rewrite import BudgetExhausted, reducts, root_steps
from .rules import ComputationSystem, Rule
from .subst import instantiate, shift, substitute_metavars
from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Position, Var, replace_at, strip_labels, subterm_at, subterms
from .types import MolType
from .modular import build_projection_rules


class LayerViolation(Exception):
    pass


class Undefined:
    """Result of tracing a term that is not strongly normalizing."""

    _instance: Optional["Undefined"] = None

    def __new__(cls) -> "Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"


UNDEFINED = Undefined()
TraceResult = Union[MetaTerm, Undefined]


def forget(t: MetaTerm) -> MetaTerm:
    return strip_labels(t)


def term_key(t: MetaTerm) -> str:
    return show(t)


def tuple_of_set(terms: Iterable[MetaTerm], b: MolType) -> MetaTerm:
    pair, bot = projection_names(b)
    acc: MetaTerm = Fun(bot, ())
    for u in sorted(set(terms), key=term_key, reverse=True):
        acc = Fun(pair, (Abs((), u), Abs((), acc)))
    return acc


def projection_system(cs: ComputationSystem, split: SplitSpec) -> ComputationSystem:
    """A with the projection rules at every mol type of the signature."""
    sig = cs.signature
    types = set()
    for ft in sig.symbols.values():
        types.update(ft.mol_types())
    clash = {n for ty in types for n in projection_names(ty) if n in sig.symbols}
    keep = {ty for ty in types if not set(projection_names(ty)) & clash}
    extra, proj = build_projection_rules(keep, sig)
    full = sig.extended(extra)
    # user-declared pairing symbols keep their own rules, if any
    return ComputationSystem(full, list(split.rulesA) + proj)


def subst_at(theta: dict[str, Abs], s: MetaTerm, depth: int) -> MetaTerm:
    """Apply ``theta`` (images relative to an outer scope) to ``s`` sitting
    ``depth`` binders below that scope."""
    if depth:
        theta = {m: Abs(a.types, shift(a.body, depth, a.arity), a.names) for m, a in theta.items()}
    return substitute_metavars(theta, s)


def lift_subterm(s: MetaTerm, crossed: int, names: Iterable[str] = ()) -> MetaTerm:
    """A subterm found under ``crossed`` binders, re-scoped to the outer
    scope: the crossed binders become free variables."""
    if not crossed:
        return s
    names = list(names) or [f"_x{i}" for i in range(crossed)]
    return instantiate(s, [Var(n) for n in names[:crossed]])


@dataclass(frozen=True)
class LabelledRule:
    name: str
    lhs: MetaTerm
    rhs: MetaTerm


class LabellingLab:
    def __init__(self, cs: ComputationSystem, split: SplitSpec, max_states: int = 2000) -> None:
        self.cs = cs
        self.split = split
        self.sigmaA = set(split.sigmaA)
        self.sigmaB = set(split.sigmaB)
        self.lower = projection_system(cs, split)
        self.max_states = max_states
        self._trace: dict[MetaTerm, TraceResult] = {}
        self._decl: dict[MetaTerm, set[MetaTerm]] = {}

    # -- trace ---------------------------------------------------------------

    def reachable(self, t: MetaTerm) -> Optional[list[MetaTerm]]:
        """Every ``u`` with ``t ->+ u``; None when ``t`` can loop."""
        g = nx.DiGraph()
        g.add_node(t)
        queue = deque([t])
        while queue:
            s = queue.popleft()
            for u in reducts(self.cs, s):
                if u not in g:
                    if g.number_of_nodes() >= self.max_states:
                        raise BudgetExhausted(f"more than {self.max_states} reducts of {show(t)}")
                    queue.append(u)
                g.add_edge(s, u)
        if not nx.is_directed_acyclic_graph(g):
            return None
        return [u for u in g.nodes if u != t]

    def trace(self, t: MetaTerm) -> TraceResult:
        hit = self._trace.get(t)
        if hit is not None:
            return hit
        out = self._trace_uncached(t)
        self._trace[t] = out
        return out

    def _trace_uncached(self, t: MetaTerm) -> TraceResult:
        if isinstance(t, (Var, Bound)):
            return t
        if not isinstance(t, Fun):
            raise TypeError(f"cannot trace {t!r}")
        if t.symbol not in self.sigmaB:
            args = []
            for a in t.args:
                r = self.trace(a.body)
                if r is UNDEFINED:
                    return UNDEFINED
                args.append(Abs(a.types, r, a.names))
            return Fun(t.symbol, tuple(args))
        reach = self.reachable(t)
        if reach is None:
            return UNDEFINED
        traced = []
        for u in reach:
            r = self.trace(u)
            if r is UNDEFINED:
                return UNDEFINED
            traced.append(r)
        return tuple_of_set(traced, self.cs.signature.symbols[t.symbol].result)

    def trace_label(self, t: MetaTerm) -> TraceResult:
        if isinstance(t, (Var, Bound)):
            return t
        assert isinstance(t, Fun)
        args = []
        for a in t.args:
            r = self.trace_label(a.body)
            if r is UNDEFINED:
                return UNDEFINED
            args.append(Abs(a.types, r, a.names))
        label = None
        if t.symbol in self.sigmaA:
            label = self.trace(forget(t))
            if label is UNDEFINED:
                return UNDEFINED
        return Fun(t.symbol, tuple(args), label)

    # -- labelled rules --------------------------------------------------------

    def _lab(self, r: MetaTerm, phi: dict[str, Abs], theta: Optional[dict[str, Abs]], depth: int) -> MetaTerm:
        """``lab_phi(r)``; with ``theta`` also apply the labelled
        metavariable substitution (erase, substitute, trace-label)."""
        if isinstance(r, (Bound, Var)):
            return r
        if isinstance(r, MetaApp):
            if theta is None:
                return MetaApp(r.name, tuple(self._lab(a, phi, None, depth) for a in r.args))
            out = self.trace_label(subst_at(theta, r, depth))
            if out is UNDEFINED:
                raise BudgetExhausted("instance is not strongly normalizing")
            return out
        assert isinstance(r, Fun)
        args = tuple(Abs(a.types, self._lab(a.body, phi, theta, depth + a.arity), a.names) for a in r.args)
        label = subst_at(phi, r, depth) if r.symbol in self.sigmaA else None
        return Fun(r.symbol, args, label)

    def label_rule(self, rule: Rule, phi: dict[str, Abs]) -> LabelledRule:
        ok, bad = check_A_layer(rule, self.sigmaA, self.split.theta)
        if not ok:
            raise LayerViolation(f"rule ({rule.name}) violates the A-layer condition at {show(bad)}")
        return LabelledRule(rule.name, self._lab(rule.lhs, phi, None, 0), self._lab(rule.rhs, phi, None, 0))

    def traced_assignment(self, theta: dict[str, Abs]) -> dict[str, Abs]:
        out = {}
        for m, a in theta.items():
            r = self.trace(a.body)
            if r is UNDEFINED:
                raise BudgetExhausted(f"image of {m} is not strongly normalizing")
            out[m] = Abs(a.types, r, a.names)
        return out

    # -- decreasing steps ------------------------------------------------------

    def decl_targets(self, v: MetaTerm) -> set[MetaTerm]:
        """Every ``w`` with ``v (->_{A+Proj} or strict subterm)+ w``."""
        hit = self._decl.get(v)
        if hit is not None:
            return hit
        seen: set[MetaTerm] = set()
        queue = deque([v])
        while queue:
            s = queue.popleft()
            nexts = list(reducts(self.lower, s))
            for pos, u, crossed in subterms(s):
                if pos:
                    nexts.append(lift_subterm(u, crossed))
            for u in nexts:
                if u not in seen:
                    if len(seen) >= self.max_states:
                        raise BudgetExhausted(f"more than {self.max_states} terms below label {show(v)}")
                    seen.add(u)
                    queue.append(u)
        self._decl[v] = seen
        return seen

    def decl_step(self, t: MetaTerm, u: MetaTerm) -> bool:
        """``t`` and ``u`` differ in exactly one label ``v`` -> ``w`` with ``w``
        a decreasing target of ``v``."""
        diffs = _label_diffs(t, u)
        if diffs is None or len(diffs) != 1:
            return False
        _, v, w = diffs[0]
        if v is None or w is None:
            return False
        return w in self.decl_targets(v)

    # -- the labelled relation -------------------------------------------------

    def rule_steps(self, s: MetaTerm) -> list[MetaTerm]:
        out = []
        for pos, sub, _ in subterms(s):
            if not isinstance(sub, Fun):
                continue
            for rule, theta, _ in root_steps(self.cs, forget(sub)):
                phi = self.traced_assignment(theta)
                lhs = self._lab(rule.lhs, phi, theta, 0)
                if lhs != sub:
                    continue
                rhs = self._lab(rule.rhs, phi, theta, 0)
                out.append(replace_at(s, pos, rhs))
        return out

    def decl_steps(self, s: MetaTerm, hint: Optional[MetaTerm] = None) -> list[MetaTerm]:
        out = []
        for pos, sub, _ in subterms(s):
            if not isinstance(sub, Fun) or sub.label is None:
                continue
            if hint is not None:
                try:
                    h = subterm_at(hint, pos)
                except IndexError:
                    continue
                if not isinstance(h, Fun) or h.symbol != sub.symbol or h.label is None or h.label == sub.label:
                    continue
                candidates = [h.label] if h.label in self.decl_targets(sub.label) else []
            else:
                candidates = sorted(self.decl_targets(sub.label), key=term_key)
            for w in candidates:
                out.append(replace_at(s, pos, Fun(sub.symbol, sub.args, w)))
        return out

    def labelled_one_step(self, s: MetaTerm, hint: Optional[MetaTerm] = None) -> list[MetaTerm]:
        seen: dict[MetaTerm, None] = {}
        for u in self.rule_steps(s) + self.decl_steps(s, hint):
            seen.setdefault(u, None)
        return list(seen)

    def reaches(self, start: MetaTerm, goal: MetaTerm, step, min_steps: int) -> bool:
        if min_steps == 0 and start == goal:
            return True
        seen = {start}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for u in step(s):
                if u == goal:
                    return True
                if u not in seen:
                    if len(seen) >= self.max_states:
                        raise BudgetExhausted(f"search from {show(start)} exceeded {self.max_states} states")
                    seen.add(u)
                    queue.append(u)
        return False

    def simulation_check(self, s: MetaTerm, t: MetaTerm) -> bool:
        """``labtr(s) ->+ labtr(t)`` in the labelled system and
        ``trace(s) ->* trace(t)`` by A with projections."""
        if t not in reducts(self.cs, s):
            raise ValueError(f"{show(t)} is not a one-step reduct of {show(s)}")
        ts, tt = self.trace(s), self.trace(t)
        if ts is UNDEFINED or tt is UNDEFINED:
            raise BudgetExhausted(f"{show(s)} is not strongly normalizing")
        if not self.reaches(ts, tt, lambda x: reducts(self.lower, x), 0):
            return False
        ls, lt = self.trace_label(s), self.trace_label(t)
        assert ls is not UNDEFINED and lt is not UNDEFINED
        return self.reaches(ls, lt, lambda x: self.labelled_one_step(x, lt), 1)


def _label_diffs(t: MetaTerm, u: MetaTerm) -> Optional[list[tuple[Position, Optional[MetaTerm], Optional[MetaTerm]]]]:
    """Positions where ``t`` and ``u`` carry different labels, or None if
    they differ in anything but labels."""
    if forget(t) != forget(u):
        return None
    out = []
    for (pos, a, _), (_, b, _) in zip(subterms(t), subterms(u)):
        if isinstance(a, Fun) and a.label != b.label:  # type: ignore[union-attr]
            out.append((pos, a.label, b.label))  # type: ignore[union-attr]
    return out
