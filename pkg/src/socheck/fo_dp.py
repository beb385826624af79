"""Dependency-pair termination prover for first-order rewrite systems.

Pairs come from the rhs subterms headed by defined symbols; the estimated
dependency graph uses cap/ren and unification.  Each strongly connected
component is handled by, in order: the subterm criterion, a reduction pair
of weakly monotone linear weights (every rule weakly oriented), and
narrowing of pairs whose rhs is linear and unifies with no pair lhs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx

from .fotrs import FORule, FOTerm, from_fo, show_fo, variables
from .weights import LinearWeight, ParamLayout, interpret_symbolic, interpret_weight, order_constraints
from .wsearch import SearchBudgetExhausted, solve

Subst = dict[str, FOTerm]


@dataclass(frozen=True)
class DPPair:
    lhs: FOTerm
    rhs: FOTerm

    def __str__(self) -> str:
        return f"{show_fo(self.lhs)} => {show_fo(self.rhs)}"


def mark(t: FOTerm) -> FOTerm:
    assert isinstance(t, tuple)
    return (t[0] + "#",) + t[1:]


def _subterms(t: FOTerm, pos: tuple[int, ...] = ()) -> Iterable[tuple[tuple[int, ...], FOTerm]]:
    yield pos, t
    if isinstance(t, tuple):
        for i, a in enumerate(t[1:], 1):
            yield from _subterms(a, pos + (i,))


def _replace(t: FOTerm, pos: tuple[int, ...], new: FOTerm) -> FOTerm:
    if not pos:
        return new
    assert isinstance(t, tuple)
    i = pos[0]
    return t[:i] + (_replace(t[i], pos[1:], new),) + t[i + 1:]


def is_proper_subterm(u: FOTerm, t: FOTerm) -> bool:
    return any(s == u for p, s in _subterms(t) if p)


def dependency_pairs(rules: Sequence[FORule]) -> list[DPPair]:
    defined = {r.lhs[0] for r in rules if isinstance(r.lhs, tuple)}
    out: list[DPPair] = []
    for r in rules:
        for _, u in _subterms(r.rhs):
            if isinstance(u, tuple) and u[0] in defined and not is_proper_subterm(u, r.lhs):
                p = DPPair(mark(r.lhs), mark(u))
                if p not in out:
                    out.append(p)
    return out


def apply(sub: Subst, t: FOTerm) -> FOTerm:
    if isinstance(t, str):
        return apply(sub, sub[t]) if t in sub else t
    return (t[0],) + tuple(apply(sub, a) for a in t[1:])


def unify(s: FOTerm, t: FOTerm) -> Optional[Subst]:
    sub: Subst = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = apply(sub, a), apply(sub, b)
        if a == b:
            continue
        if isinstance(b, str) and not isinstance(a, str):
            a, b = b, a
        if isinstance(a, str):
            if a in variables(b):
                return None
            sub[a] = b
            continue
        if a[0] != b[0] or len(a) != len(b):
            return None
        stack.extend(zip(a[1:], b[1:]))
    return {v: apply(sub, v) for v in sub}


def rename(t: FOTerm, suffix: str) -> FOTerm:
    if isinstance(t, str):
        return t + suffix
    return (t[0],) + tuple(rename(a, suffix) for a in t[1:])


def _cap_ren(t: FOTerm, defined: set[str], counter: itertools.count) -> FOTerm:
    if isinstance(t, str) or t[0] in defined:
        return f"_{next(counter)}"
    return (t[0],) + tuple(_cap_ren(a, defined, counter) for a in t[1:])


def dependency_graph(pairs: Sequence[DPPair], rules: Sequence[FORule]) -> nx.DiGraph:
    defined = {r.lhs[0] for r in rules if isinstance(r.lhs, tuple)}
    g = nx.DiGraph()
    g.add_nodes_from(range(len(pairs)))
    counter = itertools.count()
    for i, p in enumerate(pairs):
        assert isinstance(p.rhs, tuple)
        capped = (p.rhs[0],) + tuple(_cap_ren(a, defined, counter) for a in p.rhs[1:])
        for j, q in enumerate(pairs):
            if unify(capped, rename(q.lhs, "'")) is not None:
                g.add_edge(i, j)
    return g


def cyclic_components(pairs: Sequence[DPPair], rules: Sequence[FORule]) -> list[list[DPPair]]:
    g = dependency_graph(pairs, rules)
    out = []
    for comp in nx.strongly_connected_components(g):
        nodes = sorted(comp)
        if len(nodes) > 1 or g.has_edge(nodes[0], nodes[0]):
            out.append([pairs[i] for i in nodes])
    out.sort(key=lambda c: [str(p) for p in c])
    return out


# --- processors ---------------------------------------------------------------


def subterm_criterion(pairs: Sequence[DPPair]) -> Optional[tuple[dict[str, int], list[DPPair]]]:
    """A projection of each marked symbol to one argument under which every
    pair is weakly and some pair strictly decreasing in the subterm order."""
    heads = sorted({p.lhs[0] for p in pairs} | {p.rhs[0] for p in pairs})
    arity = {}
    for p in pairs:
        arity[p.lhs[0]] = len(p.lhs) - 1
        arity[p.rhs[0]] = len(p.rhs) - 1
    if any(arity[h] == 0 for h in heads):
        return None
    for choice in itertools.product(*(range(1, arity[h] + 1) for h in heads)):
        proj = dict(zip(heads, choice))
        strict = []
        ok = True
        for p in pairs:
            a, b = p.lhs[proj[p.lhs[0]]], p.rhs[proj[p.rhs[0]]]
            if is_proper_subterm(b, a):
                strict.append(p)
            elif a != b:
                ok = False
                break
        if ok and strict:
            return proj, strict
    return None


def _arities(terms: Iterable[FOTerm]) -> dict[str, int]:
    out: dict[str, int] = {}
    for t in terms:
        for _, s in _subterms(t):
            if isinstance(s, tuple):
                out[s[0]] = len(s) - 1
    return dict(sorted(out.items()))


def reduction_pair(
    pairs: Sequence[DPPair],
    rules: Sequence[FORule],
    coeff_bound: int = 1,
    const_bound: int = 1,
    node_budget: int = 2_000_000,
) -> Optional[tuple[dict[str, LinearWeight], list[DPPair]]]:
    """Weakly monotone linear weights orienting all rules and pairs weakly
    and at least one pair strictly."""
    layout = ParamLayout(_arities([t for r in rules for t in (r.lhs, r.rhs)] + [t for p in pairs for t in (p.lhs, p.rhs)]))
    n = len(layout)
    lo = [0] * n
    hi = []
    for name in layout.names:
        hi.append(const_bound if name.endswith(".c0") else coeff_bound)

    def cons(l: FOTerm, r: FOTerm, strict: bool):
        return order_constraints(interpret_symbolic(layout, from_fo(l)), interpret_symbolic(layout, from_fo(r)), strict)

    base = [c for r in rules for c in cons(r.lhs, r.rhs, False)]
    weak = {p: cons(p.lhs, p.rhs, False) for p in pairs}
    for p in pairs:
        problem = base + [c for q in pairs if q != p for c in weak[q]] + cons(p.lhs, p.rhs, True)
        try:
            sol = solve(n, lo, hi, problem, node_budget)
        except SearchBudgetExhausted:
            continue
        if sol is None:
            continue
        w = layout.weights(sol)
        strict = [q for q in pairs if interpret_weight(w, from_fo(q.lhs)).dominates(interpret_weight(w, from_fo(q.rhs)))]
        return w, strict
    return None


def _canonical(p: DPPair) -> DPPair:
    names: dict[str, str] = {}
    for v in variables(p.lhs) + variables(p.rhs):
        names.setdefault(v, f"x{len(names)}")
    return DPPair(apply(names, p.lhs), apply(names, p.rhs))


def _is_linear(t: FOTerm) -> bool:
    seen: list[str] = []
    for _, s in _subterms(t):
        if isinstance(s, str):
            if s in seen:
                return False
            seen.append(s)
    return True


def narrowings(p: DPPair, rules: Sequence[FORule], pairs: Sequence[DPPair]) -> Optional[list[DPPair]]:
    """All one-step narrowings of ``p``'s rhs, or None when replacing the
    pair by them would be unsound."""
    if not _is_linear(p.rhs):
        return None
    if any(unify(p.rhs, rename(q.lhs, "'")) is not None for q in pairs):
        return None
    out: list[DPPair] = []
    for pos, s in _subterms(p.rhs):
        if not pos or isinstance(s, str):
            continue
        for r in rules:
            mu = unify(s, rename(r.lhs, "'"))
            if mu is None:
                continue
            new = _canonical(DPPair(apply(mu, p.lhs), apply(mu, _replace(p.rhs, pos, rename(r.rhs, "'")))))
            if new not in out:
                out.append(new)
    return out


# --- driver -------------------------------------------------------------------


@dataclass
class DPResult:
    proved: bool
    log: list[str] = field(default_factory=list)


def prove_dp(
    rules: Sequence[FORule],
    coeff_bound: int = 1,
    const_bound: int = 1,
    narrowing_rounds: int = 3,
    node_budget: int = 2_000_000,
) -> DPResult:
    log: list[str] = []
    pairs = dependency_pairs(rules)
    log.append(f"{len(pairs)} dependency pairs")
    work = [(c, narrowing_rounds) for c in cyclic_components(pairs, rules)]
    log.append(f"{len(work)} cyclic components")
    while work:
        comp, rounds = work.pop(0)
        shown = "{" + "; ".join(str(p) for p in comp) + "}"
        found = subterm_criterion(comp)
        if found is not None:
            proj, strict = found
            log.append(f"{shown}: subterm criterion with projection " + ", ".join(f"{h}->{i}" for h, i in proj.items()))
        else:
            rp = reduction_pair(comp, rules, coeff_bound, const_bound, node_budget)
            if rp is not None:
                w, strict = rp
                used = sorted({s for p in comp for s in _arities([p.lhs, p.rhs])} | {s for r in rules for s in _arities([r.lhs, r.rhs])})
                log.append(f"{shown}: reduction pair " + ", ".join(f"{f}={w[f]}" for f in used if f in w))
            else:
                strict = []
        if strict:
            rest = [p for p in comp if p not in strict]
            work.extend((c, rounds) for c in cyclic_components(rest, rules))
            continue
        if rounds > 0:
            replaced: list[DPPair] = []
            changed = False
            for p in comp:
                ns = narrowings(p, rules, comp)
                if ns is None:
                    replaced.append(p)
                else:
                    changed = True
                    replaced.extend(q for q in ns if q not in replaced)
            if changed:
                log.append(f"{shown}: narrowing gives " + "{" + "; ".join(str(p) for p in replaced) + "}")
                work.extend((c, rounds - 1) for c in cyclic_components(replaced, rules))
                continue
        log.append(f"{shown}: no processor applies")
        return DPResult(False, log)
    log.append("no cyclic components remain")
    return DPResult(True, log)
