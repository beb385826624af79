"""Accessibility, computable closure and the General Schema check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .orders import SymbolPrecedence, TypeOrder, synthesize_precedence
from .printing import show
from .rules import ComputationSystem, Rule
from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var, loose_indices
from .types import MolType, Signature

STABLE = "stable"
STRUCTURAL = "structural"
LEX = "lex"
MULTISET = "multiset"


# --- accessibility -----------------------------------------------------------


def accessible_set(sig: Signature, t: MetaTerm, ord: TypeOrder) -> list[MetaTerm]:
    """``Acc(t)`` as a list of sub-meta-terms (abstractions included)."""
    out: list[MetaTerm] = []
    todo = [t]
    while todo:
        s = todo.pop()
        out.append(s)
        if isinstance(s, Abs):
            todo.append(s.body)
        elif isinstance(s, Fun):
            todo.extend(_acc_children(sig, s, ord))
    return out


def _acc_children(sig: Signature, s: Fun, ord: TypeOrder) -> list[MetaTerm]:
    ft = sig.symbols[s.symbol]
    kids = []
    for a, (argtys, c) in zip(s.args, ft.binders):
        if all(ord.lt(x, ft.result) for x in argtys) and ord.le(c, ft.result):
            kids.append(a)
    return kids


def accessible_metavars(sig: Signature, t: MetaTerm, ord: TypeOrder) -> set[str]:
    out = set()
    for s in accessible_set(sig, t, ord):
        if isinstance(s, MetaApp):
            idx = [a.index for a in s.args if isinstance(a, Bound)]
            if len(idx) == len(s.args) and len(set(idx)) == len(idx):
                out.add(s.name)
    return out


# --- subterm orderings -------------------------------------------------------


def _as_abs(t: MetaTerm) -> Abs:
    return t if isinstance(t, Abs) else Abs((), t)


def _proper_subterms(t: Abs) -> list[tuple[Abs, tuple[MolType, ...]]]:
    """Proper sub-meta-terms of ``t`` with the types of the ``t``-binders in scope
    (last entry innermost).  Function arguments count both as abstractions
    and through their bodies."""
    out: list[tuple[Abs, tuple[MolType, ...]]] = []

    def visit(s: MetaTerm, scope: tuple[MolType, ...], proper: bool) -> None:
        if proper:
            out.append((Abs((), s), scope))
        if isinstance(s, Fun):
            for a in s.args:
                if a.arity:
                    out.append((a, scope))
                visit(a.body, scope + a.types, True)
        elif isinstance(s, MetaApp):
            for a in s.args:
                visit(a, scope, True)

    visit(t.body, t.types, t.arity > 0)
    return out


def _match_renaming(
    u: MetaTerm,
    s: MetaTerm,
    u_scope: Sequence[MolType],
    s_scope: Sequence[MolType],
    allow: bool,
    seed: Optional[dict[int, int]] = None,
) -> bool:
    """``u`` equals ``s`` up to an injective, type-preserving renaming of the
    dangling variables of ``u`` (rhs binders) to those of ``s`` (lhs binders).
    Variables are identified by their position in the scopes; ``seed`` fixes
    part of the renaming.  Without ``allow`` only seeded variables may dangle."""
    fwd: dict[int, int] = dict(seed or {})
    bwd: dict[int, int] = {v: k for k, v in fwd.items()}

    def go(a: MetaTerm, b: MetaTerm, ld: int) -> bool:
        if isinstance(a, Bound):
            if not isinstance(b, Bound):
                return False
            if a.index < ld or b.index < ld:
                return a.index == b.index
            j, i = a.index - ld, b.index - ld
            if j >= len(u_scope) or i >= len(s_scope):
                return False
            pu, ps = len(u_scope) - 1 - j, len(s_scope) - 1 - i
            if pu in fwd or ps in bwd:
                return fwd.get(pu) == ps
            if not allow or u_scope[pu] != s_scope[ps]:
                return False
            fwd[pu] = ps
            bwd[ps] = pu
            return True
        if isinstance(a, Var):
            return a == b
        if isinstance(a, MetaApp):
            return (
                isinstance(b, MetaApp)
                and a.name == b.name
                and len(a.args) == len(b.args)
                and all(go(x, y, ld) for x, y in zip(a.args, b.args))
            )
        if isinstance(a, Fun):
            return (
                isinstance(b, Fun)
                and a.symbol == b.symbol
                and len(a.args) == len(b.args)
                and all(x.types == y.types and go(x.body, y.body, ld + x.arity) for x, y in zip(a.args, b.args))
            )
        assert isinstance(a, Abs)
        return isinstance(b, Abs) and a.types == b.types and go(a.body, b.body, ld + a.arity)

    return go(u, s, 0)


def subterm_lt(u: MetaTerm, t: MetaTerm, u_scope: Sequence[MolType], variant: str) -> bool:
    """``t |> u``: ``u`` (living under rhs binders ``u_scope``) is strictly
    below the lhs argument ``t``.

    stable: ``u`` is a proper sub-meta-term of ``t`` and all its free
    variables are free in ``t`` (lhs arguments are closed, so ``u`` must be
    closed too).  structural: the variables bound in ``t`` above the
    subterm may stand for rhs-bound variables of ``u``, and an abstraction
    ``x.s`` is below ``x.t`` when ``s`` is below ``t`` with the binders
    aligned.
    """
    ua, ta = _as_abs(u), _as_abs(t)
    allow = variant == STRUCTURAL
    if not allow and loose_indices(ua):
        return False
    for s, scope in _proper_subterms(ta):
        if s.types != ua.types:
            continue
        if not allow and loose_indices(s):
            continue
        if _match_renaming(ua, s, u_scope, scope, allow):
            return True
    if allow and ua.arity and ua.types == ta.types:
        k = ua.arity
        seed = {len(u_scope) + m: m for m in range(k)}
        inner_scope = tuple(u_scope) + ua.types
        for s, scope in _proper_subterms(Abs((), ta.body)):
            full_scope = ta.types + scope
            if s.arity == 0 and _match_renaming(ua.body, s.body, inner_scope, full_scope, True, seed):
                return True
    return False


def _equal_arg(u: MetaTerm, t: MetaTerm) -> bool:
    return _as_abs(u) == _as_abs(t)


def lex_greater(lhs: Sequence[Abs], call: Sequence[Abs], u_scope: Sequence[MolType], variant: str) -> bool:
    for t, u in zip(lhs, call):
        if _equal_arg(u, t):
            continue
        return subterm_lt(u, t, u_scope, variant)
    return False


def multiset_greater(lhs: Sequence[Abs], call: Sequence[Abs], u_scope: Sequence[MolType], variant: str) -> bool:
    left = list(lhs)
    right = list(call)
    for u in list(right):
        for t in left:
            if _equal_arg(u, t):
                left.remove(t)
                right.remove(u)
                break
    if not left:
        return False
    return all(any(subterm_lt(u, t, u_scope, variant) for t in left) for u in right)


# --- computable closure ------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    clause: str  # "meta M", "var", "abs", "fun f>g", "fun f=g"
    term: MetaTerm
    scope: tuple[MolType, ...]
    children: tuple["Derivation", ...] = ()
    names: tuple[str, ...] = ()

    def lines(self, indent: int = 0) -> list[str]:
        out = [f"{'  ' * indent}({self.clause}) {show(self.term, self.names)}"]
        for c in self.children:
            out.extend(c.lines(indent + 1))
        return out


@dataclass(frozen=True)
class ClosureFailure:
    clause: str
    term: MetaTerm
    scope: tuple[MolType, ...]
    reason: str
    names: tuple[str, ...] = ()

    def describe(self) -> str:
        return f"{show(self.term, self.names)}: clause ({self.clause}) fails: {self.reason}"


def _fresh_names(hints: Sequence[str], taken: Sequence[str]) -> tuple[str, ...]:
    out: list[str] = []
    for h in hints:
        n = h
        while n in taken or n in out:
            n += "'"
        out.append(n)
    return tuple(out)


class _NotInClosure(Exception):
    def __init__(self, failure: ClosureFailure) -> None:
        self.failure = failure


@dataclass(frozen=True)
class GSConfig:
    order: TypeOrder = TypeOrder("default")
    variant: str = STABLE
    extension: str = LEX


class ClosureChecker:
    """Membership in the computable closure of ``f(lhs_args)``."""

    def __init__(self, sig: Signature, f: str, lhs_args: Sequence[Abs], prec: SymbolPrecedence, cfg: GSConfig) -> None:
        self.sig = sig
        self.f = f
        self.lhs_args = tuple(lhs_args)
        self.prec = prec
        self.cfg = cfg
        self.accessible: set[str] = set()
        for a in self.lhs_args:
            self.accessible |= accessible_metavars(sig, a, cfg.order)

    def check(self, u: MetaTerm, scope: tuple[MolType, ...] = (), names: tuple[str, ...] = ()) -> Derivation:
        if isinstance(u, (Bound, Var)):
            return Derivation("var", u, scope, (), names)
        if isinstance(u, Abs):
            inner = names + _fresh_names(u.names, names)
            return Derivation("abs", u, scope, (self.check(u.body, scope + u.types, inner),), names)
        if isinstance(u, MetaApp):
            if u.name not in self.accessible:
                raise _NotInClosure(
                    ClosureFailure(
                        f"meta {u.name}", u, scope, f"{u.name} is not accessible in the lhs arguments", names
                    )
                )
            kids = tuple(self.check(a, scope, names) for a in u.args)
            return Derivation(f"meta {u.name}", u, scope, kids, names)
        assert isinstance(u, Fun)
        g = u.symbol
        if self.prec.gt(self.f, g):
            kids = tuple(self.check(a, scope, names) for a in u.args)
            return Derivation(f"fun {self.f}>{g}", u, scope, kids, names)
        if self.prec.eq(self.f, g):
            clause = f"fun {self.f}={g}"
            ext = lex_greater if self.cfg.extension == LEX else multiset_greater
            if not ext(self.lhs_args, u.args, scope, self.cfg.variant):
                lhs_s = ", ".join(show(a) for a in self.lhs_args)
                call_s = ", ".join(show(a, names) for a in u.args)
                raise _NotInClosure(
                    ClosureFailure(
                        clause,
                        u,
                        scope,
                        f"arguments ({call_s}) are not {self.cfg.extension}-smaller than ({lhs_s}) "
                        f"in the {self.cfg.variant} subterm ordering",
                        names,
                    )
                )
            kids = tuple(self.check(a, scope, names) for a in u.args)
            return Derivation(clause, u, scope, kids, names)
        raise _NotInClosure(
            ClosureFailure(
                f"fun {self.f}>{g}",
                u,
                scope,
                f"{g} is neither below nor equivalent to {self.f} in the precedence",
                names,
            )
        )

    def replay(self, d: Derivation) -> bool:
        """Re-validate a derivation clause by clause."""
        u, scope = d.term, d.scope
        if d.clause == "var":
            return isinstance(u, (Bound, Var)) and not d.children
        if d.clause == "abs":
            return (
                isinstance(u, Abs)
                and len(d.children) == 1
                and d.children[0].term == u.body
                and d.children[0].scope == scope + u.types
                and self.replay(d.children[0])
            )
        if d.clause.startswith("meta "):
            return (
                isinstance(u, MetaApp)
                and d.clause == f"meta {u.name}"
                and u.name in self.accessible
                and self._replay_args(u.args, d)
            )
        if isinstance(u, Fun) and d.clause == f"fun {self.f}>{u.symbol}":
            return self.prec.gt(self.f, u.symbol) and self._replay_args(u.args, d)
        if isinstance(u, Fun) and d.clause == f"fun {self.f}={u.symbol}":
            ext = lex_greater if self.cfg.extension == LEX else multiset_greater
            return (
                self.prec.eq(self.f, u.symbol)
                and ext(self.lhs_args, u.args, scope, self.cfg.variant)
                and self._replay_args(u.args, d)
            )
        return False

    def _replay_args(self, args: Sequence[MetaTerm], d: Derivation) -> bool:
        return (
            len(args) == len(d.children)
            and all(c.term == a and c.scope == d.scope for a, c in zip(args, d.children))
            and all(self.replay(c) for c in d.children)
        )


def in_computable_closure(
    sig: Signature,
    f: str,
    lhs_args: Sequence[Abs],
    candidate: MetaTerm,
    prec: SymbolPrecedence,
    cfg: GSConfig = GSConfig(),
) -> tuple[bool, Optional[Derivation], Optional[ClosureFailure]]:
    ch = ClosureChecker(sig, f, lhs_args, prec, cfg)
    try:
        return True, ch.check(candidate), None
    except _NotInClosure as e:
        return False, None, e.failure


# --- the schema --------------------------------------------------------------


@dataclass
class RuleOutcome:
    rule: Rule
    ok: bool
    derivation: Optional[Derivation] = None
    failure: Optional[ClosureFailure] = None


@dataclass
class GSResult:
    ok: bool
    outcomes: list[RuleOutcome]
    precedence: SymbolPrecedence
    config: GSConfig
    conflicts: list[str] = field(default_factory=list)
    well_founded: bool = True

    @property
    def failing(self) -> list[RuleOutcome]:
        return [o for o in self.outcomes if not o.ok]

    def reasons(self) -> list[str]:
        out = [f"rule ({o.rule.name}): {o.failure.describe()}" for o in self.failing if o.failure]
        out.extend(self.conflicts)
        return out


def precedence_conflicts(cs: ComputationSystem, prec: SymbolPrecedence, failing: set[str]) -> list[str]:
    """Mutual calls that force two symbols into one precedence class, where
    at least one of the rules involved fails the schema."""
    out = []
    edges = prec.call_edges
    seen = set()
    for (f, g), rs in sorted(edges.items()):
        if f == g or (g, f) not in edges or (g, f) in seen:
            continue
        seen.add((f, g))
        back = edges[(g, f)]
        for r1 in rs:
            for r2 in back:
                if r1 in failing or r2 in failing:
                    out.append(f"precedence conflict: ({r1}) requires {f} >Σ {g} while ({r2}) requires {g} >Σ {f}")
    return out


def check_general_schema(
    cs: ComputationSystem,
    cfg: GSConfig = GSConfig(),
    prec: Optional[SymbolPrecedence] = None,
) -> GSResult:
    if prec is None:
        prec = synthesize_precedence(cs)
    outcomes = []
    for r in cs.rules:
        assert isinstance(r.lhs, Fun)
        ok, d, fail = in_computable_closure(cs.signature, r.head, r.lhs.args, r.rhs, prec, cfg)
        outcomes.append(RuleOutcome(r, ok, d, fail))
    wf = prec.is_well_founded()
    failing = {o.rule.name for o in outcomes if not o.ok}
    conflicts = precedence_conflicts(cs, prec, failing)
    return GSResult(wf and not failing, outcomes, prec, cfg, conflicts, wf)
