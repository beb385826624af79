"""Rewrite rules and computation systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .terms import Bound, Fun, MetaApp, MetaTerm, free_vars, fun_symbols, is_second_order_pattern, loose_indices, metavars
from .typecheck import TypingError, typecheck
from .types import MolType, Signature


class RuleError(Exception):
    pass


MetaContext = dict[str, tuple[tuple[MolType, ...], MolType]]


def infer_meta_context(sig: Signature, lhs: MetaTerm) -> MetaContext:
    """Read metavariable types off a pattern: argument types come from the
    binders they are applied to, the result from the enclosing argument slot."""
    ctx: MetaContext = {}
    stack: list[MolType] = []

    def go(s: MetaTerm, expected: Optional[MolType]) -> None:
        if isinstance(s, Fun):
            ft = sig.symbols.get(s.symbol)
            if ft is None:
                raise RuleError(f"undeclared symbol {s.symbol}")
            if len(ft.binders) != len(s.args):
                raise RuleError(f"{s.symbol} expects {len(ft.binders)} arguments, got {len(s.args)}")
            for a, (argtys, res) in zip(s.args, ft.binders):
                stack.extend(a.types)
                go(a.body, res)
                del stack[len(stack) - len(a.types) :]
        elif isinstance(s, MetaApp):
            argtys = []
            for a in s.args:
                if not isinstance(a, Bound) or a.index >= len(stack):
                    raise RuleError(f"metavariable {s.name} is not applied to bound variables in the lhs")
                argtys.append(stack[len(stack) - 1 - a.index])
            if expected is None:
                raise RuleError(f"cannot infer the type of metavariable {s.name}")
            decl = (tuple(argtys), expected)
            old = ctx.get(s.name)
            if old is not None and old != decl:
                raise RuleError(f"metavariable {s.name} used at two different types")
            ctx[s.name] = decl

    go(lhs, None)
    return ctx


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: MetaTerm
    rhs: MetaTerm
    context: tuple[tuple[str, tuple[MolType, ...], MolType], ...]
    type: MolType

    @property
    def head(self) -> str:
        assert isinstance(self.lhs, Fun)
        return self.lhs.symbol

    @property
    def meta_types(self) -> MetaContext:
        return {n: (a, r) for n, a, r in self.context}

    def __str__(self) -> str:
        from .printing import show

        return f"({self.name}) {show(self.lhs)} -> {show(self.rhs)}"


def make_rule(sig: Signature, name: str, lhs: MetaTerm, rhs: MetaTerm, context: Optional[MetaContext] = None) -> Rule:
    """Validate and build a rule; the metavariable context is inferred when omitted."""
    if not isinstance(lhs, Fun):
        raise RuleError(f"rule {name}: lhs must be a function term")
    if not is_second_order_pattern(lhs):
        raise RuleError(f"rule {name}: lhs is not a second-order pattern")
    if free_vars(lhs) or free_vars(rhs) or loose_indices(lhs) or loose_indices(rhs):
        raise RuleError(f"rule {name}: rule sides must not contain free variables")
    lm, rm = metavars(lhs), metavars(rhs)
    missing = set(rm) - set(lm)
    if missing:
        raise RuleError(f"rule {name}: metavariables {sorted(missing)} of the rhs do not occur in the lhs")
    if context is None:
        context = infer_meta_context(sig, lhs)
    try:
        lt = typecheck(sig, context, {}, lhs)
        rt = typecheck(sig, context, {}, rhs)
    except TypingError as e:
        raise RuleError(f"rule {name}: {e}") from e
    if lt != rt:
        raise RuleError(f"rule {name}: lhs has type {lt} but rhs has type {rt}")
    ctx = tuple((n, a, r) for n, (a, r) in context.items())
    return Rule(name, lhs, rhs, ctx, lt)


@dataclass
class ComputationSystem:
    signature: Signature
    rules: list[Rule] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._index: dict[str, list[Rule]] = {}
        for r in self.rules:
            self._index.setdefault(r.head, []).append(r)
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise RuleError("duplicate rule names")
        for r in self.rules:
            for f in fun_symbols(r.lhs) | fun_symbols(r.rhs):
                if f not in self.signature.symbols:
                    raise RuleError(f"rule {r.name}: undeclared symbol {f}")

    def rules_for(self, symbol: str) -> list[Rule]:
        return self._index.get(symbol, [])

    @property
    def defined(self) -> set[str]:
        return {r.head for r in self.rules}

    @property
    def constructors(self) -> set[str]:
        return set(self.signature.symbols) - self.defined

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def subsystem(self, rules: Iterable[Rule], signature: Optional[Signature] = None) -> "ComputationSystem":
        return ComputationSystem(signature or self.signature, list(rules))

    def union(self, other: "ComputationSystem") -> "ComputationSystem":
        sig = self.signature.extended(other.signature.symbols)
        sig.type_constructors.update(other.signature.type_constructors)
        sig.atomic_types |= other.signature.atomic_types
        return ComputationSystem(sig, self.rules + [r for r in other.rules if r not in self.rules])
