"""One-step and many-step computation, a bounded SN oracle and loop search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

from .matching import match
from .rules import ComputationSystem, Rule
from .subst import substitute_metavars
from .terms import Abs, Fun, MetaApp, MetaTerm, Position, replace_at, subterm_at, subterms


@dataclass(frozen=True)
class Redex:
    position: Position
    rule: Rule
    assignment: dict

    def __hash__(self) -> int:
        return hash((self.position, self.rule.name))


def contract(rule: Rule, t: MetaTerm) -> Optional[tuple[dict, MetaTerm]]:
    """Rewrite ``t`` at its root with ``rule`` if the lhs matches."""
    theta = match(rule.lhs, t)
    if theta is None:
        return None
    return theta, substitute_metavars(theta, rule.rhs)


def root_steps(cs: ComputationSystem, t: MetaTerm) -> Iterator[tuple[Rule, dict, MetaTerm]]:
    if not isinstance(t, Fun):
        return
    for rule in cs.rules_for(t.symbol):
        res = contract(rule, t)
        if res is not None:
            yield rule, res[0], res[1]


def one_step_reducts(cs: ComputationSystem, t: MetaTerm) -> list[tuple[Redex, MetaTerm]]:
    """Every ``(redex, u)`` with ``t -> u``, outermost-leftmost first."""
    out: list[tuple[Redex, MetaTerm]] = []

    def go(s: MetaTerm, pos: Position) -> list[tuple[Position, Rule, dict, MetaTerm]]:
        found: list[tuple[Position, Rule, dict, MetaTerm]] = []
        if isinstance(s, Fun):
            for rule, theta, u in root_steps(cs, s):
                found.append((pos, rule, theta, u))
            for i, a in enumerate(s.args):
                found.extend(go(a.body, pos + (i,)))
        elif isinstance(s, MetaApp):
            for i, a in enumerate(s.args):
                found.extend(go(a, pos + (i,)))
        return found

    for pos, rule, theta, u in go(t, ()):
        out.append((Redex(pos, rule, theta), replace_at(t, pos, u)))
    return out


def reducts(cs: ComputationSystem, t: MetaTerm) -> list[MetaTerm]:
    """Distinct one-step reducts in a deterministic order."""
    seen: dict[MetaTerm, None] = {}
    for _, u in one_step_reducts(cs, t):
        seen.setdefault(u, None)
    return list(seen)


class BudgetExhausted(Exception):
    def __init__(self, message: str, partial: Optional[MetaTerm] = None) -> None:
        super().__init__(message)
        self.partial = partial


def _innermost_step(cs: ComputationSystem, t: MetaTerm) -> Optional[MetaTerm]:
    if isinstance(t, Fun):
        for i, a in enumerate(t.args):
            u = _innermost_step(cs, a.body)
            if u is not None:
                args = t.args[:i] + (Abs(a.types, u, a.names),) + t.args[i + 1 :]
                return Fun(t.symbol, args, t.label)
        for _, _, u in root_steps(cs, t):
            return u
    elif isinstance(t, MetaApp):
        for i, a in enumerate(t.args):
            u = _innermost_step(cs, a)
            if u is not None:
                return MetaApp(t.name, t.args[:i] + (u,) + t.args[i + 1 :])
    return None


def _outermost_step(cs: ComputationSystem, t: MetaTerm) -> Optional[MetaTerm]:
    if isinstance(t, Fun):
        for _, _, u in root_steps(cs, t):
            return u
        for i, a in enumerate(t.args):
            u = _outermost_step(cs, a.body)
            if u is not None:
                args = t.args[:i] + (Abs(a.types, u, a.names),) + t.args[i + 1 :]
                return Fun(t.symbol, args, t.label)
    elif isinstance(t, MetaApp):
        for i, a in enumerate(t.args):
            u = _outermost_step(cs, a)
            if u is not None:
                return MetaApp(t.name, t.args[:i] + (u,) + t.args[i + 1 :])
    return None


def normalize(cs: ComputationSystem, t: MetaTerm, fuel: int = 10_000, strategy: str = "innermost") -> MetaTerm:
    """Reduce to normal form with a leftmost-innermost (or -outermost) strategy."""
    step = _innermost_step if strategy == "innermost" else _outermost_step
    if strategy not in ("innermost", "outermost"):
        raise ValueError(f"unknown strategy {strategy}")
    for _ in range(fuel):
        u = step(cs, t)
        if u is None:
            return t
        t = u
    if step(cs, t) is None:
        return t
    raise BudgetExhausted(f"no normal form within {fuel} steps", t)


def is_normal(cs: ComputationSystem, t: MetaTerm) -> bool:
    return _outermost_step(cs, t) is None


# --- bounded SN oracle -------------------------------------------------------


@dataclass(frozen=True)
class LoopWitness:
    """``terms[0] -> ... -> terms[-1]`` where the last term contains
    ``terms[start]`` at ``position`` (``position == ()`` is a plain cycle)."""

    terms: tuple[MetaTerm, ...]
    start: int
    position: Position

    @property
    def is_cycle(self) -> bool:
        return self.position == () and self.terms[-1] == self.terms[self.start]

    def replay(self, cs: ComputationSystem) -> bool:
        for a, b in zip(self.terms, self.terms[1:]):
            if b not in reducts(cs, a):
                return False
        try:
            return subterm_at(self.terms[-1], self.position) == self.terms[self.start]
        except IndexError:
            return False


@dataclass(frozen=True)
class SN:
    max_depth: int


@dataclass(frozen=True)
class NonSN:
    witness: LoopWitness


@dataclass(frozen=True)
class Unknown:
    reason: str


OracleResult = Union[SN, NonSN, Unknown]


def _embedding(small: MetaTerm, big: MetaTerm) -> Optional[Position]:
    for pos, s, _ in subterms(big):
        if s == small:
            return pos
    return None


class _Found(Exception):
    def __init__(self, w: LoopWitness) -> None:
        self.w = w


def sn_oracle(
    cs: ComputationSystem,
    seeds: Iterable[MetaTerm],
    depth_budget: int = 8,
    width_budget: int = 10_000,
    embedding: bool = True,
) -> OracleResult:
    """Explore every reduction sequence from ``seeds``.

    SN when all paths end within ``depth_budget`` steps; NonSN when a
    path revisits a term or reaches a term containing an earlier term of
    the path (for closed terms the step then repeats inside the context);
    Unknown when a budget runs out first.
    """
    height: dict[MetaTerm, int] = {}
    path: list[MetaTerm] = []
    on_path: dict[MetaTerm, int] = {}
    overflow = [False]

    def explore(t: MetaTerm) -> int:
        h = height.get(t)
        if h is not None:
            return h
        if len(height) >= width_budget:
            overflow[0] = True
            raise _Stop("width")
        if len(path) > depth_budget:
            raise _Stop("depth")
        on_path[t] = len(path)
        path.append(t)
        best = 0
        try:
            for u in reducts(cs, t):
                i = on_path.get(u)
                if i is not None:
                    raise _Found(LoopWitness(tuple(path) + (u,), i, ()))
                if embedding:
                    for j, earlier in enumerate(path):
                        if earlier != u:
                            p = _embedding(earlier, u)
                            if p is not None:
                                raise _Found(LoopWitness(tuple(path) + (u,), j, p))
                best = max(best, 1 + explore(u))
        finally:
            path.pop()
            del on_path[t]
        height[t] = best
        return best

    deepest = 0
    unknown: Optional[str] = None
    for s in seeds:
        try:
            deepest = max(deepest, explore(s))
        except _Found as f:
            return NonSN(f.w)
        except _Stop as e:
            unknown = unknown or f"{e.kind} budget exhausted from {_show(s)}"
            path.clear()
            on_path.clear()
            if overflow[0]:
                break
        except RecursionError:
            unknown = unknown or "recursion limit"
            path.clear()
            on_path.clear()
    if unknown is not None:
        return Unknown(unknown)
    return SN(deepest)


class _Stop(Exception):
    def __init__(self, kind: str) -> None:
        self.kind = kind


def _show(t: MetaTerm) -> str:
    from .printing import show

    return show(t)


def find_loop(
    cs: ComputationSystem,
    seed_depth: int = 2,
    step_budget: int = 50,
    width_budget: int = 10_000,
    seeds: Optional[Sequence[MetaTerm]] = None,
) -> Optional[LoopWitness]:
    """Search ground lhs instances for a cycle or a self-embedding reduction."""
    from .gen import lhs_instances

    if seeds is None:
        seeds = []
        for r in cs.rules:
            seeds.extend(lhs_instances(cs, r, seed_depth))
    for s in seeds:
        res = sn_oracle(cs, [s], depth_budget=step_budget, width_budget=width_budget)
        if isinstance(res, NonSN):
            return res.witness
    return None
