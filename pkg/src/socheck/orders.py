"""Type orders and symbol precedences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from .rules import ComputationSystem
from .terms import fun_symbols
from .types import Con, MolType


def _embeds(a: MolType, b: MolType) -> bool:
    if a == b:
        return True
    if isinstance(b, Con):
        if any(_embeds(a, x) for x in b.args):
            return True
        if isinstance(a, Con) and a.name == b.name and len(a.args) == len(b.args):
            return all(_embeds(x, y) for x, y in zip(a.args, b.args))
    return False


@dataclass(frozen=True)
class TypeOrder:
    """A well-founded preorder on mol types.

    ``default``: the least preorder with each argument of a constructor
    application strictly below it (proper type subterms).
    ``identity``: only reflexivity.
    ``embedding``: homeomorphic embedding, which also puts ``L(a)`` below
    ``L(Arr(a,b))``.  In every variant the rank is the type size, and it
    strictly decreases along the strict part.
    """

    kind: str = "default"

    def __post_init__(self) -> None:
        if self.kind not in ("default", "identity", "embedding"):
            raise ValueError(f"unknown type order {self.kind}")

    def lt(self, a: MolType, b: MolType) -> bool:
        if a == b or self.kind == "identity":
            return False
        if self.kind == "default":
            return any(a == s for s in b.subtypes())
        return _embeds(a, b)

    def le(self, a: MolType, b: MolType) -> bool:
        return a == b or self.lt(a, b)

    def eq(self, a: MolType, b: MolType) -> bool:
        return a == b

    @staticmethod
    def rank(a: MolType) -> int:
        return a.size()


def default_type_order(sig=None) -> TypeOrder:
    return TypeOrder("default")


class PrecedenceError(Exception):
    pass


@dataclass
class SymbolPrecedence:
    """Equivalence classes of symbols with a strict order between classes.

    ``above[i]`` is the set of class indices strictly below class ``i``
    (transitively closed).
    """

    classes: list[frozenset[str]]
    below: dict[int, frozenset[int]]
    class_of: dict[str, int] = field(default_factory=dict)
    call_edges: dict[tuple[str, str], list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.class_of:
            self.class_of = {s: i for i, c in enumerate(self.classes) for s in c}

    def gt(self, f: str, g: str) -> bool:
        i, j = self.class_of.get(f), self.class_of.get(g)
        if i is None or j is None:
            return False
        return j in self.below.get(i, frozenset())

    def eq(self, f: str, g: str) -> bool:
        i = self.class_of.get(f)
        return i is not None and i == self.class_of.get(g)

    def is_well_founded(self) -> bool:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.classes)))
        for i, js in self.below.items():
            g.add_edges_from((i, j) for j in js)
        return nx.is_directed_acyclic_graph(g)

    def describe(self) -> list[str]:
        """Strict relations that some rule relies on (a call from a
        higher to a lower symbol), then the non-trivial equal classes."""
        out = []
        for f, g in sorted(self.call_edges):
            if self.gt(f, g):
                out.append(f"{f} > {g}")
        for c in sorted(self.classes, key=sorted):
            if len(c) > 1:
                out.append(" = ".join(sorted(c)))
        return out


def _cls(c: frozenset[str]) -> str:
    return "{" + ",".join(sorted(c)) + "}" if len(c) > 1 else next(iter(c))


def call_graph(cs: ComputationSystem) -> tuple[nx.DiGraph, dict[tuple[str, str], list[str]]]:
    """Edge ``f -> g`` when ``g`` occurs in the rhs of an ``f``-rule."""
    g = nx.DiGraph()
    g.add_nodes_from(sorted(cs.signature.symbols))
    why: dict[tuple[str, str], list[str]] = {}
    for r in cs.rules:
        for s in sorted(fun_symbols(r.rhs)):
            g.add_edge(r.head, s)
            why.setdefault((r.head, s), []).append(r.name)
    return g, why


def synthesize_precedence(
    cs: ComputationSystem,
    overrides: Optional[Iterable[list[tuple[str, str]]]] = None,
) -> SymbolPrecedence:
    """Call-graph precedence: SCCs are classes, the condensation gives the
    strict part, and every constructor sits below every defined symbol.

    ``overrides`` are chains ``[("", f), (">", g), ("=", h), ...]`` whose
    relations are added as edges (``=`` in both directions) before the
    SCCs are computed.
    """
    g, why = call_graph(cs)
    defined = cs.defined
    for chain in overrides or ():
        for (_, a), (rel, b) in zip(chain, chain[1:]):
            g.add_edge(a, b)
            if rel == "=":
                g.add_edge(b, a)
    sccs = sorted((frozenset(c) for c in nx.strongly_connected_components(g)), key=lambda c: sorted(c))
    class_of = {s: i for i, c in enumerate(sccs) for s in c}
    cond = nx.DiGraph()
    cond.add_nodes_from(range(len(sccs)))
    for a, b in g.edges:
        i, j = class_of[a], class_of[b]
        if i != j:
            cond.add_edge(i, j)
    cons_classes = {i for i, c in enumerate(sccs) if not (c & defined)}
    for i, c in enumerate(sccs):
        if c & defined:
            for j in cons_classes:
                cond.add_edge(i, j)
    if not nx.is_directed_acyclic_graph(cond):
        raise PrecedenceError("precedence overrides create a cycle between defined symbols and constructors")
    below = {i: frozenset(nx.descendants(cond, i)) for i in cond.nodes}
    return SymbolPrecedence(sccs, below, class_of, why)
