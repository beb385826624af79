"""Parameter search for weight constraints, with kernel selection.

The compiled kernel is used when it was built; ``SOCHECK_PURE_PYTHON=1``
forces the fallback.  Both kernels implement the same search and return
identical results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import _wsearch_py

try:
    if os.environ.get("SOCHECK_PURE_PYTHON"):
        raise ImportError
    from . import _wsearch as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

KERNEL = "compiled" if _compiled is not None else "python"

Monomial = tuple[int, ...]


@dataclass
class Constraint:
    """``sum(coef * prod(params[i] for i in mono)) >= bound``."""

    poly: dict[Monomial, int]
    bound: int
    label: str = ""


def kernels() -> dict[str, Callable]:
    out: dict[str, Callable] = {"python": _wsearch_py.search}
    if _compiled is not None:
        out["compiled"] = _compiled.search
    return out


def _encode(n: int, constraints: Sequence[Constraint]) -> tuple:
    cons_start, cons_end, cons_bound = [], [], []
    term_coef, term_start, term_end, factors = [], [], [], []
    watchers: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(constraints):
        cons_start.append(len(term_coef))
        params = set()
        for mono, coef in sorted(c.poly.items()):
            if coef == 0:
                continue
            term_coef.append(coef)
            term_start.append(len(factors))
            factors.extend(mono)
            term_end.append(len(factors))
            params.update(mono)
        cons_end.append(len(term_coef))
        cons_bound.append(c.bound)
        # checked once its last parameter is assigned, and optimistically before
        for p in sorted(params):
            watchers[p].append(ci)
    watch_start, watch_end, watch = [], [], []
    for p in range(n):
        watch_start.append(len(watch))
        watch.extend(watchers[p])
        watch_end.append(len(watch))
    return cons_start, cons_end, cons_bound, term_coef, term_start, term_end, factors, watch_start, watch_end, watch


class SearchBudgetExhausted(Exception):
    pass


def solve(
    n: int,
    lo: Sequence[int],
    hi: Sequence[int],
    constraints: Sequence[Constraint],
    node_budget: int = 5_000_000,
    kernel: Optional[str] = None,
) -> Optional[list[int]]:
    """First assignment (in lexicographic order of parameter values) satisfying
    every constraint, or None when there is none.  Independent groups of
    parameters are searched separately."""
    constraints = [Constraint({m: k for m, k in c.poly.items() if k}, c.bound, c.label) for c in constraints]
    for c in constraints:
        if all(not m for m in c.poly) and c.poly.get((), 0) < c.bound:
            return None
    fn = kernels()[kernel or KERNEL]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in constraints:
        ps = sorted({p for m in c.poly for p in m})
        for a, b in zip(ps, ps[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for p in range(n):
        groups.setdefault(find(p), []).append(p)
    result = [lo[p] for p in range(n)]
    for members in groups.values():
        local = {p: i for i, p in enumerate(members)}
        mine = [c for c in constraints if any(p in local for m in c.poly for p in m)]
        if not mine:
            continue
        cons = [Constraint({tuple(local[p] for p in m): k for m, k in c.poly.items()}, c.bound) for c in mine]
        enc = _encode(len(members), cons)
        sol, nodes = fn(len(members), [lo[p] for p in members], [hi[p] for p in members], *enc, node_budget)
        if sol is None:
            if nodes > node_budget:
                raise SearchBudgetExhausted(f"weight search exceeded {node_budget} nodes")
            return None
        for p, v in zip(members, sol):
            result[p] = v
    return result
