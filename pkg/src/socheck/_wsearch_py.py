"""Pure-Python backtracking search over bounded natural parameters.

A problem is a list of constraints ``sum(coef * prod(params)) >= bound``.
Parameters are assigned in index order; after each assignment every
constraint mentioning that parameter is tested optimistically (unassigned
parameters take the bound that maximises each monomial), which prunes
early because all parameters are non-negative.

Data layout (shared with the compiled kernel):

* ``cons_terms[c]``: range into ``term_coef``/``term_fac`` for constraint c
* ``term_fac[t]``: range into ``factors`` (parameter indices of monomial t)
* ``watch[p]``: constraints that mention parameter p
"""

from __future__ import annotations

from typing import Optional, Sequence


def search(
    n: int,
    lo: Sequence[int],
    hi: Sequence[int],
    cons_start: Sequence[int],
    cons_end: Sequence[int],
    cons_bound: Sequence[int],
    term_coef: Sequence[int],
    term_start: Sequence[int],
    term_end: Sequence[int],
    factors: Sequence[int],
    watch_start: Sequence[int],
    watch_end: Sequence[int],
    watch: Sequence[int],
    node_budget: int,
) -> tuple[Optional[list[int]], int]:
    """Return ``(assignment or None, nodes visited)``; None with
    ``nodes > node_budget`` means the budget ran out."""
    val = [0] * n
    nodes = 0

    def feasible(p: int) -> bool:
        for w in range(watch_start[p], watch_end[p]):
            c = watch[w]
            total = 0
            for t in range(cons_start[c], cons_end[c]):
                coef = term_coef[t]
                prod = coef
                for f in range(term_start[t], term_end[t]):
                    q = factors[f]
                    if q <= p:
                        v = val[q]
                    elif coef > 0:
                        v = hi[q]
                    else:
                        v = lo[q]
                    prod *= v
                    if prod == 0:
                        break
                total += prod
            if total < cons_bound[c]:
                return False
        return True

    if n == 0:
        return [], 0
    p = 0
    val[0] = lo[0] - 1
    while p >= 0:
        val[p] += 1
        if val[p] > hi[p]:
            p -= 1
            continue
        nodes += 1
        if nodes > node_budget:
            return None, nodes
        if feasible(p):
            if p == n - 1:
                return list(val), nodes
            p += 1
            val[p] = lo[p] - 1
    return None, nodes
