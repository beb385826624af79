"""Enumeration and random generation of well-typed terms.

Every mol type gets one designated free variable (``c_<type>``) as a
generic inhabitant, so types without closed constructor terms still have
instances.  The variables act as opaque constants for rewriting.
"""

from __future__ import annotations

import itertools
import random
from typing import Optional, Sequence

from .rules import ComputationSystem, Rule
from .subst import substitute_metavars
from .terms import Abs, Bound, Fun, MetaTerm, Var
from .types import MolType, Signature, mangle


def base_var(ty: MolType) -> Var:
    return Var(f"c_{mangle(ty)}")


def base_env(types: Sequence[MolType]) -> dict[str, MolType]:
    return {base_var(t).name: t for t in types}


class TermEnumerator:
    """Terms of a given type, depth and binder scope, capped per request."""

    def __init__(self, sig: Signature, cap: int = 40, base: bool = True, symbols: Optional[set[str]] = None) -> None:
        self.sig = sig
        self.cap = cap
        self.base = base
        self.symbols = sorted(symbols if symbols is not None else sig.symbols)
        self._memo: dict[tuple, list[MetaTerm]] = {}
        self.base_types: set[MolType] = set()

    def terms(self, ty: MolType, depth: int, scope: tuple[MolType, ...] = ()) -> list[MetaTerm]:
        key = (ty, depth, scope)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out: list[MetaTerm] = []
        seen: set[MetaTerm] = set()

        def add(t: MetaTerm) -> bool:
            if t not in seen:
                seen.add(t)
                out.append(t)
            return len(out) >= self.cap

        full = False
        for i in range(len(scope)):
            if scope[len(scope) - 1 - i] == ty and add(Bound(i)):
                full = True
                break
        if not full and self.base:
            self.base_types.add(ty)
            full = add(base_var(ty))
        if not full and depth > 0:
            for f in self.symbols:
                ft = self.sig.symbols[f]
                if ft.result != ty:
                    continue
                pools = []
                for argtys, res in ft.binders:
                    bodies = self.terms(res, depth - 1, scope + tuple(argtys))
                    pools.append([Abs(argtys, b) for b in bodies])
                for args in itertools.product(*pools):
                    if add(Fun(f, tuple(args))):
                        full = True
                        break
                if full:
                    break
        self._memo[key] = out
        return out


def lhs_instances(cs: ComputationSystem, rule: Rule, depth: int, cap: int = 200, per_type: int = 12) -> list[MetaTerm]:
    """Ground instances of ``rule.lhs`` with metavariable images of depth <= ``depth``."""
    en = TermEnumerator(cs.signature, cap=per_type)
    mvs = rule.context
    pools = []
    for name, argtys, res in mvs:
        bodies = en.terms(res, depth, tuple(argtys))
        pools.append([Abs(argtys, b) for b in bodies])
    out: list[MetaTerm] = []
    for combo in itertools.islice(itertools.product(*pools), cap):
        theta = {name: a for (name, _, _), a in zip(mvs, combo)}
        out.append(substitute_metavars(theta, rule.lhs))
    return out


def random_term(
    sig: Signature,
    ty: MolType,
    depth: int,
    rng: random.Random,
    scope: tuple[MolType, ...] = (),
    symbols: Optional[Sequence[str]] = None,
    base: bool = True,
    leaf_bias: float = 0.3,
) -> Optional[MetaTerm]:
    """A random well-typed term, or None when the type has no inhabitant here."""
    names = sorted(symbols if symbols is not None else sig.symbols)
    by_type: dict[MolType, list[str]] = {}
    for f in names:
        by_type.setdefault(sig.symbols[f].result, []).append(f)

    def go(t: MolType, d: int, sc: tuple[MolType, ...]) -> Optional[MetaTerm]:
        leaves: list[MetaTerm] = [Bound(i) for i in range(len(sc)) if sc[len(sc) - 1 - i] == t]
        if base:
            leaves.append(base_var(t))
        funs = by_type.get(t, []) if d > 0 else []
        nullary = [f for f in funs if not sig.symbols[f].binders]
        if (not funs or rng.random() < leaf_bias) and (leaves or nullary):
            pick = rng.randrange(len(leaves) + len(nullary))
            return leaves[pick] if pick < len(leaves) else Fun(nullary[pick - len(leaves)])
        order = list(funs)
        rng.shuffle(order)
        for f in order:
            ft = sig.symbols[f]
            args = []
            for argtys, res in ft.binders:
                b = go(res, d - 1, sc + tuple(argtys))
                if b is None:
                    break
                args.append(Abs(argtys, b))
            else:
                return Fun(f, tuple(args))
        if leaves:
            return rng.choice(leaves)
        return None

    return go(ty, depth, scope)
