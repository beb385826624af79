"""Second-order pattern matching (the Miller fragment, matching only)."""

from __future__ import annotations

from typing import Optional

from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var
from .types import MolType


class NotAPattern(Exception):
    pass


class _Fail(Exception):
    pass


def _abstract(s: MetaTerm, argpos: dict[int, int], k: int, pd: int) -> MetaTerm:
    """Abstract the pattern-bound indices ``argpos`` (pattern index -> binder
    slot) out of ``s``.  ``s`` sits under ``pd`` pattern binders; indices
    above those are ambient and are shifted past the ``k`` new binders."""

    def go(t: MetaTerm, ld: int) -> MetaTerm:
        if isinstance(t, Bound):
            j = t.index
            if j < ld:
                return t
            e = j - ld
            if e < pd:
                slot = argpos.get(e)
                if slot is None:
                    raise _Fail
                return Bound(ld + (k - 1 - slot))
            return Bound(ld + k + (e - pd))
        if isinstance(t, Var):
            return t
        if isinstance(t, Fun):
            return Fun(t.symbol, tuple(Abs(a.types, go(a.body, ld + a.arity), a.names) for a in t.args), t.label)
        if isinstance(t, MetaApp):
            return MetaApp(t.name, tuple(go(a, ld) for a in t.args))
        assert isinstance(t, Abs)
        return Abs(t.types, go(t.body, ld + t.arity), t.names)

    return go(s, 0)


def match(pattern: MetaTerm, subject: MetaTerm) -> Optional[dict[str, Abs]]:
    """Most general assignment ``theta`` with ``theta(pattern) == subject``.

    ``subject`` may contain indices pointing above its root (it is a
    subterm of a larger term); they may appear in metavariable images
    but never as images of pattern-bound variables.  Labels are ignored.
    """
    theta: dict[str, Abs] = {}
    types: list[MolType] = []
    names: list[str] = []

    def go(p: MetaTerm, s: MetaTerm, pd: int) -> None:
        if isinstance(p, MetaApp):
            argpos: dict[int, int] = {}
            for i, a in enumerate(p.args):
                if not isinstance(a, Bound) or a.index >= pd or a.index in argpos:
                    raise NotAPattern(f"metavariable {p.name} is not applied to distinct bound variables")
                argpos[a.index] = i
            k = len(p.args)
            body = _abstract(s, argpos, k, pd)
            tys = tuple(types[len(types) - 1 - a.index] for a in p.args)  # type: ignore[union-attr]
            nms = tuple(names[len(names) - 1 - a.index] for a in p.args)  # type: ignore[union-attr]
            old = theta.get(p.name)
            if old is not None:
                if old.body != body or old.types != tys:
                    raise _Fail
                return
            theta[p.name] = Abs(tys, body, nms)
            return
        if isinstance(p, Fun):
            if not isinstance(s, Fun) or s.symbol != p.symbol or len(s.args) != len(p.args):
                raise _Fail
            for pa, sa in zip(p.args, s.args):
                if pa.types != sa.types:
                    raise _Fail
                types.extend(pa.types)
                names.extend(pa.names)
                try:
                    go(pa.body, sa.body, pd + pa.arity)
                finally:
                    del types[len(types) - pa.arity :]
                    del names[len(names) - pa.arity :]
            return
        if isinstance(p, Bound):
            if not isinstance(s, Bound) or s.index != p.index:
                raise _Fail
            return
        if isinstance(p, Var):
            if s != p:
                raise _Fail
            return
        raise NotAPattern("abstraction in a non-argument position")

    try:
        go(pattern, subject, 0)
    except _Fail:
        return None
    return theta
