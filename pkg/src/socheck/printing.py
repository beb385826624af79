"""Named rendering of locally nameless terms."""

from __future__ import annotations

from typing import Optional, Sequence

from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var, free_vars


def _fresh(hint: str, taken: set[str]) -> str:
    name = hint
    while name in taken:
        name += "'"
    return name


def show(t: MetaTerm, scope: Sequence[str] = (), labels: bool = True, avoid: Optional[set[str]] = None) -> str:
    """Render ``t``.

    ``scope`` names dangling indices (last entry is ``Bound(0)``); indices
    beyond it print as ``#i``.  Binder names come from the stored hints,
    primed until they clash with nothing visible.
    """
    taken = set(avoid or ()) | free_vars(t) | set(scope)
    names = list(scope)

    def go(s: MetaTerm) -> str:
        if isinstance(s, Var):
            return s.name
        if isinstance(s, Bound):
            if s.index < len(names):
                return names[len(names) - 1 - s.index]
            return f"#{s.index - len(names)}"
        if isinstance(s, MetaApp):
            if not s.args:
                return s.name if s.name[:1].isupper() else f"{s.name}[]"
            return f"{s.name}[{','.join(go(a) for a in s.args)}]"
        if isinstance(s, Abs):
            return go_abs(s)
        assert isinstance(s, Fun)
        head = s.symbol
        if labels and s.label is not None:
            head = f"{head}{{{go(s.label)}}}"
        if not s.args:
            return head
        return f"{head}({','.join(go_abs(a) for a in s.args)})"

    def go_abs(a: Abs) -> str:
        bound = []
        visible = set(names)
        for h in a.names:
            n = _fresh(h, taken | visible | set(bound))
            bound.append(n)
        names.extend(bound)
        try:
            body = go(a.body)
        finally:
            del names[len(names) - len(bound) :]
        return "".join(f"{n}." for n in bound) + body

    return go(t)


def show_abs(a: Abs) -> str:
    return show(a)
