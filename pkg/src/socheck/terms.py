"""Meta-terms in locally nameless form.

Bound variables are de Bruijn indices (``Bound(0)`` is the innermost binder).
Free variables of a term in context are named ``Var`` nodes.  Abstractions
only occur as arguments of function symbols, mirroring the second-order
syntax: every argument of ``Fun`` is an ``Abs`` binding zero or more
variables.  Binder names are kept as printing hints and ignored by equality.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .types import MolType


class MetaTerm:
    __slots__ = ("_hash",)

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("meta-terms are immutable")

    def __repr__(self) -> str:
        from .printing import show

        return f"<{show(self)}>"


class Var(MetaTerm):
    """A free (named) variable of the term's context."""

    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        object.__setattr__(self, "name", name)

    def _key(self) -> tuple:
        return (self.name,)


class Bound(MetaTerm):
    """A de Bruijn index."""

    __slots__ = ("index",)

    def __init__(self, index: int) -> None:
        if index < 0:
            raise ValueError("negative de Bruijn index")
        object.__setattr__(self, "index", index)

    def _key(self) -> tuple:
        return (self.index,)


class Abs(MetaTerm):
    """``x1...xk. body`` with ``xk`` as ``Bound(0)`` inside ``body``."""

    __slots__ = ("types", "body", "names")

    def __init__(self, types: tuple[MolType, ...], body: MetaTerm, names: Optional[tuple[str, ...]] = None) -> None:
        types = tuple(types)
        if names is None:
            names = tuple("x" for _ in types)
        if len(names) != len(types):
            raise ValueError("binder names and types differ in length")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "names", tuple(names))

    @property
    def arity(self) -> int:
        return len(self.types)

    def _key(self) -> tuple:
        return (self.types, self.body)


class Fun(MetaTerm):
    """``f(args)``; ``label`` is set only for labelled terms."""

    __slots__ = ("symbol", "args", "label")

    def __init__(self, symbol: str, args: tuple[Abs, ...] = (), label: Optional[MetaTerm] = None) -> None:
        args = tuple(args)
        for a in args:
            if not isinstance(a, Abs):
                raise TypeError("function arguments must be Abs nodes")
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "label", label)

    def _key(self) -> tuple:
        return (self.symbol, self.args, self.label)


class MetaApp(MetaTerm):
    """``M[t1, ..., tk]``."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple[MetaTerm, ...] = ()) -> None:
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", tuple(args))

    def _key(self) -> tuple:
        return (self.name, self.args)


def fo(symbol: str, *args: MetaTerm, label: Optional[MetaTerm] = None) -> Fun:
    """Build ``f(t1, ..., tn)`` with no binders in any argument."""
    return Fun(symbol, tuple(Abs((), a) for a in args), label)


Term = MetaTerm


def size(t: MetaTerm) -> int:
    if isinstance(t, (Var, Bound)):
        return 1
    if isinstance(t, Abs):
        return size(t.body)
    if isinstance(t, Fun):
        return 1 + sum(size(a.body) for a in t.args)
    assert isinstance(t, MetaApp)
    return 1 + sum(size(a) for a in t.args)


def depth(t: MetaTerm) -> int:
    if isinstance(t, (Var, Bound)):
        return 0
    if isinstance(t, Abs):
        return depth(t.body)
    if isinstance(t, Fun):
        return 1 + max((depth(a.body) for a in t.args), default=0)
    assert isinstance(t, MetaApp)
    return 1 + max((depth(a) for a in t.args), default=0)


def fun_symbols(t: MetaTerm) -> set[str]:
    """Function symbols occurring in ``t`` (labels are not inspected)."""
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Fun):
            out.add(s.symbol)
            stack.extend(a.body for a in s.args)
        elif isinstance(s, MetaApp):
            stack.extend(s.args)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return out


def metavars(t: MetaTerm) -> dict[str, int]:
    """Metavariables of ``t`` with the number of arguments they are applied to."""
    out: dict[str, int] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Fun):
            stack.extend(a.body for a in s.args)
        elif isinstance(s, MetaApp):
            out.setdefault(s.name, len(s.args))
            stack.extend(s.args)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return out


def metavar_occurrences(t: MetaTerm) -> list[str]:
    out: list[str] = []

    def go(s: MetaTerm) -> None:
        if isinstance(s, Fun):
            for a in s.args:
                go(a.body)
        elif isinstance(s, MetaApp):
            out.append(s.name)
            for a in s.args:
                go(a)
        elif isinstance(s, Abs):
            go(s.body)

    go(t)
    return out


def free_vars(t: MetaTerm) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Fun):
            stack.extend(a.body for a in s.args)
        elif isinstance(s, MetaApp):
            stack.extend(s.args)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return out


def loose_indices(t: MetaTerm, depth_: int = 0) -> set[int]:
    """Dangling de Bruijn indices, reported relative to the root of ``t``."""
    out: set[int] = set()

    def go(s: MetaTerm, d: int) -> None:
        if isinstance(s, Bound):
            if s.index >= d:
                out.add(s.index - d)
        elif isinstance(s, Fun):
            for a in s.args:
                go(a.body, d + a.arity)
        elif isinstance(s, MetaApp):
            for a in s.args:
                go(a, d)
        elif isinstance(s, Abs):
            go(s.body, d + s.arity)

    go(t, depth_)
    return out


def is_closed(t: MetaTerm) -> bool:
    return not free_vars(t) and not loose_indices(t)


def is_ground(t: MetaTerm) -> bool:
    """No metavariables."""
    return not metavars(t)


def is_second_order_pattern(t: MetaTerm) -> bool:
    """Every metavariable is applied to distinct bound variables.

    Dangling indices count as bound: they are bound by an enclosing binder of
    the term the subterm was taken from.
    """
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Fun):
            stack.extend(a.body for a in s.args)
        elif isinstance(s, Abs):
            stack.append(s.body)
        elif isinstance(s, MetaApp):
            seen = set()
            for a in s.args:
                if not isinstance(a, Bound) or a.index in seen:
                    return False
                seen.add(a.index)
    return True


Position = tuple[int, ...]


def subterms(t: MetaTerm) -> Iterator[tuple[Position, MetaTerm, int]]:
    """Yield ``(position, subterm, binders crossed)`` in pre-order.

    Positions index function arguments (``Fun``) and meta-application
    arguments (``MetaApp``); abstractions are transparent.
    """
    stack: list[tuple[Position, MetaTerm, int]] = [((), t, 0)]
    while stack:
        pos, s, d = stack.pop()
        yield pos, s, d
        if isinstance(s, Fun):
            for i in range(len(s.args) - 1, -1, -1):
                a = s.args[i]
                stack.append((pos + (i,), a.body, d + a.arity))
        elif isinstance(s, MetaApp):
            for i in range(len(s.args) - 1, -1, -1):
                stack.append((pos + (i,), s.args[i], d))


def subterm_at(t: MetaTerm, pos: Position) -> MetaTerm:
    for i in pos:
        if isinstance(t, Fun):
            t = t.args[i].body
        elif isinstance(t, MetaApp):
            t = t.args[i]
        else:
            raise IndexError("position does not exist")
    return t


def replace_at(t: MetaTerm, pos: Position, new: MetaTerm) -> MetaTerm:
    """Replace the subterm at ``pos``; ``new`` lives in the same scope."""
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    if isinstance(t, Fun):
        a = t.args[i]
        args = t.args[:i] + (Abs(a.types, replace_at(a.body, rest, new), a.names),) + t.args[i + 1 :]
        return Fun(t.symbol, args, t.label)
    if isinstance(t, MetaApp):
        args = t.args[:i] + (replace_at(t.args[i], rest, new),) + t.args[i + 1 :]
        return MetaApp(t.name, args)
    raise IndexError("position does not exist")


def strip_labels(t: MetaTerm) -> MetaTerm:
    if isinstance(t, Fun):
        return Fun(t.symbol, tuple(Abs(a.types, strip_labels(a.body), a.names) for a in t.args))
    if isinstance(t, MetaApp):
        return MetaApp(t.name, tuple(strip_labels(a) for a in t.args))
    if isinstance(t, Abs):
        return Abs(t.types, strip_labels(t.body), t.names)
    return t
