"""Index shifting, variable substitution and metavariable substitution."""

from __future__ import annotations

from typing import Mapping, Sequence

from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var


class SubstitutionError(Exception):
    pass


def shift(t: MetaTerm, d: int, cutoff: int = 0) -> MetaTerm:
    """Add ``d`` to every index that escapes ``cutoff`` binders."""
    if d == 0:
        return t

    def go(s: MetaTerm, c: int) -> MetaTerm:
        if isinstance(s, Bound):
            if s.index >= c:
                return Bound(s.index + d)
            return s
        if isinstance(s, Var):
            return s
        if isinstance(s, Fun):
            return Fun(s.symbol, tuple(Abs(a.types, go(a.body, c + a.arity), a.names) for a in s.args), s.label)
        if isinstance(s, MetaApp):
            return MetaApp(s.name, tuple(go(a, c) for a in s.args))
        assert isinstance(s, Abs)
        return Abs(s.types, go(s.body, c + s.arity), s.names)

    return go(t, cutoff)


def instantiate(body: MetaTerm, args: Sequence[MetaTerm], outer: int = 0) -> MetaTerm:
    """Replace the ``k`` innermost binders of ``body`` by ``args``.

    ``args[i]`` stands for the binder ``x_{i+1}`` so ``args[-1]`` replaces
    ``Bound(0)``.  Indices of ``body`` escaping those binders are moved into
    a scope that has ``outer`` more binders than the scope of the
    abstraction; ``args`` live in that target scope.
    """
    k = len(args)
    if k == 0 and outer == 0:
        return body

    def go(s: MetaTerm, ld: int) -> MetaTerm:
        if isinstance(s, Bound):
            j = s.index
            if j < ld:
                return s
            if j < ld + k:
                return shift(args[k - 1 - (j - ld)], ld)
            return Bound(j - k + outer)
        if isinstance(s, Var):
            return s
        if isinstance(s, Fun):
            return Fun(s.symbol, tuple(Abs(a.types, go(a.body, ld + a.arity), a.names) for a in s.args), s.label)
        if isinstance(s, MetaApp):
            return MetaApp(s.name, tuple(go(a, ld) for a in s.args))
        assert isinstance(s, Abs)
        return Abs(s.types, go(s.body, ld + s.arity), s.names)

    return go(body, 0)


def open_abs(a: Abs, names: Sequence[str]) -> MetaTerm:
    """Body of ``a`` with its binders replaced by free variables ``names``."""
    if len(names) != a.arity:
        raise SubstitutionError("wrong number of names to open abstraction")
    return instantiate(a.body, [Var(n) for n in names])


def close(t: MetaTerm, names: Sequence[str]) -> MetaTerm:
    """Turn free variables ``names`` into the innermost binders (inverse of ``open_abs``)."""
    k = len(names)
    pos = {n: i for i, n in enumerate(names)}

    def go(s: MetaTerm, ld: int) -> MetaTerm:
        if isinstance(s, Var):
            i = pos.get(s.name)
            if i is None:
                return s
            return Bound(ld + (k - 1 - i))
        if isinstance(s, Bound):
            return Bound(s.index + k) if s.index >= ld else s
        if isinstance(s, Fun):
            return Fun(s.symbol, tuple(Abs(a.types, go(a.body, ld + a.arity), a.names) for a in s.args), s.label)
        if isinstance(s, MetaApp):
            return MetaApp(s.name, tuple(go(a, ld) for a in s.args))
        assert isinstance(s, Abs)
        return Abs(s.types, go(s.body, ld + s.arity), s.names)

    return go(t, 0)


def substitute_vars(t: MetaTerm, sub: Mapping[str, MetaTerm]) -> MetaTerm:
    """Capture-avoiding substitution of free variables."""
    if not sub:
        return t

    def go(s: MetaTerm, ld: int) -> MetaTerm:
        if isinstance(s, Var):
            r = sub.get(s.name)
            return s if r is None else shift(r, ld)
        if isinstance(s, Bound):
            return s
        if isinstance(s, Fun):
            return Fun(
                s.symbol,
                tuple(Abs(a.types, go(a.body, ld + a.arity), a.names) for a in s.args),
                None if s.label is None else go(s.label, ld),
            )
        if isinstance(s, MetaApp):
            return MetaApp(s.name, tuple(go(a, ld) for a in s.args))
        assert isinstance(s, Abs)
        return Abs(s.types, go(s.body, ld + s.arity), s.names)

    return go(t, 0)


Assignment = Mapping[str, Abs]


def substitute_metavars(theta: Assignment, t: MetaTerm, strict: bool = False) -> MetaTerm:
    """Apply a metavariable assignment.

    ``theta[M]`` is an abstraction whose escaping indices refer to the scope
    in which ``t`` itself lives.  Metavariables outside ``theta`` are kept
    unless ``strict`` is set.
    """

    def go(s: MetaTerm, ld: int) -> MetaTerm:
        if isinstance(s, (Var, Bound)):
            return s
        if isinstance(s, Fun):
            return Fun(
                s.symbol,
                tuple(Abs(a.types, go(a.body, ld + a.arity), a.names) for a in s.args),
                s.label,
            )
        if isinstance(s, MetaApp):
            args = tuple(go(a, ld) for a in s.args)
            a = theta.get(s.name)
            if a is None:
                if strict:
                    raise SubstitutionError(f"metavariable {s.name} is not assigned")
                return MetaApp(s.name, args)
            if a.arity != len(args):
                raise SubstitutionError(
                    f"metavariable {s.name} takes {a.arity} arguments but is applied to {len(args)}"
                )
            return instantiate(a.body, args, outer=ld)
        assert isinstance(s, Abs)
        return Abs(s.types, go(s.body, ld + s.arity), s.names)

    return go(t, 0)


def compose(theta: Assignment, sigma: Assignment) -> dict[str, Abs]:
    """``theta`` then ``sigma``: the assignment M -> sigma(theta(M))."""
    out: dict[str, Abs] = {}
    for m, a in theta.items():
        out[m] = Abs(a.types, substitute_metavars(sigma, a.body), a.names)
    for m, a in sigma.items():
        out.setdefault(m, a)
    return out
