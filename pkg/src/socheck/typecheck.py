"""Syntax-directed typing of meta-terms."""

from __future__ import annotations

from typing import Mapping, Sequence

from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var
from .types import FunType, MolType, Signature


class TypingError(Exception):
    def __init__(self, message: str, term: MetaTerm | None = None) -> None:
        super().__init__(message)
        self.term = term


class UnboundVariable(TypingError):
    pass


class UnboundMetavariable(TypingError):
    pass


class ArityMismatch(TypingError):
    pass


class TypeMismatch(TypingError):
    pass


class UnknownSymbolError(TypingError):
    pass


MetaTypes = Mapping[str, tuple[tuple[MolType, ...], MolType]]


def typecheck(
    sig: Signature,
    context: MetaTypes,
    var_env: Mapping[str, MolType],
    t: MetaTerm,
    bound: Sequence[MolType] = (),
) -> MolType:
    """Return the type of ``t``.

    ``context`` maps metavariables to ``(argTypes, result)``; ``var_env``
    types free variables; ``bound`` types dangling indices (last entry is
    ``Bound(0)``).  Labels on ``Fun`` nodes are not checked.
    """
    stack = list(bound)

    def go(s: MetaTerm) -> MolType:
        if isinstance(s, Var):
            ty = var_env.get(s.name)
            if ty is None:
                raise UnboundVariable(f"unbound variable {s.name}", s)
            return ty
        if isinstance(s, Bound):
            if s.index >= len(stack):
                raise UnboundVariable(f"dangling index {s.index}", s)
            return stack[len(stack) - 1 - s.index]
        if isinstance(s, MetaApp):
            decl = context.get(s.name)
            if decl is None:
                raise UnboundMetavariable(f"unbound metavariable {s.name}", s)
            argtys, res = decl
            if len(argtys) != len(s.args):
                raise ArityMismatch(
                    f"metavariable {s.name} expects {len(argtys)} arguments, got {len(s.args)}", s
                )
            for a, want in zip(s.args, argtys):
                got = go(a)
                if got != want:
                    raise TypeMismatch(f"argument of {s.name} has type {got}, expected {want}", a)
            return res
        if isinstance(s, Abs):
            raise TypeMismatch("abstraction outside a function argument", s)
        assert isinstance(s, Fun)
        ft: FunType | None = sig.symbols.get(s.symbol)
        if ft is None:
            raise UnknownSymbolError(f"undeclared symbol {s.symbol}", s)
        if len(ft.binders) != len(s.args):
            raise ArityMismatch(f"{s.symbol} expects {len(ft.binders)} arguments, got {len(s.args)}", s)
        for a, (argtys, res) in zip(s.args, ft.binders):
            if a.types != argtys:
                raise TypeMismatch(
                    f"argument of {s.symbol} binds ({', '.join(map(str, a.types))}), "
                    f"expected ({', '.join(map(str, argtys))})",
                    a,
                )
            stack.extend(a.types)
            try:
                got = go(a.body)
            finally:
                del stack[len(stack) - len(a.types) :]
            if got != res:
                raise TypeMismatch(f"argument of {s.symbol} has type {got}, expected {res}", a.body)
        return ft.result

    return go(t)


def well_typed(sig: Signature, context: MetaTypes, var_env: Mapping[str, MolType], t: MetaTerm) -> bool:
    try:
        typecheck(sig, context, var_env, t)
    except TypingError:
        return False
    return True
