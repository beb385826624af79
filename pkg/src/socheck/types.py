"""Molecular types, second-order function types and signatures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


class MolType:
    """A molecular type: an atomic type or a type constructor application."""

    __slots__ = ()

    def size(self) -> int:
        raise NotImplementedError

    def subtypes(self) -> Iterator["MolType"]:
        """Yield this type and every type nested inside it."""
        raise NotImplementedError


@dataclass(frozen=True)
class Atomic(MolType):
    name: str

    def size(self) -> int:
        return 1

    def subtypes(self) -> Iterator[MolType]:
        yield self

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Con(MolType):
    name: str
    args: tuple[MolType, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError(f"type constructor {self.name} applied to no arguments")

    def size(self) -> int:
        return 1 + sum(a.size() for a in self.args)

    def subtypes(self) -> Iterator[MolType]:
        yield self
        for a in self.args:
            yield from a.subtypes()

    def __str__(self) -> str:
        return f"{self.name}({','.join(str(a) for a in self.args)})"


def mangle(ty: MolType) -> str:
    """Identifier-safe spelling of a type, used to name per-type symbols."""
    if isinstance(ty, Atomic):
        return ty.name
    assert isinstance(ty, Con)
    return "_".join([ty.name] + [mangle(a) for a in ty.args])


@dataclass(frozen=True)
class FunType:
    """``(a1 -> b1), ..., (am -> bm) -> c``; each binder may have no argument types."""

    binders: tuple[tuple[tuple[MolType, ...], MolType], ...]
    result: MolType

    @property
    def arity(self) -> int:
        return len(self.binders)

    def is_first_order(self) -> bool:
        return all(not args for args, _ in self.binders)

    def mol_types(self) -> Iterator[MolType]:
        for args, res in self.binders:
            yield from args
            yield res
        yield self.result

    def __str__(self) -> str:
        parts = []
        for args, res in self.binders:
            if args:
                parts.append(f"({', '.join(map(str, args))} -> {res})")
            else:
                parts.append(str(res))
        return f"{', '.join(parts)} -> {self.result}" if parts else f"-> {self.result}"


@dataclass
class Signature:
    """Function symbols with their second-order types.

    ``constructors`` records declared type-constructor arities so that mol
    types can be validated; it is not needed for term-level operations.
    """

    symbols: dict[str, FunType] = field(default_factory=dict)
    type_constructors: dict[str, int] = field(default_factory=dict)
    atomic_types: set[str] = field(default_factory=set)

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def __getitem__(self, name: str) -> FunType:
        return self.symbols[name]

    def declare(self, name: str, ty: FunType) -> None:
        self.symbols[name] = ty

    def extended(self, extra: dict[str, FunType]) -> "Signature":
        syms = dict(self.symbols)
        syms.update(extra)
        return Signature(syms, dict(self.type_constructors), set(self.atomic_types))

    def restricted(self, names: set[str]) -> "Signature":
        return Signature(
            {n: t for n, t in self.symbols.items() if n in names},
            dict(self.type_constructors),
            set(self.atomic_types),
        )

    def mol_types(self) -> set[MolType]:
        """Every mol type (and nested mol type) mentioned by some symbol."""
        out: set[MolType] = set()
        for ft in self.symbols.values():
            for t in ft.mol_types():
                out.update(t.subtypes())
        return out

    def check_type(self, ty: MolType) -> None:
        if isinstance(ty, Atomic):
            if self.atomic_types and ty.name not in self.atomic_types:
                raise ValueError(f"unknown atomic type {ty.name}")
            return
        assert isinstance(ty, Con)
        arity = self.type_constructors.get(ty.name)
        if arity is None:
            raise ValueError(f"unknown type constructor {ty.name}")
        if arity != len(ty.args):
            raise ValueError(f"type constructor {ty.name} expects {arity} arguments, got {len(ty.args)}")
        for a in ty.args:
            self.check_type(a)
