"""Parser and printer for the rule-file format.

A file is a sequence of lines::

    type F/1                         # type constructor with arity
    atomic N Unit                    # atomic types
    get : (N -> F(N)) -> F(N)        # symbol declarations
    put : N, F(N) -> F(N)
    zero : -> N                      # nullary; `zero : N` also works
    (lu) get(v.put(v,X)) -> X        # named rules
    split auto-fo                    # or `split A: lu, ll` / `split B: ...`
    option subterm structural
    precedence handler > lam

Binders are written ``x.t`` inside argument lists, meta-applications
``M[t1,...,tn]``; an undeclared identifier starting with an upper-case
letter is a nullary metavariable.  ``a + b`` and ``a @ b`` are infix
spellings of ``plus(a,b)`` and ``app(a,b)`` (left associative, ``@``
binding tighter).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .printing import show
from .rules import ComputationSystem, Rule, RuleError, make_rule
from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var
from .types import Atomic, Con, FunType, MolType, Signature


class ManifestError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ParseError(ManifestError):
    pass


class ArityError(ManifestError):
    pass


class UnknownSymbol(ManifestError):
    pass


INFIX = {"+": "plus", "@": "app"}

_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z0-9_][A-Za-z0-9_']*)|([()\[\],.:>=+@/]))")


@dataclass
class Token:
    kind: str  # "id", "op", "end"
    text: str
    col: int


def tokenize(text: str, line: int = 0, col0: int = 1) -> list[Token]:
    toks: list[Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        start = m.start(m.lastindex or 0)
        if m.group(1):
            toks.append(Token("op", "->", col0 + start))
        elif m.group(2):
            toks.append(Token("id", m.group(2), col0 + start))
        else:
            toks.append(Token("op", m.group(3), col0 + start))
        pos = m.end()
    toks.append(Token("end", "", col0 + len(text)))
    return toks


class _Cursor:
    def __init__(self, toks: list[Token], line: int) -> None:
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.kind != "op" or t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of line'!r}", self.line, t.col)
        return t

    def ident(self) -> Token:
        t = self.next()
        if t.kind != "id":
            raise ParseError(f"expected identifier, found {t.text or 'end of line'!r}", self.line, t.col)
        return t

    def done(self) -> None:
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", self.line, t.col)


def _is_metavar_name(name: str) -> bool:
    return name[0].isupper()


@dataclass
class Manifest:
    signature: Signature = field(default_factory=Signature)
    rules: list[Rule] = field(default_factory=list)
    split: Optional[str] = None  # "auto-fo" or "explicit"
    split_a: list[str] = field(default_factory=list)
    split_b: list[str] = field(default_factory=list)
    options: dict[str, tuple[str, ...]] = field(default_factory=dict)
    precedence: list[list[tuple[str, str]]] = field(default_factory=list)  # chains of (relation, symbol)

    @property
    def system(self) -> ComputationSystem:
        return ComputationSystem(self.signature, list(self.rules))

    def option(self, key: str, default: Optional[str] = None) -> Optional[str]:
        v = self.options.get(key)
        return v[0] if v else default


class TermParser:
    """Parses terms against a signature; binder types come from declarations."""

    def __init__(self, sig: Signature, line: int = 0, allow_free: bool = False) -> None:
        self.sig = sig
        self.line = line
        self.allow_free = allow_free

    def parse(self, text: str, col0: int = 1) -> MetaTerm:
        cur = _Cursor(tokenize(text, self.line, col0), self.line)
        t = self.term(cur, [])
        cur.done()
        return t

    def term(self, cur: _Cursor, scope: list[str]) -> MetaTerm:
        left = self.app_term(cur, scope)
        while cur.at("+"):
            tok = cur.next()
            right = self.app_term(cur, scope)
            left = self._infix(tok, left, right)
        return left

    def app_term(self, cur: _Cursor, scope: list[str]) -> MetaTerm:
        left = self.atom(cur, scope)
        while cur.at("@"):
            tok = cur.next()
            right = self.atom(cur, scope)
            left = self._infix(tok, left, right)
        return left

    def _infix(self, tok: Token, left: MetaTerm, right: MetaTerm) -> MetaTerm:
        sym = INFIX[tok.text]
        ft = self.sig.symbols.get(sym)
        if ft is None:
            raise UnknownSymbol(f"infix {tok.text} needs a declared symbol {sym}", self.line, tok.col)
        if ft.arity != 2 or any(a for a, _ in ft.binders):
            raise ArityError(f"{sym} must take two first-order arguments to be used infix", self.line, tok.col)
        return Fun(sym, (Abs((), left), Abs((), right)))

    def atom(self, cur: _Cursor, scope: list[str]) -> MetaTerm:
        if cur.at("("):
            cur.next()
            t = self.term(cur, scope)
            cur.expect(")")
            return t
        tok = cur.ident()
        name = tok.text
        if name in scope:
            if cur.at("(") or cur.at("["):
                raise ParseError(f"bound variable {name} cannot be applied", self.line, cur.peek().col)
            return Bound(scope[::-1].index(name))
        if name in self.sig.symbols:
            return self.fun(cur, scope, tok)
        if cur.at("["):
            cur.next()
            args: list[MetaTerm] = []
            if not cur.at("]"):
                args.append(self.term(cur, scope))
                while cur.at(","):
                    cur.next()
                    args.append(self.term(cur, scope))
            cur.expect("]")
            return MetaApp(name, tuple(args))
        if _is_metavar_name(name):
            if cur.at("("):
                raise UnknownSymbol(f"undeclared symbol {name}", self.line, tok.col)
            return MetaApp(name, ())
        if self.allow_free and not cur.at("("):
            return Var(name)
        raise UnknownSymbol(f"undeclared symbol {name}", self.line, tok.col)

    def fun(self, cur: _Cursor, scope: list[str], tok: Token) -> MetaTerm:
        ft = self.sig.symbols[tok.text]
        args: list[Abs] = []
        if cur.at("("):
            cur.next()
            if not cur.at(")"):
                args.append(self.arg(cur, scope, ft, 0, tok))
                while cur.at(","):
                    cur.next()
                    args.append(self.arg(cur, scope, ft, len(args), tok))
            cur.expect(")")
        if len(args) != ft.arity:
            raise ArityError(f"{tok.text} expects {ft.arity} arguments, got {len(args)}", self.line, tok.col)
        return Fun(tok.text, tuple(args))

    def arg(self, cur: _Cursor, scope: list[str], ft: FunType, i: int, head: Token) -> Abs:
        names: list[str] = []
        while cur.peek().kind == "id" and cur.peek(1).kind == "op" and cur.peek(1).text == ".":
            names.append(cur.next().text)
            cur.next()
        if i >= ft.arity:
            raise ArityError(f"{head.text} expects {ft.arity} arguments", self.line, head.col)
        argtys, _ = ft.binders[i]
        if len(names) != len(argtys):
            raise ArityError(
                f"argument {i + 1} of {head.text} binds {len(argtys)} variables, got {len(names)}",
                self.line,
                head.col,
            )
        body = self.term(cur, scope + names)
        return Abs(argtys, body, tuple(names))


def parse_type(cur: _Cursor, sig: Signature) -> MolType:
    tok = cur.ident()
    if cur.at("("):
        cur.next()
        args = [parse_type(cur, sig)]
        while cur.at(","):
            cur.next()
            args.append(parse_type(cur, sig))
        cur.expect(")")
        arity = sig.type_constructors.get(tok.text)
        if arity is None:
            raise UnknownSymbol(f"unknown type constructor {tok.text}", cur.line, tok.col)
        if arity != len(args):
            raise ArityError(f"type constructor {tok.text} expects {arity} arguments, got {len(args)}", cur.line, tok.col)
        return Con(tok.text, tuple(args))
    if tok.text not in sig.atomic_types:
        if tok.text in sig.type_constructors:
            raise ArityError(f"type constructor {tok.text} needs arguments", cur.line, tok.col)
        raise UnknownSymbol(f"unknown atomic type {tok.text}", cur.line, tok.col)
    return Atomic(tok.text)


def parse_funtype(cur: _Cursor, sig: Signature) -> FunType:
    items: list[tuple[tuple[MolType, ...], MolType]] = []
    if cur.at("->"):
        cur.next()
        res = parse_type(cur, sig)
        cur.done()
        return FunType((), res)
    while True:
        if cur.at("("):
            # either a binder type (a, b -> c) or nothing else: types never start with '('
            cur.next()
            argtys = [parse_type(cur, sig)]
            while cur.at(","):
                cur.next()
                argtys.append(parse_type(cur, sig))
            cur.expect("->")
            res = parse_type(cur, sig)
            cur.expect(")")
            items.append((tuple(argtys), res))
        else:
            items.append(((), parse_type(cur, sig)))
        if cur.at(","):
            cur.next()
            continue
        break
    if cur.at("->"):
        cur.next()
        res = parse_type(cur, sig)
        cur.done()
        return FunType(tuple(items), res)
    cur.done()
    if len(items) == 1 and not items[0][0]:
        return FunType((), items[0][1])
    raise ParseError("expected '->' in symbol type", cur.line, cur.peek().col)


_RULE = re.compile(r"\s*\(([^()\s]+)\)\s*(.*)$")

KNOWN_OPTIONS = {
    "subterm": {"stable", "structural"},
    "clause5": {"lex", "multiset"},
    "type-order": {"default", "identity", "embedding"},
    "layer": {"strict", "relaxed"},
    "weights-bound": None,
    "oracle-depth": None,
    "oracle-width": None,
}


def _split_rule(body: str, line: int, col0: int) -> tuple[str, str, int]:
    """Split ``lhs -> rhs`` at the top-level arrow."""
    depth = 0
    i = 0
    while i < len(body):
        c = body[i]
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif c == "-" and body.startswith("->", i) and depth == 0:
            return body[:i], body[i + 2 :], i
        i += 1
    raise ParseError("rule without '->'", line, col0)


def parse_manifest(text: str) -> Manifest:
    m = Manifest()
    sig = m.signature
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        words = stripped.split()
        kw = words[0]
        if kw == "type":
            spec = stripped[len("type") :].strip()
            mt = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)", spec)
            if not mt:
                raise ParseError("expected `type Name/arity`", lineno, indent + 1)
            name, arity = mt.group(1), int(mt.group(2))
            if arity < 1:
                raise ArityError("type constructors take at least one argument; use `atomic`", lineno, indent + 1)
            if name in sig.type_constructors or name in sig.atomic_types:
                raise ParseError(f"type {name} declared twice", lineno, indent + 1)
            sig.type_constructors[name] = arity
        elif kw == "atomic":
            for w in words[1:]:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", w):
                    raise ParseError(f"bad type name {w!r}", lineno, indent + 1)
                if w in sig.type_constructors or w in sig.atomic_types:
                    raise ParseError(f"type {w} declared twice", lineno, indent + 1)
                sig.atomic_types.add(w)
        elif kw == "split":
            rest = stripped[len("split") :].strip()
            if rest == "auto-fo":
                m.split = "auto-fo"
            else:
                ms = re.fullmatch(r"([AB])\s*:\s*(.*)", rest)
                if not ms:
                    raise ParseError("expected `split auto-fo` or `split A: r1, r2`", lineno, indent + 1)
                names = [n.strip() for n in ms.group(2).split(",") if n.strip()]
                m.split = "explicit"
                (m.split_a if ms.group(1) == "A" else m.split_b).extend(names)
        elif kw == "option":
            if len(words) < 3:
                raise ParseError("expected `option key value`", lineno, indent + 1)
            key, vals = words[1], tuple(words[2:])
            if key not in KNOWN_OPTIONS:
                raise ParseError(f"unknown option {key}", lineno, indent + 1)
            allowed = KNOWN_OPTIONS[key]
            if allowed is not None and (len(vals) != 1 or vals[0] not in allowed):
                raise ParseError(f"option {key} takes one of {sorted(allowed)}", lineno, indent + 1)
            if allowed is None and not all(v.isdigit() for v in vals):
                raise ParseError(f"option {key} takes natural numbers", lineno, indent + 1)
            m.options[key] = vals
        elif kw == "precedence":
            toks = tokenize(stripped[len("precedence") :], lineno, indent + len("precedence") + 1)
            cur = _Cursor(toks, lineno)
            chain = [("", cur.ident().text)]
            while cur.at(">") or cur.at("="):
                rel = cur.next().text
                chain.append((rel, cur.ident().text))
            cur.done()
            for _, s in chain:
                if s not in sig.symbols:
                    raise UnknownSymbol(f"undeclared symbol {s} in precedence", lineno, indent + 1)
            m.precedence.append(chain)
        elif stripped.startswith("("):
            mr = _RULE.match(stripped)
            if not mr:
                raise ParseError("expected `(name) lhs -> rhs`", lineno, indent + 1)
            name = mr.group(1)
            body = mr.group(2)
            col_body = indent + 1 + mr.start(2)
            lhs_s, rhs_s, arrow = _split_rule(body, lineno, col_body)
            tp = TermParser(sig, lineno)
            lhs = tp.parse(lhs_s, col_body)
            rhs = tp.parse(rhs_s, col_body + arrow + 2)
            if any(r.name == name for r in m.rules):
                raise ParseError(f"rule name {name} used twice", lineno, indent + 1)
            try:
                m.rules.append(make_rule(sig, name, lhs, rhs))
            except RuleError as e:
                raise ParseError(str(e), lineno, indent + 1) from e
        else:
            md = re.match(r"([A-Za-z0-9_][A-Za-z0-9_']*)\s*:(.*)$", stripped)
            if not md:
                raise ParseError(f"cannot parse line starting with {kw!r}", lineno, indent + 1)
            name = md.group(1)
            if name in sig.symbols:
                raise ParseError(f"symbol {name} declared twice", lineno, indent + 1)
            cur = _Cursor(tokenize(md.group(2), lineno, indent + 1 + md.start(2)), lineno)
            sig.declare(name, parse_funtype(cur, sig))
    if m.split == "explicit":
        known = {r.name for r in m.rules}
        for n in m.split_a + m.split_b:
            if n not in known:
                raise UnknownSymbol(f"split names unknown rule {n}")
    return m


def parse_term(sig: Signature, text: str, allow_free: bool = False) -> MetaTerm:
    return TermParser(sig, 0, allow_free).parse(text)


def print_funtype(ft: FunType) -> str:
    return str(ft)


def print_manifest(m: Manifest) -> str:
    sig = m.signature
    out: list[str] = []
    for name, arity in sig.type_constructors.items():
        out.append(f"type {name}/{arity}")
    if sig.atomic_types:
        out.append("atomic " + " ".join(sorted(sig.atomic_types)))
    for name, ft in sig.symbols.items():
        out.append(f"{name} : {print_funtype(ft)}")
    for r in m.rules:
        out.append(f"({r.name}) {show(r.lhs)} -> {show(r.rhs)}")
    if m.split == "auto-fo":
        out.append("split auto-fo")
    elif m.split == "explicit":
        if m.split_a:
            out.append("split A: " + ", ".join(m.split_a))
        if m.split_b:
            out.append("split B: " + ", ".join(m.split_b))
    for key, vals in m.options.items():
        out.append(f"option {key} {' '.join(vals)}")
    for chain in m.precedence:
        out.append("precedence " + " ".join((f"{rel} {s}" if rel else s) for rel, s in chain))
    return "\n".join(out) + "\n"
