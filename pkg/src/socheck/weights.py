"""Linear weight interpretations: evaluation, verification and search.

A weight gives each symbol ``f`` with ``n`` arguments a constant ``c0``
and coefficients ``c1..cn``; a term is interpreted as a linear polynomial
over metavariable (and free-variable) indeterminates.  Bound variables
weigh 0 and abstractions are transparent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .rules import ComputationSystem, Rule
from .terms import Abs, Bound, Fun, MetaApp, MetaTerm, Var
from .types import MolType, Signature
from .wsearch import Constraint, SearchBudgetExhausted, solve


class MissingWeight(Exception):
    pass


@dataclass(frozen=True)
class LinearWeight:
    const: int
    coeffs: tuple[int, ...]

    def __str__(self) -> str:
        parts = [f"{c}*x{i + 1}" if c != 1 else f"x{i + 1}" for i, c in enumerate(self.coeffs) if c]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class WeightPolynomial:
    coeffs: tuple[tuple[str, int], ...]  # sorted, no zero entries
    const: int

    @staticmethod
    def make(coeffs: Mapping[str, int], const: int) -> "WeightPolynomial":
        return WeightPolynomial(tuple(sorted((k, v) for k, v in coeffs.items() if v)), const)

    def coeff(self, name: str) -> int:
        return dict(self.coeffs).get(name, 0)

    def is_zero(self) -> bool:
        return not self.coeffs and self.const == 0

    def dominates(self, other: "WeightPolynomial", strict: bool = True) -> bool:
        mine = dict(self.coeffs)
        if any(mine.get(k, 0) < v for k, v in other.coeffs):
            return False
        return self.const > other.const if strict else self.const >= other.const

    def __str__(self) -> str:
        parts = [f"{v}*{k}" if v != 1 else k for k, v in self.coeffs]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


Weights = Mapping[str, LinearWeight]


def interpret_weight(w: Weights, t: MetaTerm) -> WeightPolynomial:
    coeffs: dict[str, int] = {}
    const = 0

    def go(s: MetaTerm, k: int) -> None:
        nonlocal const
        if k == 0:
            return
        if isinstance(s, Bound):
            return
        if isinstance(s, Var):
            coeffs[s.name] = coeffs.get(s.name, 0) + k
            return
        if isinstance(s, Abs):
            go(s.body, k)
            return
        if isinstance(s, MetaApp):
            coeffs[s.name] = coeffs.get(s.name, 0) + k
            for a in s.args:
                go(a, k)
            return
        assert isinstance(s, Fun)
        lw = w.get(s.symbol)
        if lw is None:
            raise MissingWeight(f"no weight for {s.symbol}")
        if len(lw.coeffs) != len(s.args):
            raise MissingWeight(f"weight for {s.symbol} has {len(lw.coeffs)} coefficients, symbol has {len(s.args)} arguments")
        const += k * lw.const
        for c, a in zip(lw.coeffs, s.args):
            go(a.body, k * c)

    go(t, 1)
    return WeightPolynomial.make(coeffs, const)


def _metaapp_args(t: MetaTerm) -> list[MetaTerm]:
    out: list[MetaTerm] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Fun):
            stack.extend(a.body for a in s.args)
        elif isinstance(s, MetaApp):
            for a in s.args:
                if not isinstance(a, Bound):
                    out.append(a)
                stack.append(a)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return out


@dataclass(frozen=True)
class RuleWeightCheck:
    rule: str
    lhs: WeightPolynomial
    rhs: WeightPolynomial
    ok: bool
    reason: str = ""

    def inequality(self) -> str:
        rel = ">" if self.ok else "not >"
        return f"({self.rule}) {self.lhs} {rel} {self.rhs}"


def check_rule_weight(w: Weights, rule: Rule, strict: bool = True) -> RuleWeightCheck:
    lhs = interpret_weight(w, rule.lhs)
    rhs = interpret_weight(w, rule.rhs)
    heavy = [a for a in _metaapp_args(rule.lhs) + _metaapp_args(rule.rhs) if not interpret_weight(w, a).is_zero()]
    if heavy:
        from .printing import show

        return RuleWeightCheck(rule.name, lhs, rhs, False, f"metavariable argument {show(heavy[0])} has non-zero weight")
    ok = lhs.dominates(rhs, strict)
    return RuleWeightCheck(rule.name, lhs, rhs, ok, "" if ok else "lhs does not dominate rhs coefficient-wise with a larger constant")


def verify_weights(cs: ComputationSystem, w: Weights) -> dict[str, RuleWeightCheck]:
    return {r.name: check_rule_weight(w, r) for r in cs.rules}


def hosting_types(sig: Signature, defined: Iterable[str]) -> set[MolType]:
    """Types whose terms can contain a defined symbol."""
    defined = set(defined)
    hosts: set[MolType] = set()
    changed = True
    while changed:
        changed = False
        for f, ft in sig.symbols.items():
            if ft.result in hosts:
                continue
            if f in defined or any(res in hosts for _, res in ft.binders):
                hosts.add(ft.result)
                changed = True
    return hosts


def hosting_positions(sig: Signature, defined: Iterable[str]) -> dict[str, tuple[bool, ...]]:
    hosts = hosting_types(sig, defined)
    return {f: tuple(res in hosts for _, res in ft.binders) for f, ft in sig.symbols.items()}


def monotonicity_violations(cs: ComputationSystem, w: Weights) -> list[str]:
    """Argument positions that can host a redex but have coefficient 0."""
    out = []
    pos = hosting_positions(cs.signature, cs.defined)
    for f, flags in sorted(pos.items()):
        lw = w.get(f)
        if lw is None:
            continue
        for i, (h, c) in enumerate(zip(flags, lw.coeffs)):
            if h and c < 1:
                out.append(f"{f} argument {i + 1} can host a redex but has coefficient 0")
    return out


# --- symbolic interpretation and search --------------------------------------

ParamPoly = dict[tuple[int, ...], int]


def _pp_add(a: ParamPoly, b: ParamPoly, k: int = 1) -> None:
    for m, c in b.items():
        v = a.get(m, 0) + k * c
        if v:
            a[m] = v
        else:
            a.pop(m, None)


def _pp_mul_param(a: ParamPoly, p: int) -> ParamPoly:
    return {tuple(sorted(m + (p,))): c for m, c in a.items()}


class ParamLayout:
    """Parameter indices for the constants and coefficients of each symbol."""

    def __init__(self, arities: Mapping[str, int]) -> None:
        self.index: dict[str, tuple[int, tuple[int, ...]]] = {}
        self.names: list[str] = []
        for f, n in arities.items():
            c0 = len(self.names)
            self.names.append(f"{f}.c0")
            cs = []
            for i in range(n):
                cs.append(len(self.names))
                self.names.append(f"{f}.c{i + 1}")
            self.index[f] = (c0, tuple(cs))

    def __len__(self) -> int:
        return len(self.names)

    def weights(self, values: Sequence[int]) -> dict[str, LinearWeight]:
        return {f: LinearWeight(values[c0], tuple(values[i] for i in cs)) for f, (c0, cs) in self.index.items()}


SymPoly = dict[Optional[str], ParamPoly]


def interpret_symbolic(layout: ParamLayout, t: MetaTerm, fixed: Optional[Weights] = None) -> SymPoly:
    out: SymPoly = {}

    def add(key: Optional[str], pp: ParamPoly) -> None:
        _pp_add(out.setdefault(key, {}), pp)

    def go(s: MetaTerm, k: ParamPoly) -> None:
        if not k:
            return
        if isinstance(s, Bound):
            return
        if isinstance(s, Var):
            add(s.name, k)
            return
        if isinstance(s, Abs):
            go(s.body, k)
            return
        if isinstance(s, MetaApp):
            add(s.name, k)
            for a in s.args:
                go(a, k)
            return
        assert isinstance(s, Fun)
        if fixed is not None and s.symbol in fixed:
            lw = fixed[s.symbol]
            add(None, {m: c * lw.const for m, c in k.items()})
            for c, a in zip(lw.coeffs, s.args):
                if c:
                    go(a.body, {m: v * c for m, v in k.items()})
            return
        if s.symbol not in layout.index:
            raise MissingWeight(f"no weight parameters for {s.symbol}")
        c0, cs = layout.index[s.symbol]
        add(None, _pp_mul_param(k, c0))
        for p, a in zip(cs, s.args):
            go(a.body, _pp_mul_param(k, p))

    go(t, {(): 1})
    return {key: pp for key, pp in out.items() if pp}


def order_constraints(lhs: SymPoly, rhs: SymPoly, strict: bool, label: str = "") -> list[Constraint]:
    """Coefficient-wise ``lhs >= rhs`` and constant ``lhs > rhs`` (or ``>=``)."""
    out = []
    for key in sorted(set(lhs) | set(rhs), key=lambda k: (k is not None, k or "")):
        diff: ParamPoly = {}
        _pp_add(diff, lhs.get(key, {}))
        _pp_add(diff, rhs.get(key, {}), -1)
        bound = 1 if (key is None and strict) else 0
        out.append(Constraint(diff, bound, label))
    if strict and None not in lhs and None not in rhs:
        out.append(Constraint({}, 1, label))
    return out


def zero_constraints(sp: SymPoly, label: str = "") -> list[Constraint]:
    out = []
    for pp in sp.values():
        out.append(Constraint({m: -c for m, c in pp.items()}, 0, label))
    return out


@dataclass
class WeightSearchResult:
    weights: Optional[dict[str, LinearWeight]]
    checks: dict[str, RuleWeightCheck] = field(default_factory=dict)
    reason: str = ""


def rule_constraints(layout: ParamLayout, rule: Rule, strict: bool) -> list[Constraint]:
    lhs = interpret_symbolic(layout, rule.lhs)
    rhs = interpret_symbolic(layout, rule.rhs)
    cons = order_constraints(lhs, rhs, strict, rule.name)
    for a in _metaapp_args(rule.lhs) + _metaapp_args(rule.rhs):
        cons.extend(zero_constraints(interpret_symbolic(layout, a), rule.name))
    return cons


def find_linear_weights(
    cs: ComputationSystem,
    coeff_bound: int = 2,
    const_bound: int = 2,
    node_budget: int = 5_000_000,
    kernel: Optional[str] = None,
) -> WeightSearchResult:
    """Search for strictly monotone linear weights proving every rule decreasing.

    Coefficients of positions that can host a redex range over
    ``1..coeff_bound``, others over ``0..coeff_bound``; constants over
    ``0..const_bound``.
    """
    sig = cs.signature
    used = sorted({f for r in cs.rules for f in _symbols(r)})
    layout = ParamLayout({f: sig.symbols[f].arity for f in used})
    pos = hosting_positions(sig, cs.defined)
    lo, hi = [], []
    for f in used:
        c0, cps = layout.index[f]
        lo.append(0)
        hi.append(const_bound)
        for i, _ in enumerate(cps):
            lo.append(1 if pos[f][i] else 0)
            hi.append(coeff_bound)
    cons: list[Constraint] = []
    for r in cs.rules:
        cons.extend(rule_constraints(layout, r, strict=True))
    try:
        sol = solve(len(layout), lo, hi, cons, node_budget, kernel)
    except SearchBudgetExhausted as e:
        return WeightSearchResult(None, {}, str(e))
    if sol is None:
        return WeightSearchResult(None, {}, f"no linear weights with coefficients <= {coeff_bound} and constants <= {const_bound}")
    w = layout.weights(sol)
    for f, ft in sig.symbols.items():
        if f not in w:
            w[f] = LinearWeight(0, tuple(1 if h else 0 for h in pos[f]))
    checks = verify_weights(cs, w)
    assert all(c.ok for c in checks.values()), "search returned weights that do not verify"
    return WeightSearchResult(w, checks)


def _symbols(rule: Rule) -> set[str]:
    from .terms import fun_symbols

    return fun_symbols(rule.lhs) | fun_symbols(rule.rhs)
