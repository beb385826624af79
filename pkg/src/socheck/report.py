"""Proof reports and their human and machine renderings.

Machine format: one record per line, fields separated by a tab.

    verdict   YES|NO|MAYBE
    method    GS|MODULAR|LOOP|ORACLE|NONE
    system    <name>
    obligation  <name>  discharged|failed|skipped
    evidence    <obligation name>  <text>
    reason      <text>

Records appear in this order; evidence lines follow their obligation.
Timings are kept on the report object but never rendered, so output is
byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

VERDICTS = ("YES", "NO", "MAYBE")
METHODS = ("GS", "MODULAR", "LOOP", "ORACLE", "NONE")
STATUSES = ("discharged", "failed", "skipped")


@dataclass
class Obligation:
    name: str
    status: str
    evidence: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "discharged"


@dataclass
class ProofReport:
    verdict: str
    method: str
    system: str = ""
    obligations: list[Obligation] = field(default_factory=list)
    reasons: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    artifacts: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert self.verdict in VERDICTS, self.verdict
        assert self.method in METHODS, self.method

    @property
    def exit_code(self) -> int:
        return {"YES": 0, "NO": 1, "MAYBE": 2}[self.verdict]

    def obligation(self, name: str) -> Obligation:
        for o in self.obligations:
            if o.name == name:
                return o
        raise KeyError(name)


def _clean(s: str) -> str:
    return s.replace("\t", " ").replace("\n", " ")


def emit_report(report: ProofReport, fmt: str = "human") -> str:
    if fmt == "machine":
        lines = [f"verdict\t{report.verdict}", f"method\t{report.method}"]
        if report.system:
            lines.append(f"system\t{_clean(report.system)}")
        for o in report.obligations:
            lines.append(f"obligation\t{_clean(o.name)}\t{o.status}")
            lines.extend(f"evidence\t{_clean(o.name)}\t{_clean(e)}" for e in o.evidence)
        lines.extend(f"reason\t{_clean(r)}" for r in report.reasons)
        return "\n".join(lines) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown report format {fmt!r}")
    head = f"{report.verdict} ({report.method})"
    if report.system:
        head += f" for {report.system}"
    lines = [head]
    for o in report.obligations:
        lines.append(f"  [{o.status}] {o.name}")
        lines.extend(f"      {e}" for e in o.evidence)
    if report.reasons:
        lines.append("  reasons:")
        lines.extend(f"    - {r}" for r in report.reasons)
    return "\n".join(lines) + "\n"


def parse_machine_report(text: str) -> ProofReport:
    verdict = method = None
    system = ""
    obligations: list[Obligation] = []
    reasons: list[str] = []
    for line in text.splitlines():
        if not line:
            continue
        key, *vals = line.split("\t")
        if key == "verdict":
            verdict = vals[0]
        elif key == "method":
            method = vals[0]
        elif key == "system":
            system = vals[0]
        elif key == "obligation":
            obligations.append(Obligation(vals[0], vals[1]))
        elif key == "evidence":
            target = next((o for o in reversed(obligations) if o.name == vals[0]), None)
            if target is None:
                raise ValueError(f"evidence for unknown obligation {vals[0]!r}")
            target.evidence.append(vals[1])
        elif key == "reason":
            reasons.append(vals[0])
        else:
            raise ValueError(f"unknown record {key!r}")
    if verdict is None or method is None:
        raise ValueError("missing verdict or method record")
    return ProofReport(verdict, method, system, obligations, reasons)
