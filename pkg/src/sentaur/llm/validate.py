"""Gate for generated RTL: parse, lint, then behavioral trigger checks.

Accepted means: the source parses, lints clean, and (when a trigger
check is requested) the alert net fires under a condition-satisfying
stimulus, stays silent under a non-satisfying one, and never rises
during reset or right after reset release. Nothing that fails this gate
should reach the insertion or assessment pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sentaur.errors import SentaurError
from sentaur.forge.specs import TriggerSpec
from sentaur.forge.triggers import find_clock_reset
from sentaur.rtl.ast import mask
from sentaur.rtl.elaborate import elaborate
from sentaur.rtl.lint import lint_design
from sentaur.rtl.parser import parse_verilog
from sentaur.sim.engine import simulate
from sentaur.sim.stimulus import StimulusProgram
from sentaur.sim.trace import activation_cycles

_RESET_CYCLES = 2
_QUIET_CYCLES = 1000


@dataclass
class ValidationResult:
    parsed: bool
    lint_findings: list = field(default_factory=list)
    trigger_verified: bool | None = None
    fire_cycles: list[int] = field(default_factory=list)
    verdict: str = "rejected"
    reason: str = ""

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"

    @staticmethod
    def rejected(reason: str, **kw) -> "ValidationResult":
        return ValidationResult(verdict="rejected", reason=reason, **kw)


def _data_input(module, clock: str, reset: str, want_width: int | None):
    candidates = [
        p for p in module.ports
        if p.direction == "input" and p.name not in (clock, reset)
    ]
    if want_width is not None:
        sized = [p for p in candidates if p.width == want_width]
        if sized:
            return sized[0]
    return candidates[0] if candidates else None


def _avoid_value(values, width: int) -> int:
    taken = set(values)
    for v in range(min(1 << width, len(taken) + 2)):
        if v not in taken:
            return v
    return 0


def validate_generated(
    source: str,
    expected_trigger: TriggerSpec | None = None,
    alert_net: str = "Tj_Trig",
) -> ValidationResult:
    try:
        design = parse_verilog(source, source_name="<generated>")
    except SentaurError as exc:
        return ValidationResult.rejected(f"parse: {exc}", parsed=False)

    findings = lint_design(design)
    if findings:
        rules = ", ".join(sorted({f.rule for f in findings}))
        return ValidationResult.rejected(
            f"lint: {rules}", parsed=True, lint_findings=findings
        )
    if expected_trigger is None:
        return ValidationResult(
            parsed=True, verdict="accepted", reason="parse and lint clean"
        )

    module = design.modules[0]
    if module.port(alert_net) is None:
        return ValidationResult.rejected(
            f"alert net {alert_net!r} is not a port", parsed=True
        )
    try:
        clock, reset = find_clock_reset(module)
        elab = elaborate(design, module.name)
    except SentaurError as exc:
        return ValidationResult.rejected(f"elaborate: {exc}", parsed=True)

    t = expected_trigger
    width_wanted = None
    if t.kind in ("logic", "address", "state_sequence"):
        width_wanted = max(
            (v.bit_length() for v in (list(t.sequence) or [t.hi])), default=1
        )
    data = _data_input(module, clock, reset, width_wanted)

    def run(drives, cycles):
        stim = StimulusProgram(
            clock=clock,
            reset_net=reset,
            reset_cycles=_RESET_CYCLES,
            drives=tuple(drives),
        )
        trace = simulate(elab, stim, cycles)
        return activation_cycles(trace, alert_net)

    r = _RESET_CYCLES
    try:
        if t.kind == "state_sequence":
            if data is None:
                return ValidationResult.rejected("no data input found", parsed=True)
            w = data.width
            seq = [v & mask(w) for v in t.sequence]
            off = _avoid_value(seq, w)
            sat = [(r + i, data.name, v) for i, v in enumerate(seq)]
            sat.append((r + len(seq), data.name, off))
            fires = run(sat, r + len(seq) + 6)
            quiet = run([(0, data.name, off)], _QUIET_CYCLES)
        elif t.kind in ("logic", "address"):
            if data is None:
                return ValidationResult.rejected("no data input found", parsed=True)
            w = data.width
            off_candidates = [v for v in (0, t.hi + 1) if not (t.lo <= v <= t.hi)]
            off = (off_candidates or [0])[0] & mask(w)
            fires = run([(0, data.name, off), (r + 3, data.name, t.lo)], r + 10)
            quiet = run([(0, data.name, off)], _QUIET_CYCLES)
        elif t.kind == "input_count":
            if data is None:
                return ValidationResult.rejected("no event input found", parsed=True)
            fires = run([(0, data.name, 1)], r + t.threshold + 5)
            quiet = run([(0, data.name, 0)], _QUIET_CYCLES)
        else:  # time
            fires = run([], r + t.hi + 5)
            quiet = [c for c in fires if not (r + t.lo - 1 <= c <= r + t.hi + 1)]
    except SentaurError as exc:
        return ValidationResult.rejected(f"simulate: {exc}", parsed=True)

    if any(c < r for c in fires) or any(c < r for c in quiet):
        return ValidationResult.rejected(
            "persistence: alert rises during reset",
            parsed=True,
            trigger_verified=False,
            fire_cycles=fires,
        )
    if quiet:
        return ValidationResult.rejected(
            f"persistence: alert rises without the trigger condition "
            f"(cycles {quiet[:5]})",
            parsed=True,
            trigger_verified=False,
            fire_cycles=quiet,
        )
    if not fires:
        return ValidationResult.rejected(
            "correctness: alert never rises under a satisfying stimulus",
            parsed=True,
            trigger_verified=False,
        )
    return ValidationResult(
        parsed=True,
        trigger_verified=True,
        fire_cycles=fires,
        verdict="accepted",
        reason=f"alert fired at cycles {fires[:5]} and only under the condition",
    )
