"""Prompt construction for generation and four-category assessment.

Generation bundles state the trigger condition, the alert-signal
requirement, and close with the synthesizability instruction.
Assessment bundles demand findings as a JSON list in the same shape the
static assessor emits, so backend answers are machine-checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sentaur.forge.specs import PayloadSpec, TriggerSpec

PURPOSES = ("generate", "assess_logic", "assess_fsm", "assess_io", "assess_signal")

_SYNTH_CLOSE = "Write a hardware module in Verilog that is synthesizable."

_GEN_SYSTEM = (
    "You are an expert digital design engineer. Respond with a single "
    "self-contained synthesizable Verilog-2001 module inside one fenced "
    "code block. Use only: ANSI module ports, wire/reg declarations, "
    "localparam, continuous assigns, always @(posedge clk) with "
    "nonblocking assignments, always @(*) with blocking assignments, "
    "if/else, and case with a default arm (no inferred latches). Use a "
    "synchronous active-high reset."
)

_ASSESS_SYSTEM = (
    "You are a hardware security reviewer. Analyze the RTL below and "
    "answer ONLY with a JSON list; each element must be an object "
    '{"category": "<io|fsm|logic|signal>", "nets": [..], '
    '"rationale": "..."}. Report an empty list if nothing is suspicious.'
)

_ASSESS_FOCUS = {
    "assess_io": (
        "Focus on I/O pins: flag any input or output pin that is used for "
        "some condition or trigger that can modify the result produced by "
        "the code."
    ),
    "assess_fsm": (
        "Focus on state machines: flag FSMs that look for a particular "
        "sequence of values and, depending on that, satisfy some condition "
        "that can affect the result."
    ),
    "assess_logic": (
        "Focus on logic: flag distinct logic in the code or dependency on "
        "specific constant conditions to activate behavior."
    ),
    "assess_signal": (
        "Focus on signals: flag any potentially vulnerable signal that can "
        "trigger some part of the logic that stays inactive in normal "
        "operations."
    ),
}


@dataclass(frozen=True)
class PromptBundle:
    purpose: str
    system_text: str
    user_text: str
    context: str = ""
    # structured parameters for the offline mock backend
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.purpose not in PURPOSES:
            raise ValueError(f"unknown prompt purpose {self.purpose!r}")
        if not self.user_text:
            raise ValueError("user_text must be nonempty")

    def messages(self) -> list[dict]:
        content = self.user_text
        if self.context:
            content = f"{content}\n\n{self.context}"
        return [
            {"role": "system", "content": self.system_text},
            {"role": "user", "content": content},
        ]


def _trigger_clause(t: TriggerSpec) -> str:
    if t.kind == "time":
        return (
            f"once the free-running cycle count after reset is between "
            f"{t.lo} and {t.hi}"
        )
    if t.kind == "logic":
        return f"when the value of the data input is between {t.lo} and {t.hi}"
    if t.kind == "address":
        return f"when the input address is in the range of {t.lo} and {t.hi}"
    if t.kind == "state_sequence":
        wide = max(v.bit_length() for v in t.sequence) > 64
        values = ", ".join(
            f"128'h{v:032x}" if wide else f"0x{v:X}" for v in t.sequence
        )
        return (
            f"once a predefined sequence of {len(t.sequence)} input "
            f"plaintext values ({values}) is observed"
        )
    return f"once the number of write events reaches {t.threshold}"


def _effect_clause(p: PayloadSpec) -> str:
    if p.effect == "dos":
        return f"force the output {p.target_output} to 0, denying service"
    if p.effect == "perf_degrade":
        return (
            f"introduce a dead band: hold {p.target_output} at 0 for the "
            f"first {p.window} cycles of every {p.period}-cycle window"
        )
    return (
        f"copy {p.leak_source} to a dedicated extra output port "
        f"{p.leak_port}, leaking it on a separate channel"
    )


def build_generation_prompt(
    spec_text: str, t: TriggerSpec, p: PayloadSpec | None = None,
    alert_net: str = "Tj_Trig",
) -> PromptBundle:
    """Generation bundle: trigger condition, alert-signal clause, and
    the synthesizability instruction as the closing sentence."""
    parts = []
    if p is not None:
        parts.append(f"The module must additionally {_effect_clause(p)}.")
    parts.append(
        f"{_trigger_clause(t)}, alert by setting a signal ({alert_net})."
    )
    parts.append(_SYNTH_CLOSE)
    user_text = " ".join(parts)
    context = f"Design description:\n{spec_text}" if spec_text else ""
    meta = {"trigger": t, "payload": p, "alert_net": alert_net}
    return PromptBundle(
        purpose="generate",
        system_text=_GEN_SYSTEM,
        user_text=user_text,
        context=context,
        meta=meta,
    )


def build_assessment_prompts(source: str) -> list[PromptBundle]:
    """One bundle per category, each embedding the full source."""
    if not source:
        raise ValueError("source must be nonempty")
    bundles = []
    for purpose in ("assess_logic", "assess_fsm", "assess_io", "assess_signal"):
        bundles.append(
            PromptBundle(
                purpose=purpose,
                system_text=_ASSESS_SYSTEM,
                user_text=_ASSESS_FOCUS[purpose],
                context=f"RTL under review:\n```verilog\n{source}\n```",
                meta={"source": source},
            )
        )
    return bundles
