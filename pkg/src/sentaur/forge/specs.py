"""Trigger and payload descriptions, and the insertion manifest.

Trigger classes:

* time -- free-running cycle counter since reset release; active while
  lo <= count <= hi.
* logic -- watched data net's value in [lo, hi].
* address -- watched address net's value in [lo, hi].
* state_sequence -- an FSM walks IDLE -> SEQ1 -> ... -> TRIGGER when the
  watched net matches the configured values on consecutive cycles;
  one-cycle pulse in TRIGGER.
* input_count -- count of cycles with a 1-bit event net high since
  reset; active once the count reaches the threshold.

Payload effects:

* dos -- target output forced to 0 while enabled.
* perf_degrade -- target output forced to 0 for the first W cycles of
  every P-cycle window while enabled (deadband).
* info_leak -- a new output port mirrors a source net while enabled and
  reads 0 otherwise; the original output is untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from sentaur.errors import InvalidSpec, UnknownNet, WidthMismatch
from sentaur.rtl.ast import RtlModule

TRIGGER_KINDS = ("time", "logic", "address", "state_sequence", "input_count")
EFFECTS = ("dos", "perf_degrade", "info_leak")

# Pulse-class triggers latch a sticky enable; level-class triggers drive
# the enable combinationally from the predicate.
STICKY_KINDS = ("state_sequence",)

# For these classes the predicate depends on registered state, so
# clocked logic (the deadband window counter) observes the enable one
# cycle after it appears in sampled traces.
EDGE_DELAYED_KINDS = ("time", "input_count", "state_sequence")


@dataclass(frozen=True)
class TriggerSpec:
    kind: str
    lo: int = 0
    hi: int = 0
    watch_net: str = ""
    sequence: tuple[int, ...] = ()
    event_net: str = ""
    threshold: int = 0

    def __post_init__(self):
        if self.kind not in TRIGGER_KINDS:
            raise InvalidSpec(f"unknown trigger class {self.kind!r}")
        if self.kind in ("time", "logic", "address") and self.lo > self.hi:
            raise InvalidSpec("trigger range requires lo <= hi")
        if self.kind == "state_sequence" and not self.sequence:
            raise InvalidSpec("state_sequence requires a nonempty value sequence")
        if self.kind == "input_count" and self.threshold < 1:
            raise InvalidSpec("input_count threshold must be >= 1")

    @property
    def sticky(self) -> bool:
        return self.kind in STICKY_KINDS

    @property
    def edge_delayed(self) -> bool:
        return self.kind in EDGE_DELAYED_KINDS

    def validate_against(self, host: RtlModule) -> None:
        if self.kind in ("logic", "address", "state_sequence"):
            width = host.decl_width(self.watch_net)
            if width is None:
                raise UnknownNet(
                    f"watched net {self.watch_net!r} not declared in {host.name!r}"
                )
            limit = 1 << width
            if self.kind == "state_sequence":
                bad = [v for v in self.sequence if v >= limit]
            else:
                bad = [v for v in (self.lo, self.hi) if v >= limit]
            if bad:
                raise WidthMismatch(
                    f"constants {bad} do not fit the {width}-bit net "
                    f"{self.watch_net!r}"
                )
        if self.kind == "input_count":
            width = host.decl_width(self.event_net)
            if width is None:
                raise UnknownNet(
                    f"event net {self.event_net!r} not declared in {host.name!r}"
                )
            if width != 1:
                raise WidthMismatch(
                    f"event net {self.event_net!r} must be 1 bit wide, is {width}"
                )

    def describe(self) -> str:
        """One-line condition description used in prompts and reports."""
        if self.kind == "time":
            return f"the cycle count since reset is between {self.lo} and {self.hi}"
        if self.kind == "logic":
            return (
                f"the value of {self.watch_net} is between {self.lo} and {self.hi}"
            )
        if self.kind == "address":
            return (
                f"the address {self.watch_net} is in the range of "
                f"{self.lo} and {self.hi}"
            )
        if self.kind == "state_sequence":
            values = ", ".join(f"0x{v:X}" for v in self.sequence)
            return f"{self.watch_net} takes the sequence {values} on consecutive cycles"
        return f"the number of events on {self.event_net} reaches {self.threshold}"


@dataclass(frozen=True)
class PayloadSpec:
    effect: str
    target_output: str = ""
    period: int = 16
    window: int = 4
    leak_source: str = ""
    leak_port: str = "leak_chan"

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise InvalidSpec(f"unknown effect {self.effect!r}")
        if self.effect == "perf_degrade" and not (0 < self.window < self.period):
            raise InvalidSpec("perf_degrade requires 0 < W < P")
        if self.effect == "info_leak" and not self.leak_source:
            raise InvalidSpec("info_leak requires a source net")

    def validate_against(self, host: RtlModule) -> None:
        from sentaur.errors import TargetNotOutput, LeakPortNameCollision

        port = host.port(self.target_output)
        if port is None or port.direction != "output":
            raise TargetNotOutput(
                f"{self.target_output!r} is not an output of {host.name!r}"
            )
        if self.effect == "info_leak":
            if host.decl_width(self.leak_source) is None:
                raise UnknownNet(
                    f"leak source {self.leak_source!r} not declared in {host.name!r}"
                )
            if self.leak_port in host.declared_names():
                raise LeakPortNameCollision(
                    f"{self.leak_port!r} already exists in {host.name!r}"
                )


@dataclass
class TrojanManifest:
    """Exact record of what insertion changed; ground truth for tests
    and assessment evaluation."""

    host_module: str
    trigger_kind: str
    effect: str
    trigger_net: str
    enable_net: str
    enable_kind: str  # "level" | "sticky"
    enable_edge_delayed: bool
    trigger_spec: dict
    payload_spec: dict
    added_ports: list[dict] = field(default_factory=list)
    added_nets: list[dict] = field(default_factory=list)
    added_params: list[str] = field(default_factory=list)
    added_assigns: int = 0
    added_processes: int = 0
    added_process_spans: list[dict] = field(default_factory=list)
    read_nets: list[str] = field(default_factory=list)
    modified_nets: list[str] = field(default_factory=list)
    retarget_net: str = ""

    def added_names(self) -> set[str]:
        names = {p["name"] for p in self.added_ports}
        names |= {n["name"] for n in self.added_nets}
        names |= set(self.added_params)
        names.add(self.trigger_net)
        names.add(self.enable_net)
        if self.retarget_net:
            names.add(self.retarget_net)
        return names

    def touched_names(self) -> set[str]:
        return self.added_names() | set(self.read_nets) | set(self.modified_nets)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "TrojanManifest":
        return TrojanManifest(**json.loads(text))


def _int_arg(text: str) -> int:
    text = text.strip().lower()
    if text.startswith("0x"):
        return int(text, 16)
    return int(text, 10)


def parse_trigger_arg(arg: str) -> TriggerSpec:
    """CLI syntax: time:50:200 | logic:<net>:1000:2000 |
    addr:<net>:2000:3000 | seq:<net>:0x55,0xAA,0xFF | count:<net>:1000"""
    parts = arg.split(":")
    kind = parts[0]
    try:
        if kind == "time" and len(parts) == 3:
            return TriggerSpec("time", lo=_int_arg(parts[1]), hi=_int_arg(parts[2]))
        if kind == "logic" and len(parts) == 4:
            return TriggerSpec(
                "logic", watch_net=parts[1], lo=_int_arg(parts[2]), hi=_int_arg(parts[3])
            )
        if kind == "addr" and len(parts) == 4:
            return TriggerSpec(
                "address",
                watch_net=parts[1],
                lo=_int_arg(parts[2]),
                hi=_int_arg(parts[3]),
            )
        if kind == "seq" and len(parts) == 3:
            values = tuple(_int_arg(v) for v in parts[2].split(","))
            return TriggerSpec("state_sequence", watch_net=parts[1], sequence=values)
        if kind == "count" and len(parts) == 3:
            return TriggerSpec(
                "input_count", event_net=parts[1], threshold=_int_arg(parts[2])
            )
    except ValueError as exc:
        raise InvalidSpec(f"bad trigger syntax {arg!r}: {exc}") from exc
    raise InvalidSpec(
        f"bad trigger syntax {arg!r}; expected time:lo:hi, logic:net:lo:hi, "
        "addr:net:lo:hi, seq:net:v1,v2,..., or count:net:threshold"
    )


def parse_effect_arg(arg: str, target_output: str = "") -> PayloadSpec:
    """CLI syntax: dos | perf[:P:W] | leak:<src>[:port]"""
    parts = arg.split(":")
    kind = parts[0]
    try:
        if kind == "dos" and len(parts) == 1:
            return PayloadSpec("dos", target_output=target_output)
        if kind == "perf":
            if len(parts) == 1:
                return PayloadSpec("perf_degrade", target_output=target_output)
            if len(parts) == 3:
                return PayloadSpec(
                    "perf_degrade",
                    target_output=target_output,
                    period=_int_arg(parts[1]),
                    window=_int_arg(parts[2]),
                )
        if kind == "leak" and len(parts) in (2, 3):
            port = parts[2] if len(parts) == 3 else "leak_chan"
            return PayloadSpec(
                "info_leak",
                target_output=target_output,
                leak_source=parts[1],
                leak_port=port,
            )
    except ValueError as exc:
        raise InvalidSpec(f"bad effect syntax {arg!r}: {exc}") from exc
    raise InvalidSpec(
        f"bad effect syntax {arg!r}; expected dos, perf[:P:W], or leak:src[:port]"
    )
