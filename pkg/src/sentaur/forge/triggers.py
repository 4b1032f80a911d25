"""Trigger circuit construction.

Each trigger class yields lint-clean RTL fragments (nets, localparams,
assigns, processes) plus the name of a 1-bit trigger net that is high
exactly when the class predicate holds:

* time        -- lo <= free-running post-reset cycle count <= hi
* logic       -- lo <= watch_net <= hi
* address     -- lo <= addr_net <= hi
* state_sequence -- FSM (registered state, synchronous reset, default
                  arm present) sits in its TRIGGER state, one cycle
                  after the last value of the sequence matched
* input_count -- cycles with event_net high since reset >= threshold

Counters are 32 bits wide, which no feasible simulation horizon wraps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sentaur.errors import HostUnsupported, NameCollision
from sentaur.rtl.ast import (
    AlwaysBlock,
    Assign,
    Binary,
    CaseArm,
    CaseStmt,
    Const,
    ContinuousAssign,
    Ident,
    IfStmt,
    LocalParam,
    NetDecl,
    PortDecl,
    RtlModule,
    Ternary,
)
from sentaur.forge.specs import TriggerSpec

COUNTER_WIDTH = 32


@dataclass
class Fragments:
    ports: list[PortDecl] = field(default_factory=list)
    nets: list[NetDecl] = field(default_factory=list)
    params: list[LocalParam] = field(default_factory=list)
    assigns: list[ContinuousAssign] = field(default_factory=list)
    processes: list[AlwaysBlock] = field(default_factory=list)
    reads: list[str] = field(default_factory=list)

    def extend(self, other: "Fragments") -> None:
        self.ports.extend(other.ports)
        self.nets.extend(other.nets)
        self.params.extend(other.params)
        self.assigns.extend(other.assigns)
        self.processes.extend(other.processes)
        self.reads.extend(n for n in other.reads if n not in self.reads)

    def added_names(self) -> list[str]:
        names = [p.name for p in self.ports]
        names += [n.name for n in self.nets]
        for group in self.params:
            names += [name for name, _ in group.items]
        return names


def find_clock_reset(host: RtlModule) -> tuple[str, str]:
    """Host clock and synchronous reset nets.

    The clock comes from the host's clocked processes; the reset from
    the `if (<net>) ... else ...` idiom at the top of one of them.
    Falls back to ports named clk/rst.
    """
    clock = None
    reset = None
    for proc in host.processes:
        if proc.kind != "clocked":
            continue
        if clock is None:
            clock = proc.clock
        body = proc.body
        if (
            reset is None
            and len(body) == 1
            and isinstance(body[0], IfStmt)
            and isinstance(body[0].cond, Ident)
            and body[0].else_body is not None
        ):
            reset = body[0].cond.name
    if clock is None and host.port("clk") is not None:
        clock = "clk"
    if reset is None and host.port("rst") is not None:
        reset = "rst"
    if clock is None or reset is None:
        raise HostUnsupported(
            f"module {host.name!r} has no recognizable clock/reset "
            "(need a clocked process with a synchronous reset, or clk/rst ports)"
        )
    return clock, reset


def check_collisions(host: RtlModule, names) -> None:
    declared = host.declared_names()
    for name in names:
        if name in declared:
            raise NameCollision(
                f"{name!r} already exists in {host.name!r}; pick another prefix"
            )


def _counter_process(counter: str, clock: str, reset: str, step) -> AlwaysBlock:
    body = (
        IfStmt(
            cond=Ident(reset),
            then_body=(Assign(Ident(counter), Const(0, COUNTER_WIDTH), blocking=False),),
            else_body=(
                Assign(
                    Ident(counter),
                    Binary("+", Ident(counter), step),
                    blocking=False,
                ),
            ),
        ),
    )
    return AlwaysBlock("clocked", body, clock=clock)


def _in_range(net: str, lo: int, hi: int, width: int):
    return Binary(
        "&&",
        Binary(">=", Ident(net), Const(lo, width)),
        Binary("<=", Ident(net), Const(hi, width)),
    )


def make_trigger(
    spec: TriggerSpec,
    host: RtlModule,
    clock: str | None = None,
    reset: str | None = None,
    prefix: str = "Tj",
) -> tuple[Fragments, str]:
    """Build the trigger fragments for `host`; returns (fragments,
    trigger net name). The fragments are not yet woven in."""
    spec.validate_against(host)
    needs_clock = spec.kind in ("time", "input_count", "state_sequence")
    if needs_clock and (clock is None or reset is None):
        clock, reset = find_clock_reset(host)

    low = prefix.lower()
    trig = f"{prefix}_Trig"
    frags = Fragments()
    frags.nets.append(NetDecl(trig, "wire", 1))

    if spec.kind == "time":
        counter = f"{low}_count"
        frags.nets.append(NetDecl(counter, "reg", COUNTER_WIDTH))
        frags.processes.append(
            _counter_process(counter, clock, reset, Const(1, COUNTER_WIDTH))
        )
        frags.assigns.append(
            ContinuousAssign(
                Ident(trig), _in_range(counter, spec.lo, spec.hi, COUNTER_WIDTH)
            )
        )
        frags.reads += [clock, reset]
    elif spec.kind in ("logic", "address"):
        width = host.decl_width(spec.watch_net)
        frags.assigns.append(
            ContinuousAssign(
                Ident(trig), _in_range(spec.watch_net, spec.lo, spec.hi, width)
            )
        )
        frags.reads.append(spec.watch_net)
    elif spec.kind == "input_count":
        counter = f"{low}_count"
        frags.nets.append(NetDecl(counter, "reg", COUNTER_WIDTH))
        step = Ternary(
            Ident(spec.event_net), Const(1, COUNTER_WIDTH), Const(0, COUNTER_WIDTH)
        )
        frags.processes.append(_counter_process(counter, clock, reset, step))
        frags.assigns.append(
            ContinuousAssign(
                Ident(trig),
                Binary(">=", Ident(counter), Const(spec.threshold, COUNTER_WIDTH)),
            )
        )
        frags.reads += [clock, reset, spec.event_net]
    else:  # state_sequence
        _sequence_fsm(spec, host, clock, reset, prefix, frags, trig)
        frags.reads += [clock, reset, spec.watch_net]

    check_collisions(host, frags.added_names())
    return frags, trig


def _sequence_fsm(
    spec: TriggerSpec,
    host: RtlModule,
    clock: str,
    reset: str,
    prefix: str,
    frags: Fragments,
    trig: str,
) -> None:
    low = prefix.lower()
    n = len(spec.sequence)
    state_count = n + 2  # IDLE, SEQ1..SEQn, TRIGGER
    state_width = max(1, (state_count - 1).bit_length())
    watch_width = host.decl_width(spec.watch_net)

    upper = prefix.upper()
    state_names = (
        [f"{upper}_IDLE"]
        + [f"{upper}_SEQ{i + 1}" for i in range(n)]
        + [f"{upper}_TRIGGER"]
    )
    frags.params.append(
        LocalParam(
            state_width,
            tuple(
                (name, Const(i, state_width)) for i, name in enumerate(state_names)
            ),
        )
    )
    cur = f"{low}_state"
    nxt = f"{low}_state_next"
    frags.nets.append(NetDecl(cur, "reg", state_width))
    frags.nets.append(NetDecl(nxt, "reg", state_width))

    idle = Ident(state_names[0])
    trigger_state = Ident(state_names[-1])
    arms = []
    for i in range(n):
        # in state i, a match on sequence[i] advances; anything else restarts
        arms.append(
            CaseArm(
                labels=(Ident(state_names[i]),),
                body=(
                    IfStmt(
                        cond=Binary(
                            "==",
                            Ident(spec.watch_net),
                            Const(spec.sequence[i], watch_width),
                        ),
                        then_body=(
                            Assign(Ident(nxt), Ident(state_names[i + 1]), blocking=True),
                        ),
                        else_body=(Assign(Ident(nxt), idle, blocking=True),),
                    ),
                ),
            )
        )
    arms.append(
        CaseArm(
            labels=(Ident(state_names[n]),),
            body=(Assign(Ident(nxt), trigger_state, blocking=True),),
        )
    )
    arms.append(
        CaseArm(
            labels=(trigger_state,),
            body=(Assign(Ident(nxt), idle, blocking=True),),
        )
    )
    comb = AlwaysBlock(
        "comb",
        (
            CaseStmt(
                scrutinee=Ident(cur),
                arms=tuple(arms),
                default_body=(Assign(Ident(nxt), idle, blocking=True),),
            ),
        ),
    )
    clocked = AlwaysBlock(
        "clocked",
        (
            IfStmt(
                cond=Ident(reset),
                then_body=(Assign(Ident(cur), idle, blocking=False),),
                else_body=(Assign(Ident(cur), Ident(nxt), blocking=False),),
            ),
        ),
        clock=clock,
    )
    frags.processes += [comb, clocked]
    frags.assigns.append(
        ContinuousAssign(Ident(trig), Binary("==", Ident(cur), trigger_state))
    )
