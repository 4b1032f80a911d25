"""Payload circuit construction.

All effects gate off a 1-bit enable net E:

* dos        -- target output reads 0 while E is 1, the original value
                otherwise.
* perf_degrade -- deadband: target reads 0 during the first W cycles of
                every P-cycle window while enabled. The window phase
                counter starts on the first clock edge that observes E
                high and free-runs modulo P from there.
* info_leak  -- a new output port mirrors the source net while E is 1
                and reads 0 otherwise; the original output keeps its
                value.

The original driver of the target output is redirected onto a fresh
carrier net (see insert.retarget_driver); the fragments built here
reference that carrier.
"""

from __future__ import annotations

from sentaur.rtl.ast import (
    AlwaysBlock,
    Assign,
    Binary,
    Const,
    ContinuousAssign,
    Ident,
    IfStmt,
    NetDecl,
    PortDecl,
    RtlModule,
    Ternary,
)
from sentaur.forge.specs import PayloadSpec
from sentaur.forge.triggers import COUNTER_WIDTH, Fragments, check_collisions


def carrier_name(spec: PayloadSpec, prefix: str = "Tj") -> str:
    return f"{prefix.lower()}_orig_{spec.target_output}"


def make_payload(
    spec: PayloadSpec,
    enable_net: str,
    host: RtlModule,
    clock: str | None = None,
    reset: str | None = None,
    prefix: str = "Tj",
) -> Fragments:
    """Fragments delivering the effect, gated on `enable_net`.

    For dos/perf_degrade the returned fragments drive the target output
    and expect its original driver to be retargeted onto the carrier
    net. info_leak leaves the target alone and adds the leak port.
    """
    spec.validate_against(host)
    low = prefix.lower()
    frags = Fragments()
    target = host.port(spec.target_output)

    if spec.effect == "info_leak":
        width = host.decl_width(spec.leak_source)
        frags.ports.append(PortDecl(spec.leak_port, "output", "wire", width))
        frags.assigns.append(
            ContinuousAssign(
                Ident(spec.leak_port),
                Ternary(Ident(enable_net), Ident(spec.leak_source), Const(0, width)),
            )
        )
        frags.reads += [enable_net, spec.leak_source]
        check_collisions(host, frags.added_names())
        return frags

    carrier = carrier_name(spec, prefix)
    frags.nets.append(NetDecl(carrier, "wire", target.width))

    if spec.effect == "dos":
        gate = Ident(enable_net)
    else:  # perf_degrade
        if clock is None or reset is None:
            from sentaur.forge.triggers import find_clock_reset

            clock, reset = find_clock_reset(host)
        window = f"{low}_window"
        frags.nets.append(NetDecl(window, "reg", COUNTER_WIDTH))
        # counts 1..P once enabled was seen at an edge; 0 = not yet anchored
        advance = Assign(
            Ident(window),
            Ternary(
                Binary("==", Ident(window), Const(spec.period, COUNTER_WIDTH)),
                Const(1, COUNTER_WIDTH),
                Binary("+", Ident(window), Const(1, COUNTER_WIDTH)),
            ),
            blocking=False,
        )
        frags.processes.append(
            AlwaysBlock(
                "clocked",
                (
                    IfStmt(
                        cond=Ident(reset),
                        then_body=(
                            Assign(Ident(window), Const(0, COUNTER_WIDTH), blocking=False),
                        ),
                        else_body=(
                            IfStmt(
                                cond=Binary(
                                    "||",
                                    Binary(
                                        "!=", Ident(window), Const(0, COUNTER_WIDTH)
                                    ),
                                    Ident(enable_net),
                                ),
                                then_body=(advance,),
                            ),
                        ),
                    ),
                ),
                clock=clock,
            )
        )
        gate = Binary(
            "&&",
            Ident(enable_net),
            Binary(
                "&&",
                Binary(">=", Ident(window), Const(1, COUNTER_WIDTH)),
                Binary("<=", Ident(window), Const(spec.window, COUNTER_WIDTH)),
            ),
        )
        frags.reads += [clock, reset]

    frags.assigns.append(
        ContinuousAssign(
            Ident(spec.target_output),
            Ternary(gate, Const(0, target.width), Ident(carrier)),
        )
    )
    if enable_net not in frags.reads:
        frags.reads.append(enable_net)
    check_collisions(host, frags.added_names())
    return frags
