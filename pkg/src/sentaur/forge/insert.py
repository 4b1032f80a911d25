"""Weave trigger and payload fragments into a host module.

Enable semantics: level-class triggers (time, logic, address,
input_count) drive the enable net combinationally from the trigger
predicate; the pulse-class trigger (state_sequence) latches a sticky
register that holds until reset, OR-ed with the live pulse so the
payload is enabled from the pulse cycle onward.

The returned design is re-emitted and re-parsed before being handed
back, which both proves it parses and gives every construct a source
span for the manifest.
"""

from __future__ import annotations

from dataclasses import asdict, replace

from sentaur.errors import HostUnsupported, SentaurError
from sentaur.rtl.ast import (
    AlwaysBlock,
    Assign,
    Binary,
    Const,
    ContinuousAssign,
    Ident,
    IfStmt,
    ModuleInst,
    NetDecl,
    RtlDesign,
    RtlModule,
    lvalue_base,
    rename_in_stmt,
    walk_stmts,
)
from sentaur.rtl.emit import emit_verilog
from sentaur.rtl.parser import parse_verilog
from sentaur.forge.payloads import carrier_name, make_payload
from sentaur.forge.specs import PayloadSpec, TriggerSpec, TrojanManifest
from sentaur.forge.triggers import Fragments, find_clock_reset, make_trigger


def retarget_driver(
    module: RtlModule, target: str, fresh: str
) -> tuple[RtlModule, str]:
    """Redirect whatever drives `target` so it drives `fresh` instead.

    Handles continuous assigns, process-driven regs (the process is
    alpha-renamed, so self-reads follow), and instance output
    connections. Returns the rewritten module and the required net kind
    for `fresh` ("wire" or "reg"). A target with no driver needs no
    rewrite; the fresh net ties to 0 at elaboration.
    """
    mapping = {target: fresh}

    new_assigns = []
    hit = None
    for a in module.assigns:
        if lvalue_base(a.lhs) == target:
            hit = replace(a, lhs=Ident(fresh))
            new_assigns.append(hit)
        else:
            new_assigns.append(a)
    if hit is not None:
        order = tuple(
            hit if (isinstance(it, ContinuousAssign) and lvalue_base(it.lhs) == target) else it
            for it in module.ordered_items()
        )
        return (
            replace(module, assigns=tuple(new_assigns), item_order=order),
            "wire",
        )

    for proc in module.processes:
        assigned = {
            lvalue_base(s.lhs) for s in walk_stmts(proc.body) if isinstance(s, Assign)
        }
        if target in assigned:
            new_proc = replace(
                proc, body=tuple(rename_in_stmt(s, mapping) for s in proc.body)
            )
            processes = tuple(new_proc if p is proc else p for p in module.processes)
            order = tuple(new_proc if it is proc else it for it in module.ordered_items())
            return replace(module, processes=processes, item_order=order), "reg"

    for inst in module.instances:
        for port, expr in inst.conns:
            if isinstance(expr, Ident) and expr.name == target:
                new_conns = tuple(
                    (p, Ident(fresh) if (p == port) else e) for p, e in inst.conns
                )
                new_inst = replace(inst, conns=new_conns)
                instances = tuple(new_inst if i is inst else i for i in module.instances)
                order = tuple(
                    new_inst if it is inst else it for it in module.ordered_items()
                )
                return (
                    replace(module, instances=instances, item_order=order),
                    "wire",
                )

    return module, "wire"


def _tie_new_port_in_parents(design: RtlDesign, module_name: str, port_name: str,
                             direction: str) -> RtlDesign:
    """Give every instantiation of the module an explicit entry for a
    newly added port: inputs tied to 0, outputs left open."""
    for mod in design.modules:
        changed = False
        new_instances = []
        for inst in mod.instances:
            if inst.module_name == module_name and all(
                p != port_name for p, _ in inst.conns
            ):
                tie = Const(0, 1) if direction == "input" else None
                new_instances.append(
                    replace(inst, conns=inst.conns + ((port_name, tie),))
                )
                changed = True
            else:
                new_instances.append(inst)
        if changed:
            rebuilt = []
            by_old = dict(zip(mod.instances, new_instances))
            for item in mod.ordered_items():
                rebuilt.append(by_old.get(item, item) if isinstance(item, ModuleInst) else item)
            design = design.replace_module(
                replace(mod, instances=tuple(new_instances), item_order=tuple(rebuilt))
            )
    return design


def insert_trojan(
    design: RtlDesign,
    module: str,
    trigger: TriggerSpec,
    payload: PayloadSpec,
    prefix: str = "Tj",
) -> tuple[RtlDesign, TrojanManifest]:
    """Insert the trigger+payload pair into `module` of `design`.

    Returns the infected design (re-parsed, so spans are real) and a
    manifest recording exactly what changed.
    """
    host = design.module(module)
    if host is None:
        raise HostUnsupported(f"module {module!r} not found in design")
    try:
        clock, reset = find_clock_reset(host)
    except SentaurError:
        if trigger.kind in ("logic", "address") and payload.effect != "perf_degrade":
            clock = reset = None  # purely combinational insertion
        else:
            raise

    trigger.validate_against(host)
    payload.validate_against(host)

    frags = Fragments()
    trig_frags, trig_net = make_trigger(trigger, host, clock, reset, prefix)
    frags.extend(trig_frags)

    enable = f"{prefix}_En"
    frags.nets.append(NetDecl(enable, "wire", 1))
    if trigger.sticky:
        fired = f"{prefix.lower()}_fired"
        frags.nets.append(NetDecl(fired, "reg", 1))
        frags.processes.append(
            AlwaysBlock(
                "clocked",
                (
                    IfStmt(
                        cond=Ident(reset),
                        then_body=(Assign(Ident(fired), Const(0, 1), blocking=False),),
                        else_body=(
                            Assign(
                                Ident(fired),
                                Binary("|", Ident(fired), Ident(trig_net)),
                                blocking=False,
                            ),
                        ),
                    ),
                ),
                clock=clock,
            )
        )
        frags.assigns.append(
            ContinuousAssign(Ident(enable), Binary("|", Ident(fired), Ident(trig_net)))
        )
    else:
        frags.assigns.append(ContinuousAssign(Ident(enable), Ident(trig_net)))

    pay_frags = make_payload(payload, enable, host, clock, reset, prefix)
    frags.extend(pay_frags)

    modified_nets: list[str] = []
    infected = host
    if payload.effect in ("dos", "perf_degrade"):
        infected, kind = retarget_driver(host, payload.target_output, carrier_name(payload, prefix))
        frags.nets = [
            replace(n, kind=kind) if n.name == carrier_name(payload, prefix) else n
            for n in frags.nets
        ]
        if kind == "reg":
            # the target was process-driven; it is now driven by the
            # payload's continuous assign, so the port kind flips
            infected = replace(
                infected,
                ports=tuple(
                    replace(p, kind="wire") if p.name == payload.target_output else p
                    for p in infected.ports
                ),
            )
        modified_nets.append(payload.target_output)

    new_items = (
        tuple(frags.nets) + tuple(frags.params) + tuple(frags.assigns) + tuple(frags.processes)
    )
    infected = replace(
        infected,
        ports=infected.ports + tuple(frags.ports),
        nets=infected.nets + tuple(frags.nets),
        params=infected.params + tuple(frags.params),
        assigns=infected.assigns + tuple(frags.assigns),
        processes=infected.processes + tuple(frags.processes),
        item_order=infected.ordered_items() + new_items,
    )

    out = design.replace_module(infected)
    for port in frags.ports:
        out = _tie_new_port_in_parents(out, module, port.name, port.direction)

    # round-trip so the result provably parses and carries spans
    out = parse_verilog(emit_verilog(out), source_name=design.source_name)
    final = out.module(module)
    added_count = len(frags.processes)
    spans = [
        {"line_start": p.span.line_start, "line_end": p.span.line_end}
        for p in final.processes[len(final.processes) - added_count :]
    ]

    manifest = TrojanManifest(
        host_module=module,
        trigger_kind=trigger.kind,
        effect=payload.effect,
        trigger_net=trig_net,
        enable_net=enable,
        enable_kind="sticky" if trigger.sticky else "level",
        enable_edge_delayed=trigger.edge_delayed,
        trigger_spec=asdict(trigger),
        payload_spec=asdict(payload),
        added_ports=[
            {"name": p.name, "direction": p.direction, "width": p.width}
            for p in frags.ports
        ],
        added_nets=[{"name": n.name, "kind": n.kind, "width": n.width} for n in frags.nets],
        added_params=[name for g in frags.params for name, _ in g.items],
        added_assigns=len(frags.assigns),
        added_processes=added_count,
        added_process_spans=spans,
        read_nets=sorted(set(frags.reads)),
        modified_nets=modified_nets,
        retarget_net=carrier_name(payload, prefix) if modified_nets else "",
    )
    return out, manifest
