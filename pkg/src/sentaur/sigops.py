"""Signal surgery: add, join, route, and rename signals and modules.

Every public operation is a pure transform returning a new design, and
records itself as a SignalEdit. Replaying a recorded edit list on the
original design reproduces the edited design byte-for-byte, which makes
surgery scriptable (see apply_edits / edits_from_json).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from sentaur.errors import (
    InvalidSpec,
    NameCollision,
    NoPath,
    UnknownModule,
    UnknownNet,
    WidthMismatch,
)
from sentaur.rtl.ast import (
    Assign,
    Binary,
    Const,
    ContinuousAssign,
    Ident,
    ModuleInst,
    NetDecl,
    PortDecl,
    RAM_PRIMITIVE,
    RtlDesign,
    RtlModule,
    rename_in_expr,
    rename_in_stmt,
)


@dataclass(frozen=True)
class SignalEdit:
    kind: str  # add_port | add_net | join | route | rename_module
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _require_module(design: RtlDesign, name: str) -> RtlModule:
    mod = design.module(name)
    if mod is None:
        raise UnknownModule(f"module {name!r} not found")
    return mod


def _valid_identifier(name: str) -> None:
    if not name or not (name[0].isalpha() or name[0] == "_"):
        raise InvalidSpec(f"invalid identifier {name!r}")
    if not all(c.isalnum() or c == "_" for c in name):
        raise InvalidSpec(f"invalid identifier {name!r}")


def _rename_reads_in_module(module: RtlModule, mapping: dict[str, str]) -> RtlModule:
    """Rewrite reads only; assignment targets keep their names."""
    from sentaur.rtl.ast import BitSelect, CaseStmt, IfStmt

    def fix_stmt(stmt):
        if isinstance(stmt, Assign):
            lhs = stmt.lhs
            if isinstance(lhs, BitSelect):
                lhs = replace(lhs, index=rename_in_expr(lhs.index, mapping))
            return replace(stmt, lhs=lhs, rhs=rename_in_expr(stmt.rhs, mapping))
        if isinstance(stmt, IfStmt):
            return replace(
                stmt,
                cond=rename_in_expr(stmt.cond, mapping),
                then_body=tuple(fix_stmt(s) for s in stmt.then_body),
                else_body=None
                if stmt.else_body is None
                else tuple(fix_stmt(s) for s in stmt.else_body),
            )
        if isinstance(stmt, CaseStmt):
            return replace(
                stmt,
                scrutinee=rename_in_expr(stmt.scrutinee, mapping),
                arms=tuple(
                    replace(
                        arm,
                        labels=tuple(rename_in_expr(l, mapping) for l in arm.labels),
                        body=tuple(fix_stmt(s) for s in arm.body),
                    )
                    for arm in stmt.arms
                ),
                default_body=None
                if stmt.default_body is None
                else tuple(fix_stmt(s) for s in stmt.default_body),
            )
        raise TypeError(f"not a statement: {stmt!r}")

    new_assigns = tuple(
        replace(a, rhs=rename_in_expr(a.rhs, mapping)) for a in module.assigns
    )
    new_processes = tuple(
        replace(p, body=tuple(fix_stmt(s) for s in p.body)) for p in module.processes
    )
    new_instances = tuple(
        replace(
            inst,
            conns=tuple(
                (port, None if e is None else rename_in_expr(e, mapping))
                for port, e in inst.conns
            ),
        )
        for inst in module.instances
    )
    rebuild = {}
    for old, new in zip(module.assigns, new_assigns):
        rebuild[id(old)] = new
    for old, new in zip(module.processes, new_processes):
        rebuild[id(old)] = new
    for old, new in zip(module.instances, new_instances):
        rebuild[id(old)] = new
    order = tuple(rebuild.get(id(item), item) for item in module.ordered_items())
    return replace(
        module,
        assigns=new_assigns,
        processes=new_processes,
        instances=new_instances,
        item_order=order,
    )


def _append_items(module: RtlModule, nets=(), assigns=(), ports=()) -> RtlModule:
    return replace(
        module,
        ports=module.ports + tuple(ports),
        nets=module.nets + tuple(nets),
        assigns=module.assigns + tuple(assigns),
        item_order=module.ordered_items() + tuple(nets) + tuple(assigns),
    )


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def add_port(
    design: RtlDesign,
    module_name: str,
    name: str,
    direction: str,
    width: int,
    net_kind: str = "wire",
    _log: list | None = None,
) -> RtlDesign:
    """Append a port to the module; every existing instantiation gains
    an explicit entry (inputs tied to 0, outputs left open)."""
    _valid_identifier(name)
    if width < 1:
        raise InvalidSpec("port width must be >= 1")
    module = _require_module(design, module_name)
    if name in module.declared_names():
        raise NameCollision(f"{name!r} already declared in {module_name!r}")
    port = PortDecl(name, direction, net_kind, width)
    design = design.replace_module(replace(module, ports=module.ports + (port,)))

    for mod in design.modules:
        new_instances = []
        changed = False
        for inst in mod.instances:
            if inst.module_name == module_name and all(p != name for p, _ in inst.conns):
                tie = Const(0, width) if direction == "input" else None
                new_instances.append(replace(inst, conns=inst.conns + ((name, tie),)))
                changed = True
            else:
                new_instances.append(inst)
        if changed:
            by_old = dict(zip(mod.instances, new_instances))
            order = tuple(
                by_old.get(item, item) if isinstance(item, ModuleInst) else item
                for item in mod.ordered_items()
            )
            design = design.replace_module(
                replace(mod, instances=tuple(new_instances), item_order=order)
            )
    if _log is not None:
        _log.append(
            SignalEdit(
                "add_port",
                {
                    "module": module_name,
                    "name": name,
                    "direction": direction,
                    "width": width,
                    "net_kind": net_kind,
                },
            )
        )
    return design


def add_net(
    design: RtlDesign,
    module_name: str,
    name: str,
    width: int,
    net_kind: str = "wire",
    _log: list | None = None,
) -> RtlDesign:
    """Declare a new internal net."""
    _valid_identifier(name)
    module = _require_module(design, module_name)
    if name in module.declared_names():
        raise NameCollision(f"{name!r} already declared in {module_name!r}")
    design = design.replace_module(
        _append_items(module, nets=(NetDecl(name, net_kind, width),))
    )
    if _log is not None:
        _log.append(
            SignalEdit(
                "add_net",
                {"module": module_name, "name": name, "width": width, "net_kind": net_kind},
            )
        )
    return design


def join_signals(
    design: RtlDesign,
    module_name: str,
    originals: list[str],
    joint: str,
    _log: list | None = None,
) -> RtlDesign:
    """Declare `joint`, rewrite every read of each original to read it.

    1-bit signals merge as the OR of the originals; multi-bit joins take
    the first-listed signal (first-listed-driver priority). The
    originals keep their drivers.
    """
    _valid_identifier(joint)
    module = _require_module(design, module_name)
    if not originals:
        raise InvalidSpec("join requires at least one original signal")
    if joint in module.declared_names():
        raise NameCollision(f"{joint!r} already declared in {module_name!r}")
    widths = []
    for name in originals:
        w = module.decl_width(name)
        if w is None:
            raise UnknownNet(f"{name!r} not declared in {module_name!r}")
        widths.append(w)
    if len(set(widths)) > 1:
        raise WidthMismatch(
            f"joined signals must share a width, got {dict(zip(originals, widths))}"
        )
    width = widths[0]

    mapping = {name: joint for name in originals}
    module = _rename_reads_in_module(module, mapping)

    distinct = list(dict.fromkeys(originals))
    if width == 1 and len(distinct) > 1:
        rhs = Ident(distinct[0])
        for name in distinct[1:]:
            rhs = Binary("|", rhs, Ident(name))
    else:
        rhs = Ident(distinct[0])
    module = _append_items(
        module,
        nets=(NetDecl(joint, "wire", width),),
        assigns=(ContinuousAssign(Ident(joint), rhs),),
    )
    design = design.replace_module(module)
    if _log is not None:
        _log.append(
            SignalEdit(
                "join",
                {"module": module_name, "originals": list(originals), "joint": joint},
            )
        )
    return design


def _instance_children(design: RtlDesign, module_name: str) -> list[tuple[str, str]]:
    """(instance name, child module) pairs, skipping primitives."""
    mod = design.module(module_name)
    if mod is None:
        return []
    return [
        (inst.inst_name, inst.module_name)
        for inst in mod.instances
        if inst.module_name != RAM_PRIMITIVE
    ]


def _find_instance_path(
    design: RtlDesign, ancestor: str, descendant: str
) -> list[tuple[str, str]] | None:
    """Chain of (parent module, instance name) hops from ancestor down
    to descendant, or None."""
    if ancestor == descendant:
        return []
    for inst_name, child in _instance_children(design, ancestor):
        if child == descendant:
            return [(ancestor, inst_name)]
        deeper = _find_instance_path(design, child, descendant)
        if deeper is not None:
            return [(ancestor, inst_name)] + deeper
    return None


def _fresh_name(base: str, taken: set[str], log: list) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_r{i}" in taken:
        i += 1
    name = f"{base}_r{i}"
    log.append(SignalEdit("route_rename", {"wanted": base, "used": name}))
    return name


def route_signal(
    design: RtlDesign,
    source: tuple[str, str],
    dest_module: str,
    _log: list | None = None,
) -> RtlDesign:
    """Punch ports so `dest_module` sees the value of source net.

    The source module must be instantiated (possibly transitively)
    under the destination: each module on the chain gains an output
    port carrying the net upward, and the destination gains a wire
    mirroring it. Name collisions resolve by deterministic _rN
    suffixing, recorded in the edit log.
    """
    src_module, src_net = source
    _require_module(design, dest_module)
    src = _require_module(design, src_module)
    if src.decl_width(src_net) is None:
        raise UnknownNet(f"{src_net!r} not declared in {src_module!r}")
    if src_module == dest_module:
        if _log is not None:
            _log.append(
                SignalEdit(
                    "route",
                    {"source_module": src_module, "net": src_net, "dest": dest_module},
                )
            )
        return design

    path = _find_instance_path(design, dest_module, src_module)
    if path is None:
        raise NoPath(
            f"{src_module!r} is not instantiated under {dest_module!r}"
        )

    width = src.decl_width(src_net)
    inner_log: list = []
    # walk bottom-up: source module exports the net, intermediates re-export
    carried = src_net
    for parent_name, inst_name in reversed(path):
        parent_mod = _require_module(design, parent_name)
        child_name = next(
            i.module_name for i in parent_mod.instances if i.inst_name == inst_name
        )
        child = _require_module(design, child_name)
        port_name = _fresh_name(f"{src_net}_route", set(child.declared_names()), inner_log)
        child2 = replace(
            child, ports=child.ports + (PortDecl(port_name, "output", "wire", width),)
        )
        child2 = _append_items(
            child2, assigns=(ContinuousAssign(Ident(port_name), Ident(carried)),)
        )
        design = design.replace_module(child2)

        parent = _require_module(design, parent_name)
        wire_name = _fresh_name(
            f"{src_net}_route", set(parent.declared_names()), inner_log
        )
        new_instances = []
        target_inst = None
        for inst in parent.instances:
            if inst.inst_name == inst_name:
                target_inst = replace(
                    inst, conns=inst.conns + ((port_name, Ident(wire_name)),)
                )
                new_instances.append(target_inst)
            else:
                new_instances.append(inst)
        by_old = dict(zip(parent.instances, new_instances))
        order = tuple(
            by_old.get(item, item) if isinstance(item, ModuleInst) else item
            for item in parent.ordered_items()
        )
        parent2 = replace(
            parent,
            instances=tuple(new_instances),
            nets=parent.nets + (NetDecl(wire_name, "wire", width),),
            item_order=(NetDecl(wire_name, "wire", width),) + order,
        )
        design = design.replace_module(parent2)
        carried = wire_name

    if _log is not None:
        _log.append(
            SignalEdit(
                "route",
                {"source_module": src_module, "net": src_net, "dest": dest_module},
            )
        )
        _log.extend(inner_log)
    return design


def rename_module(
    design: RtlDesign, old: str, new: str, _log: list | None = None
) -> RtlDesign:
    """Rename a module declaration and every instantiation of it."""
    _valid_identifier(new)
    _require_module(design, old)
    if design.module(new) is not None or new == RAM_PRIMITIVE:
        raise NameCollision(f"module {new!r} already exists")
    modules = []
    for mod in design.modules:
        if mod.name == old:
            mod = replace(mod, name=new)
        new_instances = tuple(
            replace(inst, module_name=new) if inst.module_name == old else inst
            for inst in mod.instances
        )
        by_old = dict(zip(mod.instances, new_instances))
        order = tuple(
            by_old.get(item, item) if isinstance(item, ModuleInst) else item
            for item in mod.ordered_items()
        )
        modules.append(
            replace(mod, instances=new_instances, item_order=order)
        )
    design = replace(design, modules=tuple(modules))
    if _log is not None:
        _log.append(SignalEdit("rename_module", {"old": old, "new": new}))
    return design


def rename_net(
    design: RtlDesign, module_name: str, old: str, new: str, _log: list | None = None
) -> RtlDesign:
    """Rename a port or net within one module (reads and writes).

    Used by adversarial-renaming experiments; behavior-preserving.
    """
    _valid_identifier(new)
    module = _require_module(design, module_name)
    if module.decl_width(old) is None and old not in module.param_values():
        raise UnknownNet(f"{old!r} not declared in {module_name!r}")
    if new in module.declared_names():
        raise NameCollision(f"{new!r} already declared in {module_name!r}")
    mapping = {old: new}

    new_ports = tuple(
        replace(p, name=new) if p.name == old else p for p in module.ports
    )
    new_nets = tuple(replace(n, name=new) if n.name == old else n for n in module.nets)
    new_params = tuple(
        replace(
            g,
            items=tuple((new if nm == old else nm, c) for nm, c in g.items),
        )
        for g in module.params
    )
    new_assigns = tuple(
        replace(
            a,
            lhs=rename_in_expr(a.lhs, mapping),
            rhs=rename_in_expr(a.rhs, mapping),
        )
        for a in module.assigns
    )
    new_processes = tuple(
        replace(
            p,
            body=tuple(rename_in_stmt(s, mapping) for s in p.body),
            clock=new if p.clock == old else p.clock,
            sensitivity=None
            if p.sensitivity is None
            else tuple(new if s == old else s for s in p.sensitivity),
        )
        for p in module.processes
    )
    new_instances = tuple(
        replace(
            inst,
            conns=tuple(
                (port, None if e is None else rename_in_expr(e, mapping))
                for port, e in inst.conns
            ),
        )
        for inst in module.instances
    )
    rebuild = {}
    for olds, news in (
        (module.nets, new_nets),
        (module.params, new_params),
        (module.assigns, new_assigns),
        (module.processes, new_processes),
        (module.instances, new_instances),
    ):
        for a, b in zip(olds, news):
            rebuild[id(a)] = b
    order = tuple(rebuild.get(id(item), item) for item in module.ordered_items())
    renamed = replace(
        module,
        ports=new_ports,
        nets=new_nets,
        params=new_params,
        assigns=new_assigns,
        processes=new_processes,
        instances=new_instances,
        item_order=order,
    )
    design = design.replace_module(renamed)

    # a renamed port changes connection names at instantiation sites
    if any(p.name == new for p in new_ports):
        for mod in design.modules:
            changed = False
            fixed = []
            for inst in mod.instances:
                if inst.module_name == module_name and any(
                    p == old for p, _ in inst.conns
                ):
                    fixed.append(
                        replace(
                            inst,
                            conns=tuple(
                                (new if p == old else p, e) for p, e in inst.conns
                            ),
                        )
                    )
                    changed = True
                else:
                    fixed.append(inst)
            if changed:
                by_old = dict(zip(mod.instances, fixed))
                order = tuple(
                    by_old.get(item, item) if isinstance(item, ModuleInst) else item
                    for item in mod.ordered_items()
                )
                design = design.replace_module(
                    replace(mod, instances=tuple(fixed), item_order=order)
                )
    if _log is not None:
        _log.append(
            SignalEdit(
                "rename_net", {"module": module_name, "old": old, "new": new}
            )
        )
    return design


# ---------------------------------------------------------------------------
# edit scripts
# ---------------------------------------------------------------------------


def apply_edit(design: RtlDesign, edit: SignalEdit, log: list | None = None) -> RtlDesign:
    p = edit.params
    if edit.kind == "add_port":
        return add_port(
            design, p["module"], p["name"], p["direction"], p["width"],
            p.get("net_kind", "wire"), _log=log,
        )
    if edit.kind == "add_net":
        return add_net(
            design, p["module"], p["name"], p["width"], p.get("net_kind", "wire"), _log=log
        )
    if edit.kind == "join":
        return join_signals(design, p["module"], p["originals"], p["joint"], _log=log)
    if edit.kind == "route":
        return route_signal(
            design, (p["source_module"], p["net"]), p["dest"], _log=log
        )
    if edit.kind == "rename_module":
        return rename_module(design, p["old"], p["new"], _log=log)
    if edit.kind == "rename_net":
        return rename_net(design, p["module"], p["old"], p["new"], _log=log)
    if edit.kind == "route_rename":
        return design  # informational log entry
    raise InvalidSpec(f"unknown edit kind {edit.kind!r}")


def apply_edits(design: RtlDesign, edits, log: list | None = None) -> RtlDesign:
    for edit in edits:
        design = apply_edit(design, edit, log)
    return design


def edits_from_json(text: str) -> list[SignalEdit]:
    doc = json.loads(text)
    if not isinstance(doc, list):
        raise InvalidSpec("edit script must be a JSON list")
    edits = []
    for entry in doc:
        entry = dict(entry)
        kind = entry.pop("kind")
        edits.append(SignalEdit(kind, entry))
    return edits


def edits_to_json(edits) -> str:
    return json.dumps([e.to_dict() for e in edits], indent=2) + "\n"
