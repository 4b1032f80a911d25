"""Hierarchy flattening with resolved widths and drivers.

Instance nets get dot-separated hierarchical names. Localparam
references fold to constants, so flattened expressions read only flat
nets. Every flat net ends up with exactly one driver: a continuous
assign, a process, a RAM primitive read port, a tie-off, or the fact of
being a top-level input. Undriven nets tie to constant 0 (two-value
logic has no X).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from sentaur.errors import (
    CombinationalCycle,
    RecursiveInstantiation,
    UnknownTop,
    UnresolvedInstance,
    UnsupportedConstruct,
)
from sentaur.rtl.ast import (
    RAM_PORTS,
    RAM_PRIMITIVE,
    Assign,
    Binary,
    BitSelect,
    CaseStmt,
    Concat,
    Const,
    Ident,
    IfStmt,
    RtlDesign,
    RtlModule,
    Span,
    Ternary,
    Unary,
    expr_idents,
    lvalue_base,
    rename_in_expr,
    rename_in_stmt,
    walk_expr,
    walk_stmts,
)


@dataclass(frozen=True)
class FlatAssign:
    lhs: str
    rhs: object
    width: int
    scope: str = ""
    span: Span = field(default=Span(), compare=False)


@dataclass(frozen=True)
class FlatProcess:
    kind: str  # "comb" | "clocked"
    body: tuple
    clock: Optional[str]
    assigned: tuple[str, ...]
    reads: tuple[str, ...]
    scope: str = ""
    span: Span = field(default=Span(), compare=False)


@dataclass(frozen=True)
class FlatRam:
    inst: str
    conns: dict[str, str]  # primitive port -> flat net


@dataclass(frozen=True)
class Tie0:
    net: str


INPUT_DRIVER = "input"

Driver = Union[FlatAssign, FlatProcess, FlatRam, Tie0, str]


@dataclass
class ElaboratedDesign:
    top: str
    flat_nets: list[tuple[str, int]]
    widths: dict[str, int]
    inputs: list[str]
    outputs: list[str]
    drivers: dict[str, Driver]
    assigns: list[FlatAssign]
    comb_procs: list[FlatProcess]
    clocked_procs: list[FlatProcess]
    rams: list[FlatRam]
    comb_order: list  # FlatAssign/FlatProcess in evaluation order
    state_regs: list[tuple[str, int, int]]  # net, width, reset value
    reset_nets: set[str]
    clock_root: Optional[str]
    design: RtlDesign


def _fold_params(expr, params: dict[str, Const]):
    """Replace localparam identifiers with their constants."""
    if isinstance(expr, Ident) and expr.name in params:
        c = params[expr.name]
        return Const(c.value, c.width, base=c.base, span=expr.span)
    if isinstance(expr, Unary):
        return replace(expr, operand=_fold_params(expr.operand, params))
    if isinstance(expr, Binary):
        return replace(
            expr,
            left=_fold_params(expr.left, params),
            right=_fold_params(expr.right, params),
        )
    if isinstance(expr, Ternary):
        return replace(
            expr,
            cond=_fold_params(expr.cond, params),
            then_val=_fold_params(expr.then_val, params),
            else_val=_fold_params(expr.else_val, params),
        )
    if isinstance(expr, BitSelect):
        return replace(expr, index=_fold_params(expr.index, params))
    if isinstance(expr, Concat):
        return replace(expr, parts=tuple(_fold_params(p, params) for p in expr.parts))
    return expr


def _fold_stmt(stmt, params: dict[str, Const]):
    if isinstance(stmt, Assign):
        return replace(
            stmt, lhs=_fold_params(stmt.lhs, params), rhs=_fold_params(stmt.rhs, params)
        )
    if isinstance(stmt, IfStmt):
        return replace(
            stmt,
            cond=_fold_params(stmt.cond, params),
            then_body=tuple(_fold_stmt(s, params) for s in stmt.then_body),
            else_body=None
            if stmt.else_body is None
            else tuple(_fold_stmt(s, params) for s in stmt.else_body),
        )
    if isinstance(stmt, CaseStmt):
        return replace(
            stmt,
            scrutinee=_fold_params(stmt.scrutinee, params),
            arms=tuple(
                replace(
                    arm,
                    labels=tuple(_fold_params(l, params) for l in arm.labels),
                    body=tuple(_fold_stmt(s, params) for s in arm.body),
                )
                for arm in stmt.arms
            ),
            default_body=None
            if stmt.default_body is None
            else tuple(_fold_stmt(s, params) for s in stmt.default_body),
        )
    raise TypeError(f"not a statement: {stmt!r}")


def _stmt_reads(body) -> set[str]:
    reads: set[str] = set()
    for stmt in walk_stmts(body):
        if isinstance(stmt, Assign):
            reads |= expr_idents(stmt.rhs)
            if isinstance(stmt.lhs, BitSelect):
                reads |= expr_idents(stmt.lhs.index)
        elif isinstance(stmt, IfStmt):
            reads |= expr_idents(stmt.cond)
        elif isinstance(stmt, CaseStmt):
            reads |= expr_idents(stmt.scrutinee)
            for arm in stmt.arms:
                for label in arm.labels:
                    reads |= expr_idents(label)
    return reads


class _Elaborator:
    def __init__(self, design: RtlDesign, top: str):
        self.design = design
        self.flat_nets: list[tuple[str, int]] = []
        self.widths: dict[str, int] = {}
        self.assigns: list[FlatAssign] = []
        self.comb_procs: list[FlatProcess] = []
        self.clocked_procs: list[FlatProcess] = []
        self.rams: list[FlatRam] = []
        self.top_module = design.module(top)
        if self.top_module is None:
            raise UnknownTop(f"module {top!r} not found in design")

    def declare(self, name: str, width: int):
        self.flat_nets.append((name, width))
        self.widths[name] = width

    def flatten(self, module: RtlModule, prefix: str, path: tuple[str, ...]):
        if module.name in path:
            raise RecursiveInstantiation(
                " -> ".join(path + (module.name,))
            )
        params = module.param_values()
        renames = {
            name: prefix + name
            for name in ({p.name for p in module.ports} | {n.name for n in module.nets})
        }

        for p in module.ports:
            self.declare(prefix + p.name, p.width)
        for n in module.nets:
            self.declare(prefix + n.name, n.width)

        def flat_expr(expr):
            return rename_in_expr(_fold_params(expr, params), renames)

        for a in module.assigns:
            if not isinstance(a.lhs, Ident):
                raise UnsupportedConstruct(
                    "partial continuous assignment", a.span.line_start
                )
            lhs = prefix + a.lhs.name
            self.assigns.append(
                FlatAssign(lhs, flat_expr(a.rhs), self.widths[lhs], prefix, a.span)
            )

        for proc in module.processes:
            folded = tuple(
                rename_in_stmt(_fold_stmt(s, params), renames) for s in proc.body
            )
            assigned = sorted({lvalue_base(s.lhs) for s in walk_stmts(folded) if isinstance(s, Assign)})
            reads = sorted(_stmt_reads(folded))
            flat = FlatProcess(
                kind=proc.kind,
                body=folded,
                clock=(prefix + proc.clock) if proc.clock else None,
                assigned=tuple(assigned),
                reads=tuple(reads),
                scope=prefix,
                span=proc.span,
            )
            if proc.kind == "clocked":
                self.clocked_procs.append(flat)
            else:
                self.comb_procs.append(flat)

        for inst in module.instances:
            child_prefix = prefix + inst.inst_name + "."
            if inst.module_name == RAM_PRIMITIVE:
                ports = {name: (d, w) for name, (d, w) in RAM_PORTS.items()}
                for pname, (_, w) in RAM_PORTS.items():
                    self.declare(child_prefix + pname, w)
                self.rams.append(
                    FlatRam(
                        prefix + inst.inst_name,
                        {p: child_prefix + p for p in RAM_PORTS},
                    )
                )
                self._connect(inst, ports, child_prefix, flat_expr, prefix)
                continue
            child = self.design.module(inst.module_name)
            if child is None:
                raise UnresolvedInstance(
                    f"{inst.module_name!r} (instance {prefix + inst.inst_name!r}) "
                    "is not defined and is not a known primitive"
                )
            ports = {p.name: (p.direction, p.width) for p in child.ports}
            self.flatten(child, child_prefix, path + (module.name,))
            self._connect(inst, ports, child_prefix, flat_expr, prefix)

    def _connect(self, inst, ports, child_prefix, flat_expr, prefix):
        conn_map = dict(inst.conns)
        for pname in conn_map:
            if pname not in ports:
                raise UnresolvedInstance(
                    f"port {pname!r} does not exist on {inst.module_name!r}"
                )
        for pname, (direction, width) in ports.items():
            expr = conn_map.get(pname)
            inner = child_prefix + pname
            if direction == "input":
                if expr is None:
                    continue  # undriven inner net ties to 0 later
                self.assigns.append(
                    FlatAssign(inner, flat_expr(expr), width, prefix, inst.span)
                )
            else:
                if expr is None:
                    continue  # open output
                if not isinstance(expr, Ident):
                    raise UnsupportedConstruct(
                        "output port connected to a non-identifier", inst.span.line_start
                    )
                outer = flat_expr(expr)
                self.assigns.append(
                    FlatAssign(outer.name, Ident(inner), self.widths[outer.name], prefix, inst.span)
                )


def _infer_resets(proc: FlatProcess) -> tuple[dict[str, int], Optional[str]]:
    """Recognize the synchronous active-high reset idiom:
    a clocked body of the form `if (<net>) <const assigns> else ...`.

    Returns (reg -> reset value, reset net) for matching processes.
    """
    body = proc.body
    if len(body) != 1 or not isinstance(body[0], IfStmt):
        return {}, None
    top = body[0]
    if not isinstance(top.cond, Ident):
        return {}, None
    resets: dict[str, int] = {}
    for stmt in top.then_body:
        if (
            isinstance(stmt, Assign)
            and isinstance(stmt.lhs, Ident)
            and isinstance(stmt.rhs, Const)
        ):
            resets[stmt.lhs.name] = stmt.rhs.value
        else:
            return {}, None
    return resets, top.cond.name


def _comb_topo_order(elab: ElaboratedDesign) -> list:
    nodes = list(elab.assigns) + list(elab.comb_procs)
    writer_of: dict[str, int] = {}
    writes: list[set[str]] = []
    reads: list[set[str]] = []
    for idx, node in enumerate(nodes):
        if isinstance(node, FlatAssign):
            w = {node.lhs}
            r = set(expr_idents(node.rhs))
        else:
            w = set(node.assigned)
            r = set(node.reads)
        writes.append(w)
        reads.append(r)
        for net in w:
            writer_of[net] = idx

    succs: list[set[int]] = [set() for _ in nodes]
    indeg = [0] * len(nodes)
    for idx in range(len(nodes)):
        for net in reads[idx]:
            src = writer_of.get(net)
            if src is not None and src != idx and idx not in succs[src]:
                succs[src].add(idx)
                indeg[idx] += 1
            if src == idx:
                raise CombinationalCycle(sorted(writes[idx]))

    order: list[int] = []
    ready = sorted(i for i in range(len(nodes)) if indeg[i] == 0)
    while ready:
        i = ready.pop(0)
        order.append(i)
        opened = []
        for j in sorted(succs[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                opened.append(j)
        ready = sorted(ready + opened)
    if len(order) != len(nodes):
        stuck = sorted(
            net for i in range(len(nodes)) if indeg[i] > 0 for net in writes[i]
        )
        raise CombinationalCycle(stuck)
    return [nodes[i] for i in order]


def _resolve_clock_root(elab: ElaboratedDesign, net: str) -> str:
    seen = set()
    current = net
    while True:
        if current in seen:
            raise CombinationalCycle([current])
        seen.add(current)
        driver = elab.drivers.get(current)
        if driver == INPUT_DRIVER:
            return current
        if isinstance(driver, FlatAssign) and isinstance(driver.rhs, Ident):
            current = driver.rhs.name
            continue
        raise UnsupportedConstruct(
            f"clock net {net!r} is not fed directly from a top-level input"
        )


def elaborate(design: RtlDesign, top: str) -> ElaboratedDesign:
    """Flatten the hierarchy under `top` and resolve drivers and widths."""
    elab_builder = _Elaborator(design, top)
    elab_builder.flatten(elab_builder.top_module, "", ())

    top_module = elab_builder.top_module
    inputs = [p.name for p in top_module.ports if p.direction == "input"]
    outputs = [p.name for p in top_module.ports if p.direction == "output"]

    elab = ElaboratedDesign(
        top=top,
        flat_nets=elab_builder.flat_nets,
        widths=elab_builder.widths,
        inputs=inputs,
        outputs=outputs,
        drivers={},
        assigns=elab_builder.assigns,
        comb_procs=elab_builder.comb_procs,
        clocked_procs=elab_builder.clocked_procs,
        rams=elab_builder.rams,
        comb_order=[],
        state_regs=[],
        reset_nets=set(),
        clock_root=None,
        design=design,
    )

    for name in inputs:
        elab.drivers[name] = INPUT_DRIVER
    for a in elab.assigns:
        elab.drivers[a.lhs] = a
    for proc in elab.comb_procs + elab.clocked_procs:
        for net in proc.assigned:
            elab.drivers[net] = proc
    for ram in elab.rams:
        elab.drivers[ram.conns["dout_b"]] = ram
    for name, _ in elab.flat_nets:
        if name not in elab.drivers:
            elab.drivers[name] = Tie0(name)

    reset_by_reg: dict[str, int] = {}
    for proc in elab.clocked_procs:
        resets, reset_net = _infer_resets(proc)
        reset_by_reg.update(resets)
        if reset_net is not None:
            elab.reset_nets.add(reset_net)
    for proc in elab.clocked_procs:
        for net in proc.assigned:
            elab.state_regs.append(
                (net, elab.widths[net], reset_by_reg.get(net, 0))
            )

    clock_roots = set()
    for proc in elab.clocked_procs:
        if proc.clock is not None:
            clock_roots.add(_resolve_clock_root(elab, proc.clock))
    for ram in elab.rams:
        clock_roots.add(_resolve_clock_root(elab, ram.conns["clk"]))
    if len(clock_roots) > 1:
        raise UnsupportedConstruct(
            f"multiple clock domains: {sorted(clock_roots)}"
        )
    elab.clock_root = next(iter(clock_roots)) if clock_roots else None

    elab.comb_order = _comb_topo_order(elab)
    return elab


def cell_count(elab: ElaboratedDesign) -> tuple[int, int]:
    """Informational size proxy: (operator node count, register bits).

    RAM primitive contents are excluded; this counts only the RTL fabric.
    """
    comb_ops = 0

    def count_expr(expr):
        nonlocal comb_ops
        for node in walk_expr(expr):
            if isinstance(node, (Binary, Unary, Ternary)):
                comb_ops += 1

    for a in elab.assigns:
        count_expr(a.rhs)
    for proc in elab.comb_procs + elab.clocked_procs:
        for stmt in walk_stmts(proc.body):
            if isinstance(stmt, Assign):
                count_expr(stmt.rhs)
                if isinstance(stmt.lhs, BitSelect):
                    count_expr(stmt.lhs.index)
            elif isinstance(stmt, IfStmt):
                count_expr(stmt.cond)
            elif isinstance(stmt, CaseStmt):
                count_expr(stmt.scrutinee)

    reg_bits = sum(width for _, width, _ in elab.state_regs)
    return comb_ops, reg_bits
