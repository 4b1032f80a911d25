"""Simulation kernel.

Each cycle: apply input drives, settle the combinational fabric (one
pass in elaboration's topological order -- combinational cycles were
rejected there), commit every clocked assignment and RAM port on the
posedge, settle again, then sample. Registers start at their reset
expression's value; everything else starts at 0.

For speed the elaborated design is compiled once into two Python
functions (combinational pass and clock edge) that operate on a flat
slot vector; the per-cycle loop just calls them. A combinational
process that skips assigning a net on some path leaves the previous
settled value in place, which is exactly hardware latch behavior (lint
reports such processes).
"""

from __future__ import annotations

from sentaur.errors import InvalidSpec, UnknownInput
from sentaur.rtl.ast import (
    Assign,
    Binary,
    BitSelect,
    CaseStmt,
    Concat,
    Const,
    Ident,
    IfStmt,
    PartSelect,
    Ternary,
    Unary,
    mask,
)
from sentaur.rtl.elaborate import ElaboratedDesign, FlatAssign, FlatProcess
from sentaur.sim.prng import Xorshift64Star
from sentaur.sim.stimulus import StimulusProgram
from sentaur.sim.trace import SimTrace

_DEFAULT_UNSIZED_WIDTH = 32


class _Compiler:
    def __init__(self, elab: ElaboratedDesign):
        self.elab = elab
        self.slot = {name: i for i, (name, _) in enumerate(elab.flat_nets)}
        self.widths = elab.widths
        self.tmp = 0

    # -- widths ------------------------------------------------------------

    def width_of(self, expr):
        if isinstance(expr, Const):
            return expr.width
        if isinstance(expr, Ident):
            return self.widths[expr.name]
        if isinstance(expr, Unary):
            return 1 if expr.op == "!" else self.width_of(expr.operand)
        if isinstance(expr, Binary):
            if expr.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
                return 1
            lw = self.width_of(expr.left)
            rw = self.width_of(expr.right)
            if lw is None:
                return rw
            if rw is None:
                return lw
            return max(lw, rw)
        if isinstance(expr, Ternary):
            tw = self.width_of(expr.then_val)
            ew = self.width_of(expr.else_val)
            if tw is None:
                return ew
            if ew is None:
                return tw
            return max(tw, ew)
        if isinstance(expr, BitSelect):
            return 1
        if isinstance(expr, PartSelect):
            return expr.msb - expr.lsb + 1
        if isinstance(expr, Concat):
            total = 0
            for p in expr.parts:
                w = self.width_of(p)
                total += w if w is not None else _DEFAULT_UNSIZED_WIDTH
            return total
        raise TypeError(f"not an expression: {expr!r}")

    # -- expressions ---------------------------------------------------------

    def expr(self, e) -> str:
        """Python source evaluating e to a normalized unsigned int."""
        if isinstance(e, Const):
            return str(e.value)
        if isinstance(e, Ident):
            return f"v[{self.slot[e.name]}]"
        if isinstance(e, Unary):
            inner = self.expr(e.operand)
            if e.op == "!":
                return f"(0 if {inner} else 1)"
            w = self.width_of(e.operand) or _DEFAULT_UNSIZED_WIDTH
            return f"((~{inner}) & {mask(w)})"
        if isinstance(e, Binary):
            l, r = self.expr(e.left), self.expr(e.right)
            op = e.op
            if op == "&&":
                return f"(1 if {l} and {r} else 0)"
            if op == "||":
                return f"(1 if {l} or {r} else 0)"
            if op in ("==", "!=", "<", "<=", ">", ">="):
                return f"(1 if {l} {op} {r} else 0)"
            if op in ("+", "-"):
                w = self.width_of(e) or _DEFAULT_UNSIZED_WIDTH
                return f"(({l} {op} {r}) & {mask(w)})"
            return f"({l} {op} {r})"  # & | ^ cannot overflow normalized operands
        if isinstance(e, Ternary):
            return f"({self.expr(e.then_val)} if {self.expr(e.cond)} else {self.expr(e.else_val)})"
        if isinstance(e, BitSelect):
            return f"((v[{self.slot[e.base]}] >> {self.expr(e.index)}) & 1)"
        if isinstance(e, PartSelect):
            w = e.msb - e.lsb + 1
            return f"((v[{self.slot[e.base]}] >> {e.lsb}) & {mask(w)})"
        if isinstance(e, Concat):
            pieces = []
            shift = 0
            for part in reversed(e.parts):
                w = self.width_of(part) or _DEFAULT_UNSIZED_WIDTH
                src = self.expr(part)
                pieces.append(f"({src} << {shift})" if shift else src)
                shift += w
            return "(" + " | ".join(reversed(pieces)) + ")"
        raise TypeError(f"not an expression: {e!r}")

    # -- statements ----------------------------------------------------------

    def assign_comb(self, stmt: Assign, out, indent):
        pad = "    " * indent
        rhs = self.expr(stmt.rhs)
        lhs = stmt.lhs
        if isinstance(lhs, Ident):
            slot = self.slot[lhs.name]
            out.append(f"{pad}v[{slot}] = ({rhs}) & {mask(self.widths[lhs.name])}")
        elif isinstance(lhs, BitSelect):
            slot = self.slot[lhs.base]
            m = mask(self.widths[lhs.base])
            idx = self.expr(lhs.index)
            out.append(
                f"{pad}v[{slot}] = ((v[{slot}] & ~(1 << ({idx}))) | "
                f"((({rhs}) & 1) << ({idx}))) & {m}"
            )
        elif isinstance(lhs, PartSelect):
            slot = self.slot[lhs.base]
            w = lhs.msb - lhs.lsb + 1
            m = mask(self.widths[lhs.base])
            out.append(
                f"{pad}v[{slot}] = ((v[{slot}] & ~{mask(w) << lhs.lsb}) | "
                f"((({rhs}) & {mask(w)}) << {lhs.lsb})) & {m}"
            )

    def assign_clocked(self, stmt: Assign, out, indent):
        pad = "    " * indent
        rhs = self.expr(stmt.rhs)
        lhs = stmt.lhs
        if isinstance(lhs, Ident):
            slot = self.slot[lhs.name]
            out.append(f"{pad}pd[{slot}] = ({rhs}) & {mask(self.widths[lhs.name])}")
        elif isinstance(lhs, BitSelect):
            slot = self.slot[lhs.base]
            m = mask(self.widths[lhs.base])
            idx = self.expr(lhs.index)
            out.append(
                f"{pad}pd[{slot}] = ((pd.get({slot}, v[{slot}]) & ~(1 << ({idx}))) | "
                f"((({rhs}) & 1) << ({idx}))) & {m}"
            )
        elif isinstance(lhs, PartSelect):
            slot = self.slot[lhs.base]
            w = lhs.msb - lhs.lsb + 1
            m = mask(self.widths[lhs.base])
            out.append(
                f"{pad}pd[{slot}] = ((pd.get({slot}, v[{slot}]) & ~{mask(w) << lhs.lsb}) | "
                f"((({rhs}) & {mask(w)}) << {lhs.lsb})) & {m}"
            )

    def stmt(self, stmt, out, indent, clocked: bool):
        pad = "    " * indent
        if isinstance(stmt, Assign):
            if clocked:
                self.assign_clocked(stmt, out, indent)
            else:
                self.assign_comb(stmt, out, indent)
        elif isinstance(stmt, IfStmt):
            out.append(f"{pad}if {self.expr(stmt.cond)}:")
            self.block(stmt.then_body, out, indent + 1, clocked)
            if stmt.else_body is not None:
                out.append(f"{pad}else:")
                self.block(stmt.else_body, out, indent + 1, clocked)
        elif isinstance(stmt, CaseStmt):
            scrut = f"_s{self.tmp}"
            self.tmp += 1
            out.append(f"{pad}{scrut} = {self.expr(stmt.scrutinee)}")
            first = True
            for arm in stmt.arms:
                tests = " or ".join(
                    f"{scrut} == {self.expr(label)}" for label in arm.labels
                )
                out.append(f"{pad}{'if' if first else 'elif'} {tests}:")
                self.block(arm.body, out, indent + 1, clocked)
                first = False
            if stmt.default_body is not None:
                if first:
                    self.block(stmt.default_body, out, indent, clocked)
                else:
                    out.append(f"{pad}else:")
                    self.block(stmt.default_body, out, indent + 1, clocked)
        else:
            raise TypeError(f"not a statement: {stmt!r}")

    def block(self, body, out, indent, clocked: bool):
        if not body:
            out.append("    " * indent + "pass")
            return
        for s in body:
            self.stmt(s, out, indent, clocked)

    # -- whole kernel ----------------------------------------------------

    def build(self):
        lines = ["def comb(v):"]
        body_start = len(lines)
        for node in self.elab.comb_order:
            if isinstance(node, FlatAssign):
                lines.append(
                    f"    v[{self.slot[node.lhs]}] = "
                    f"({self.expr(node.rhs)}) & {mask(node.width)}"
                )
            elif isinstance(node, FlatProcess):
                self.block(node.body, lines, 1, clocked=False)
        if len(lines) == body_start:
            lines.append("    pass")

        lines.append("def edge(v, pd, mems, writes):")
        body_start = len(lines)
        for proc in self.elab.clocked_procs:
            self.block(proc.body, lines, 1, clocked=True)
        for ram in self.elab.rams:
            c = ram.conns
            dout = self.slot[c["dout_b"]]
            addr_b = self.slot[c["addr_b"]]
            we = self.slot[c["we_a"]]
            addr_a = self.slot[c["addr_a"]]
            din = self.slot[c["din_a"]]
            lines.append(f"    pd[{dout}] = mems[{ram.inst!r}].get(v[{addr_b}], 0)")
            lines.append(f"    if v[{we}]:")
            lines.append(f"        writes.append(({ram.inst!r}, v[{addr_a}], v[{din}]))")
        if len(lines) == body_start:
            lines.append("    pass")

        source = "\n".join(lines)
        namespace: dict = {}
        exec(compile(source, "<sim-kernel>", "exec"), namespace)
        return namespace["comb"], namespace["edge"]


def _compiled(elab: ElaboratedDesign):
    cached = getattr(elab, "_kernel", None)
    if cached is None:
        cached = _Compiler(elab).build()
        elab._kernel = cached
    return cached


def simulate(elab: ElaboratedDesign, stim: StimulusProgram, cycles: int) -> SimTrace:
    """Run `cycles` clock cycles and sample every flat net each cycle."""
    if cycles < 1:
        raise InvalidSpec("cycles must be >= 1")
    input_set = set(elab.inputs)
    for name in sorted(stim.driven_inputs()):
        if name not in input_set:
            raise UnknownInput(f"{name!r} is not a top-level input")
    if stim.clock not in input_set:
        raise UnknownInput(f"clock {stim.clock!r} is not a top-level input")

    comb, edge = _compiled(elab)
    slot = {name: i for i, (name, _) in enumerate(elab.flat_nets)}
    widths = elab.widths

    v = [0] * len(elab.flat_nets)
    for net, width, reset_value in elab.state_regs:
        v[slot[net]] = reset_value & mask(width)

    mems: dict[str, dict[int, int]] = {ram.inst: {} for ram in elab.rams}

    generated = set(stim.counter_inputs) | {n for n, _, _ in stim.random_ranges}
    persist: dict[str, list[tuple[int, int]]] = {}
    exact: dict[tuple[int, str], int] = {}
    for cycle, name, value in stim.drives:
        if name in generated:
            exact[(cycle, name)] = value
        else:
            persist.setdefault(name, []).append((cycle, value))
    pointers = {name: 0 for name in persist}

    rng = Xorshift64Star(stim.random_seed)
    columns: dict[str, list[int]] = {name: [] for name, _ in elab.flat_nets}

    for t in range(cycles):
        for name in stim.counter_inputs:
            v[slot[name]] = t & mask(widths[name])
        for name, lo, hi in stim.random_ranges:
            v[slot[name]] = rng.next_in_range(lo, hi) & mask(widths[name])
        for name, drive_list in persist.items():
            p = pointers[name]
            while p < len(drive_list) and drive_list[p][0] <= t:
                v[slot[name]] = drive_list[p][1] & mask(widths[name])
                p += 1
            pointers[name] = p
        for (cycle, name), value in exact.items():
            if cycle == t:
                v[slot[name]] = value & mask(widths[name])
        if stim.reset_net:
            v[slot[stim.reset_net]] = 1 if t < stim.reset_cycles else 0

        comb(v)
        pd: dict[int, int] = {}
        writes: list[tuple[str, int, int]] = []
        edge(v, pd, mems, writes)
        for s, value in pd.items():
            v[s] = value
        for inst, addr, value in writes:
            mems[inst][addr] = value
        comb(v)

        for name, _ in elab.flat_nets:
            columns[name].append(v[slot[name]])

    return SimTrace(
        cycles=cycles,
        widths=dict(widths),
        values=columns,
        seed=stim.random_seed,
    )
