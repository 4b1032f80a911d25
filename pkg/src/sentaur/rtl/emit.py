"""Deterministic pretty-printer for RtlDesign trees.

Identical ASTs produce byte-identical text, and the output reparses to
a structurally equal AST. Formatting is canonical: 4-space indent,
begin/end around every process and branch body, one declaration per
line (localparam groups stay grouped).
"""

from __future__ import annotations

from sentaur.rtl.ast import (
    AlwaysBlock,
    Assign,
    Binary,
    BitSelect,
    CaseStmt,
    Concat,
    Const,
    ContinuousAssign,
    Ident,
    IfStmt,
    LocalParam,
    ModuleInst,
    NetDecl,
    PartSelect,
    RtlDesign,
    RtlModule,
    Ternary,
    Unary,
)

_IND = "    "

# Verilog precedence tier per operator; higher binds tighter.
_TIER = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    "<=": 7,
    ">": 7,
    ">=": 7,
    "+": 8,
    "-": 8,
}
_TERNARY_TIER = 0
_UNARY_TIER = 9


def emit_const(c: Const) -> str:
    if c.width is None:
        return str(c.value)
    if c.base == "h":
        return f"{c.width}'h{c.value:x}"
    if c.base == "b":
        return f"{c.width}'b{c.value:b}"
    return f"{c.width}'d{c.value}"


def emit_expr(expr, parent_tier: int = -1) -> str:
    if isinstance(expr, Const):
        text, tier = emit_const(expr), 100
    elif isinstance(expr, Ident):
        text, tier = expr.name, 100
    elif isinstance(expr, BitSelect):
        text, tier = f"{expr.base}[{emit_expr(expr.index)}]", 100
    elif isinstance(expr, PartSelect):
        text, tier = f"{expr.base}[{expr.msb}:{expr.lsb}]", 100
    elif isinstance(expr, Concat):
        text = "{" + ", ".join(emit_expr(p) for p in expr.parts) + "}"
        tier = 100
    elif isinstance(expr, Unary):
        text = expr.op + emit_expr(expr.operand, _UNARY_TIER)
        tier = _UNARY_TIER
    elif isinstance(expr, Binary):
        tier = _TIER[expr.op]
        # left-associative: right operand at same tier needs parens
        text = (
            f"{emit_expr(expr.left, tier - 1)} {expr.op} {emit_expr(expr.right, tier)}"
        )
    elif isinstance(expr, Ternary):
        tier = _TERNARY_TIER
        text = (
            f"{emit_expr(expr.cond, _TERNARY_TIER)} ? "
            f"{emit_expr(expr.then_val, _TERNARY_TIER - 1)} : "
            f"{emit_expr(expr.else_val, _TERNARY_TIER - 1)}"
        )
    else:
        raise TypeError(f"not an expression: {expr!r}")
    if tier <= parent_tier:
        return f"({text})"
    return text


def _emit_stmt(stmt, indent: int, out: list[str]) -> None:
    pad = _IND * indent
    if isinstance(stmt, Assign):
        op = "=" if stmt.blocking else "<="
        out.append(f"{pad}{emit_expr(stmt.lhs)} {op} {emit_expr(stmt.rhs)};")
    elif isinstance(stmt, IfStmt):
        out.append(f"{pad}if ({emit_expr(stmt.cond)}) begin")
        for s in stmt.then_body:
            _emit_stmt(s, indent + 1, out)
        if stmt.else_body is None:
            out.append(f"{pad}end")
        else:
            out.append(f"{pad}end else begin")
            for s in stmt.else_body:
                _emit_stmt(s, indent + 1, out)
            out.append(f"{pad}end")
    elif isinstance(stmt, CaseStmt):
        out.append(f"{pad}case ({emit_expr(stmt.scrutinee)})")
        for arm in stmt.arms:
            labels = ", ".join(emit_expr(l) for l in arm.labels)
            out.append(f"{pad}{_IND}{labels}: begin")
            for s in arm.body:
                _emit_stmt(s, indent + 2, out)
            out.append(f"{pad}{_IND}end")
        if stmt.default_body is not None:
            out.append(f"{pad}{_IND}default: begin")
            for s in stmt.default_body:
                _emit_stmt(s, indent + 2, out)
            out.append(f"{pad}{_IND}end")
        out.append(f"{pad}endcase")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def _width_text(width) -> str:
    if width is None or width == 1:
        return ""
    return f"[{width - 1}:0] "


def _emit_item(item, out: list[str]) -> None:
    if isinstance(item, NetDecl):
        out.append(f"{_IND}{item.kind} {_width_text(item.width)}{item.name};")
    elif isinstance(item, LocalParam):
        width = f"[{item.width - 1}:0] " if item.width is not None else ""
        pairs = ", ".join(f"{n} = {emit_const(c)}" for n, c in item.items)
        out.append(f"{_IND}localparam {width}{pairs};")
    elif isinstance(item, ContinuousAssign):
        out.append(f"{_IND}assign {emit_expr(item.lhs)} = {emit_expr(item.rhs)};")
    elif isinstance(item, AlwaysBlock):
        if item.kind == "clocked":
            head = f"always @(posedge {item.clock})"
        elif item.sensitivity is None:
            head = "always @(*)"
        else:
            head = f"always @({' or '.join(item.sensitivity)})"
        out.append(f"{_IND}{head} begin")
        for s in item.body:
            _emit_stmt(s, 2, out)
        out.append(f"{_IND}end")
    elif isinstance(item, ModuleInst):
        out.append(f"{_IND}{item.module_name} {item.inst_name} (")
        for i, (port, expr) in enumerate(item.conns):
            conn = "" if expr is None else emit_expr(expr)
            comma = "," if i + 1 < len(item.conns) else ""
            out.append(f"{_IND}{_IND}.{port}({conn}){comma}")
        out.append(f"{_IND});")
    else:
        raise TypeError(f"not a module item: {item!r}")


def emit_module(module: RtlModule) -> str:
    out: list[str] = []
    out.append(f"module {module.name} (")
    for i, port in enumerate(module.ports):
        comma = "," if i + 1 < len(module.ports) else ""
        out.append(
            f"{_IND}{port.direction} {port.kind} {_width_text(port.width)}{port.name}{comma}"
        )
    out.append(");")
    for item in module.ordered_items():
        _emit_item(item, out)
    out.append("endmodule")
    return "\n".join(out) + "\n"


def emit_verilog(design: RtlDesign) -> str:
    """Print a design; total on valid ASTs, deterministic."""
    return "\n".join(emit_module(m) for m in design.modules)
