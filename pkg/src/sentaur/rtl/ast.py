"""AST node types for the supported Verilog subset.

Nodes compare structurally: two parses of equivalent text are equal even
if source locations or literal bases differ. Location and formatting
metadata live in fields excluded from comparison.

All transforms treat nodes as immutable values and build new trees;
nothing in the toolkit mutates a node after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Span:
    """Line range in the original source (1-indexed, inclusive)."""

    line_start: int = 0
    line_end: int = 0

    def __bool__(self) -> bool:
        return self.line_start > 0


NO_SPAN = Span()


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

BINARY_OPS = ("==", "!=", "<", "<=", ">", ">=", "+", "-", "&", "|", "^", "&&", "||")
UNARY_OPS = ("~", "!")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Const:
    """Sized or unsized integer literal.

    width None means an unsized decimal; its effective width is taken
    from context during width resolution. `base` only affects emission.
    """

    value: int
    width: Optional[int] = None
    base: str = field(default="d", compare=False)
    span: Span = field(default=NO_SPAN, compare=False)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("constants are unsigned")
        if self.width is not None and self.width < 1:
            raise ValueError("constant width must be >= 1")


@dataclass(frozen=True)
class Ident:
    name: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then_val: "Expr"
    else_val: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class BitSelect:
    base: str
    index: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class PartSelect:
    base: str
    msb: int
    lsb: int
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Concat:
    parts: tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


Expr = Union[Const, Ident, Unary, Binary, Ternary, BitSelect, PartSelect, Concat]

# Assignment targets: whole net, single bit, or a constant slice.
LValue = Union[Ident, BitSelect, PartSelect]


def walk_expr(expr: Expr) -> Iterator[Expr]:
    """Yield expr and every sub-expression, preorder."""
    yield expr
    if isinstance(expr, Unary):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, Ternary):
        yield from walk_expr(expr.cond)
        yield from walk_expr(expr.then_val)
        yield from walk_expr(expr.else_val)
    elif isinstance(expr, BitSelect):
        yield from walk_expr(expr.index)
    elif isinstance(expr, Concat):
        for p in expr.parts:
            yield from walk_expr(p)


def expr_idents(expr: Expr) -> set[str]:
    """All identifier names read by expr, including select bases."""
    names: set[str] = set()
    for node in walk_expr(expr):
        if isinstance(node, Ident):
            names.add(node.name)
        elif isinstance(node, (BitSelect, PartSelect)):
            names.add(node.base)
    return names


def rename_in_expr(expr: Expr, mapping: dict[str, str]) -> Expr:
    """Return expr with identifiers renamed per mapping."""
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Ident):
        return replace(expr, name=mapping.get(expr.name, expr.name))
    if isinstance(expr, Unary):
        return replace(expr, operand=rename_in_expr(expr.operand, mapping))
    if isinstance(expr, Binary):
        return replace(
            expr,
            left=rename_in_expr(expr.left, mapping),
            right=rename_in_expr(expr.right, mapping),
        )
    if isinstance(expr, Ternary):
        return replace(
            expr,
            cond=rename_in_expr(expr.cond, mapping),
            then_val=rename_in_expr(expr.then_val, mapping),
            else_val=rename_in_expr(expr.else_val, mapping),
        )
    if isinstance(expr, BitSelect):
        return replace(
            expr,
            base=mapping.get(expr.base, expr.base),
            index=rename_in_expr(expr.index, mapping),
        )
    if isinstance(expr, PartSelect):
        return replace(expr, base=mapping.get(expr.base, expr.base))
    if isinstance(expr, Concat):
        return replace(expr, parts=tuple(rename_in_expr(p, mapping) for p in expr.parts))
    raise TypeError(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    """Procedural assignment; blocking in combinational processes,
    nonblocking in clocked ones."""

    lhs: LValue
    rhs: Expr
    blocking: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then_body: tuple["Stmt", ...]
    else_body: Optional[tuple["Stmt", ...]] = None
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class CaseArm:
    labels: tuple[Expr, ...]  # Const or localparam Ident
    body: tuple["Stmt", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class CaseStmt:
    scrutinee: Expr
    arms: tuple[CaseArm, ...]
    default_body: Optional[tuple["Stmt", ...]] = None
    span: Span = field(default=NO_SPAN, compare=False)


Stmt = Union[Assign, IfStmt, CaseStmt]


def walk_stmts(body) -> Iterator[Stmt]:
    """Yield every statement in a body, preorder, descending into branches."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, IfStmt):
            yield from walk_stmts(stmt.then_body)
            if stmt.else_body is not None:
                yield from walk_stmts(stmt.else_body)
        elif isinstance(stmt, CaseStmt):
            for arm in stmt.arms:
                yield from walk_stmts(arm.body)
            if stmt.default_body is not None:
                yield from walk_stmts(stmt.default_body)


def lvalue_base(lhs: LValue) -> str:
    if isinstance(lhs, Ident):
        return lhs.name
    return lhs.base


def rename_in_stmt(stmt: Stmt, mapping: dict[str, str]) -> Stmt:
    if isinstance(stmt, Assign):
        return replace(
            stmt,
            lhs=rename_in_expr(stmt.lhs, mapping),
            rhs=rename_in_expr(stmt.rhs, mapping),
        )
    if isinstance(stmt, IfStmt):
        return replace(
            stmt,
            cond=rename_in_expr(stmt.cond, mapping),
            then_body=tuple(rename_in_stmt(s, mapping) for s in stmt.then_body),
            else_body=None
            if stmt.else_body is None
            else tuple(rename_in_stmt(s, mapping) for s in stmt.else_body),
        )
    if isinstance(stmt, CaseStmt):
        return replace(
            stmt,
            scrutinee=rename_in_expr(stmt.scrutinee, mapping),
            arms=tuple(
                replace(
                    arm,
                    labels=tuple(rename_in_expr(l, mapping) for l in arm.labels),
                    body=tuple(rename_in_stmt(s, mapping) for s in arm.body),
                )
                for arm in stmt.arms
            ),
            default_body=None
            if stmt.default_body is None
            else tuple(rename_in_stmt(s, mapping) for s in stmt.default_body),
        )
    raise TypeError(f"not a statement: {stmt!r}")


# ---------------------------------------------------------------------------
# Module items
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PortDecl:
    name: str
    direction: str  # "input" | "output"
    kind: str  # "wire" | "reg"; inputs are always wire
    width: int = 1
    span: Span = field(default=NO_SPAN, compare=False)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("port width must be >= 1")
        if self.direction == "input" and self.kind == "reg":
            raise ValueError("inputs must be wires")


@dataclass(frozen=True)
class NetDecl:
    name: str
    kind: str  # "wire" | "reg"
    width: int = 1
    span: Span = field(default=NO_SPAN, compare=False)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("net width must be >= 1")


@dataclass(frozen=True)
class LocalParam:
    """One localparam statement; may declare several names at one width."""

    width: Optional[int]  # None = unsized declaration
    items: tuple[tuple[str, Const], ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class ContinuousAssign:
    lhs: LValue
    rhs: Expr
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class AlwaysBlock:
    """Clocked (posedge, nonblocking) or combinational (blocking) process.

    kind is "clocked" or "comb". For clocked blocks `clock` names the
    posedge net. For combinational blocks `sensitivity` is None for
    `@(*)` or the explicit identifier list.
    """

    kind: str
    body: tuple[Stmt, ...]
    clock: Optional[str] = None
    sensitivity: Optional[tuple[str, ...]] = None
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class ModuleInst:
    module_name: str
    inst_name: str
    conns: tuple[tuple[str, Optional[Expr]], ...]  # named ports; None = open
    span: Span = field(default=NO_SPAN, compare=False)


Item = Union[PortDecl, NetDecl, LocalParam, ContinuousAssign, AlwaysBlock, ModuleInst]


@dataclass(frozen=True)
class RtlModule:
    name: str
    ports: tuple[PortDecl, ...] = ()
    nets: tuple[NetDecl, ...] = ()
    params: tuple[LocalParam, ...] = ()
    assigns: tuple[ContinuousAssign, ...] = ()
    processes: tuple[AlwaysBlock, ...] = ()
    instances: tuple[ModuleInst, ...] = ()
    # Item order as written, for faithful emission. Defaults to decls,
    # params, assigns, processes, instances when absent.
    item_order: tuple[Item, ...] = field(default=(), compare=False)
    span: Span = field(default=NO_SPAN, compare=False)

    def ordered_items(self) -> tuple[Item, ...]:
        if self.item_order:
            return self.item_order
        return self.nets + self.params + self.assigns + self.processes + self.instances

    def port(self, name: str) -> Optional[PortDecl]:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def net(self, name: str) -> Optional[NetDecl]:
        for n in self.nets:
            if n.name == name:
                return n
        return None

    def param_values(self) -> dict[str, Const]:
        values: dict[str, Const] = {}
        for group in self.params:
            for name, const in group.items:
                if group.width is not None and const.width is None:
                    const = Const(const.value, group.width, base=const.base)
                values[name] = const
        return values

    def decl_width(self, name: str) -> Optional[int]:
        """Width of a declared port or net, or None if undeclared."""
        p = self.port(name)
        if p is not None:
            return p.width
        n = self.net(name)
        if n is not None:
            return n.width
        return None

    def declared_names(self) -> set[str]:
        names = {p.name for p in self.ports} | {n.name for n in self.nets}
        names.update(self.param_values())
        return names


@dataclass(frozen=True)
class RtlDesign:
    modules: tuple[RtlModule, ...]
    source_name: str = field(default="<memory>", compare=False)

    def module(self, name: str) -> Optional[RtlModule]:
        for m in self.modules:
            if m.name == name:
                return m
        return None

    def replace_module(self, updated: RtlModule) -> "RtlDesign":
        mods = tuple(updated if m.name == updated.name else m for m in self.modules)
        return replace(self, modules=mods)


# ---------------------------------------------------------------------------
# Memory primitive
# ---------------------------------------------------------------------------

# The only memory construct in the subset: a synchronous dual-port RAM
# with one write port and one registered read port. Instantiating this
# name needs no in-design definition. Reading and writing the same
# address in one cycle returns the old data.
RAM_PRIMITIVE = "ram_dp"

RAM_ADDR_WIDTH = 12
RAM_DATA_WIDTH = 16
RAM_DEPTH = 1 << RAM_ADDR_WIDTH

# port name -> (direction, width)
RAM_PORTS: dict[str, tuple[str, int]] = {
    "clk": ("input", 1),
    "we_a": ("input", 1),
    "addr_a": ("input", RAM_ADDR_WIDTH),
    "din_a": ("input", RAM_DATA_WIDTH),
    "addr_b": ("input", RAM_ADDR_WIDTH),
    "dout_b": ("output", RAM_DATA_WIDTH),
}


def mask(width: int) -> int:
    return (1 << width) - 1
