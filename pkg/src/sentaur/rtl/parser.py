"""Recursive-descent parser producing RtlDesign trees.

Anything outside the supported grammar raises UnsupportedConstruct or
RtlSyntaxError with the first offending location; there is no partial
recovery. Per-module semantic checks (unique names, declared
identifiers, single drivers, wire/reg driver kinds) run here so a
successfully parsed design satisfies the module invariants.
"""

from __future__ import annotations

from sentaur.errors import MultiDriver, RtlSyntaxError
from sentaur.rtl import ast
from sentaur.rtl.ast import (
    AlwaysBlock,
    Assign,
    BitSelect,
    CaseArm,
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
    PortDecl,
    RtlDesign,
    RtlModule,
    Span,
    Ternary,
    Unary,
    Binary,
    expr_idents,
    lvalue_base,
    walk_stmts,
)
from sentaur.rtl.lexer import Token, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, expected: str) -> RtlSyntaxError:
        tok = self.peek()
        got = tok.text if tok.kind != "eof" else "end of input"
        return RtlSyntaxError(tok.line, tok.col, f"{expected} (got {got!r})")

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.error(text if text is not None else kind)
        return self.next()

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    # -- top level ----------------------------------------------------------

    def parse_design(self, source_name: str) -> RtlDesign:
        modules = []
        names = set()
        while not self.at("eof"):
            mod = self.parse_module()
            if mod.name in names:
                raise RtlSyntaxError(
                    mod.span.line_start, 1, f"unique module name (duplicate {mod.name!r})"
                )
            names.add(mod.name)
            modules.append(mod)
        if not modules:
            tok = self.peek()
            raise RtlSyntaxError(tok.line, tok.col, "module")
        return RtlDesign(modules=tuple(modules), source_name=source_name)

    def parse_module(self) -> RtlModule:
        start = self.expect("kw", "module")
        name = self.expect("id").text
        self.expect("op", "(")
        ports: list[PortDecl] = []
        if not self.at("op", ")"):
            while True:
                ports.append(self.parse_port_decl())
                if not self.accept("op", ","):
                    break
        self.expect("op", ")")
        self.expect("op", ";")

        nets: list[NetDecl] = []
        params: list[LocalParam] = []
        assigns: list[ContinuousAssign] = []
        processes: list[AlwaysBlock] = []
        instances: list[ModuleInst] = []
        order: list = []
        while not self.at("kw", "endmodule"):
            if self.at("eof"):
                raise self.error("endmodule")
            item = self.parse_item()
            order.append(item)
            if isinstance(item, list):  # comma net declaration group
                nets.extend(item)
                order[-1:] = item
            elif isinstance(item, NetDecl):
                nets.append(item)
            elif isinstance(item, LocalParam):
                params.append(item)
            elif isinstance(item, ContinuousAssign):
                assigns.append(item)
            elif isinstance(item, AlwaysBlock):
                processes.append(item)
            elif isinstance(item, ModuleInst):
                instances.append(item)
        end = self.expect("kw", "endmodule")

        module = RtlModule(
            name=name,
            ports=tuple(ports),
            nets=tuple(nets),
            params=tuple(params),
            assigns=tuple(assigns),
            processes=tuple(processes),
            instances=tuple(instances),
            item_order=tuple(order),
            span=Span(start.line, end.line),
        )
        _validate_module(module)
        return module

    def parse_port_decl(self) -> PortDecl:
        tok = self.peek()
        if not (self.at("kw", "input") or self.at("kw", "output")):
            raise self.error("input or output")
        direction = self.next().text
        kind = "wire"
        if self.at("kw", "wire") or self.at("kw", "reg"):
            kind = self.next().text
        width = self.parse_optional_range()
        name = self.expect("id").text
        if direction == "input" and kind == "reg":
            raise RtlSyntaxError(tok.line, tok.col, "wire kind for input port")
        return PortDecl(name, direction, kind, width, span=Span(tok.line, tok.line))

    def parse_optional_range(self) -> int:
        """`[msb:0]` -> msb+1 bits; absent -> 1 bit."""
        if not self.at("op", "["):
            return 1
        tok = self.next()
        msb = self.parse_plain_number()
        self.expect("op", ":")
        lsb = self.parse_plain_number()
        self.expect("op", "]")
        if lsb != 0:
            raise RtlSyntaxError(tok.line, tok.col, "range of the form [msb:0]")
        return msb + 1

    def parse_plain_number(self) -> int:
        tok = self.expect("num")
        value, width, _ = tok.value
        if width is not None:
            raise RtlSyntaxError(tok.line, tok.col, "plain decimal")
        return value

    # -- module items --------------------------------------------------------

    def parse_item(self):
        if self.at("kw", "wire") or self.at("kw", "reg"):
            return self.parse_net_decl()
        if self.at("kw", "localparam"):
            return self.parse_localparam()
        if self.at("kw", "assign"):
            return self.parse_assign()
        if self.at("kw", "always"):
            return self.parse_always()
        if self.at("id"):
            return self.parse_instance()
        raise self.error("module item")

    def parse_net_decl(self):
        tok = self.next()
        kind = tok.text
        width = self.parse_optional_range()
        decls = []
        while True:
            name_tok = self.expect("id")
            decls.append(
                NetDecl(name_tok.text, kind, width, span=Span(tok.line, tok.line))
            )
            if not self.accept("op", ","):
                break
        self.expect("op", ";")
        if len(decls) == 1:
            return decls[0]
        return decls

    def parse_localparam(self) -> LocalParam:
        tok = self.next()
        width = None
        if self.at("op", "["):
            width = self.parse_optional_range()
        items = []
        while True:
            name = self.expect("id").text
            self.expect("op", "=")
            const = self.parse_const_literal()
            items.append((name, const))
            if not self.accept("op", ","):
                break
        semi = self.expect("op", ";")
        return LocalParam(width, tuple(items), span=Span(tok.line, semi.line))

    def parse_const_literal(self) -> Const:
        tok = self.expect("num")
        value, width, base = tok.value
        return Const(value, width, base=base, span=Span(tok.line, tok.line))

    def parse_assign(self) -> ContinuousAssign:
        tok = self.next()
        lhs = self.parse_lvalue()
        self.expect("op", "=")
        rhs = self.parse_expr()
        semi = self.expect("op", ";")
        return ContinuousAssign(lhs, rhs, span=Span(tok.line, semi.line))

    def parse_always(self) -> AlwaysBlock:
        tok = self.next()
        self.expect("op", "@")
        self.expect("op", "(")
        if self.accept("kw", "posedge"):
            clock = self.expect("id").text
            self.expect("op", ")")
            body = self.parse_stmt_block()
            block = AlwaysBlock(
                "clocked",
                tuple(body),
                clock=clock,
                span=Span(tok.line, self.tokens[self.pos - 1].line),
            )
        elif self.accept("op", "*"):
            self.expect("op", ")")
            body = self.parse_stmt_block()
            block = AlwaysBlock(
                "comb", tuple(body), span=Span(tok.line, self.tokens[self.pos - 1].line)
            )
        else:
            sens = [self.expect("id").text]
            while self.accept("kw", "or") or self.accept("op", ","):
                sens.append(self.expect("id").text)
            self.expect("op", ")")
            body = self.parse_stmt_block()
            block = AlwaysBlock(
                "comb",
                tuple(body),
                sensitivity=tuple(sens),
                span=Span(tok.line, self.tokens[self.pos - 1].line),
            )
        _check_assign_styles(block)
        return block

    def parse_stmt_block(self) -> list:
        """One statement, or a begin/end group flattened to a list."""
        if self.accept("kw", "begin"):
            stmts = []
            while not self.at("kw", "end"):
                if self.at("eof"):
                    raise self.error("end")
                stmts.extend(self.parse_stmt_block())
            self.next()
            return stmts
        return [self.parse_stmt()]

    def parse_stmt(self):
        if self.at("kw", "if"):
            tok = self.next()
            self.expect("op", "(")
            cond = self.parse_expr()
            self.expect("op", ")")
            then_body = tuple(self.parse_stmt_block())
            else_body = None
            if self.accept("kw", "else"):
                else_body = tuple(self.parse_stmt_block())
            return IfStmt(cond, then_body, else_body, span=Span(tok.line, tok.line))
        if self.at("kw", "case"):
            return self.parse_case()
        if self.at("id"):
            tok = self.peek()
            lhs = self.parse_lvalue()
            if self.accept("op", "="):
                blocking = True
            elif self.accept("op", "<="):
                blocking = False
            else:
                raise self.error("= or <=")
            rhs = self.parse_expr()
            semi = self.expect("op", ";")
            return Assign(lhs, rhs, blocking, span=Span(tok.line, semi.line))
        raise self.error("statement")

    def parse_case(self) -> CaseStmt:
        tok = self.next()
        self.expect("op", "(")
        scrutinee = self.parse_expr()
        self.expect("op", ")")
        arms: list[CaseArm] = []
        default_body = None
        while not self.at("kw", "endcase"):
            if self.at("eof"):
                raise self.error("endcase")
            if self.accept("kw", "default"):
                if default_body is not None:
                    raise self.error("single default arm")
                self.expect("op", ":")
                default_body = tuple(self.parse_stmt_block())
                continue
            arm_tok = self.peek()
            labels = [self.parse_case_label()]
            while self.accept("op", ","):
                labels.append(self.parse_case_label())
            self.expect("op", ":")
            body = tuple(self.parse_stmt_block())
            arms.append(CaseArm(tuple(labels), body, span=Span(arm_tok.line, arm_tok.line)))
        end = self.next()
        return CaseStmt(scrutinee, tuple(arms), default_body, span=Span(tok.line, end.line))

    def parse_case_label(self):
        if self.at("num"):
            return self.parse_const_literal()
        tok = self.expect("id")
        return Ident(tok.text, span=Span(tok.line, tok.line))

    def parse_instance(self) -> ModuleInst:
        mod_tok = self.expect("id")
        inst_tok = self.expect("id")
        self.expect("op", "(")
        conns: list[tuple[str, object]] = []
        if not self.at("op", ")"):
            while True:
                if not self.at("op", "."):
                    raise self.error("named port connection (.port(expr))")
                self.next()
                port = self.expect("id").text
                self.expect("op", "(")
                expr = None
                if not self.at("op", ")"):
                    expr = self.parse_expr()
                self.expect("op", ")")
                conns.append((port, expr))
                if not self.accept("op", ","):
                    break
        self.expect("op", ")")
        semi = self.expect("op", ";")
        return ModuleInst(
            mod_tok.text, inst_tok.text, tuple(conns), span=Span(mod_tok.line, semi.line)
        )

    # -- expressions ---------------------------------------------------------

    def parse_lvalue(self):
        tok = self.expect("id")
        if self.at("op", "["):
            self.next()
            first = self.parse_expr()
            if self.accept("op", ":"):
                msb = _const_int(first, tok)
                lsb_tok = self.peek()
                lsb = _const_int(self.parse_expr(), lsb_tok)
                self.expect("op", "]")
                return PartSelect(tok.text, msb, lsb, span=Span(tok.line, tok.line))
            self.expect("op", "]")
            return BitSelect(tok.text, first, span=Span(tok.line, tok.line))
        return Ident(tok.text, span=Span(tok.line, tok.line))

    def parse_expr(self):
        return self.parse_ternary()

    def parse_ternary(self):
        cond = self.parse_binary(0)
        if self.accept("op", "?"):
            then_val = self.parse_ternary()
            self.expect("op", ":")
            else_val = self.parse_ternary()
            return Ternary(cond, then_val, else_val, span=cond.span)
        return cond

    # binding tiers, loosest first
    _TIERS = (
        ("||",),
        ("&&",),
        ("|",),
        ("^",),
        ("&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("+", "-"),
    )

    def parse_binary(self, tier: int):
        if tier >= len(self._TIERS):
            return self.parse_unary()
        left = self.parse_binary(tier + 1)
        ops = self._TIERS[tier]
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.next().text
            right = self.parse_binary(tier + 1)
            left = Binary(op, left, right, span=left.span)
        return left

    def parse_unary(self):
        if self.at("op", "~") or self.at("op", "!"):
            tok = self.next()
            operand = self.parse_unary()
            return Unary(tok.text, operand, span=Span(tok.line, tok.line))
        return self.parse_primary()

    def parse_primary(self):
        if self.at("num"):
            return self.parse_const_literal()
        if self.at("op", "("):
            self.next()
            inner = self.parse_expr()
            self.expect("op", ")")
            return inner
        if self.at("op", "{"):
            tok = self.next()
            parts = [self.parse_expr()]
            while self.accept("op", ","):
                parts.append(self.parse_expr())
            self.expect("op", "}")
            return Concat(tuple(parts), span=Span(tok.line, tok.line))
        if self.at("id"):
            return self.parse_lvalue()
        raise self.error("expression")


def _const_int(expr, tok: Token) -> int:
    if not isinstance(expr, Const):
        raise RtlSyntaxError(tok.line, tok.col, "constant select bounds")
    return expr.value


def _check_assign_styles(block: AlwaysBlock) -> None:
    """Clocked bodies use <= only; combinational bodies use = only."""
    for stmt in walk_stmts(block.body):
        if isinstance(stmt, Assign):
            if block.kind == "clocked" and stmt.blocking:
                raise RtlSyntaxError(
                    stmt.span.line_start, 1, "nonblocking (<=) assignment in clocked block"
                )
            if block.kind == "comb" and not stmt.blocking:
                raise RtlSyntaxError(
                    stmt.span.line_start, 1, "blocking (=) assignment in combinational block"
                )


def _validate_module(module: RtlModule) -> None:
    # unique port/net names
    seen: dict[str, int] = {}
    for decl in list(module.ports) + list(module.nets):
        if decl.name in seen:
            raise RtlSyntaxError(
                decl.span.line_start, 1, f"unique name (duplicate {decl.name!r})"
            )
        seen[decl.name] = decl.span.line_start
    params = module.param_values()
    for name in params:
        if name in seen:
            raise RtlSyntaxError(1, 1, f"unique name (duplicate {name!r})")

    declared = module.declared_names()

    def check_ident(name: str, span: Span):
        if name not in declared:
            raise RtlSyntaxError(
                span.line_start, 1, f"declared identifier (got undeclared {name!r})"
            )

    def check_expr(expr):
        for name in sorted(expr_idents(expr)):
            check_ident(name, getattr(expr, "span", ast.NO_SPAN))

    # drivers: net -> list of (line, kind) pairs; at most one construct per net
    drivers: dict[str, list[tuple[int, str]]] = {}

    def add_driver(net: str, line: int, how: str):
        drivers.setdefault(net, []).append((line, how))

    for a in module.assigns:
        check_expr(a.rhs)
        base = lvalue_base(a.lhs)
        check_ident(base, a.span)
        add_driver(base, a.span.line_start, "assign")
    for proc in module.processes:
        assigned: set[str] = set()
        for stmt in walk_stmts(proc.body):
            if isinstance(stmt, Assign):
                base = lvalue_base(stmt.lhs)
                check_ident(base, stmt.span)
                check_expr(stmt.rhs)
                if isinstance(stmt.lhs, BitSelect):
                    check_expr(stmt.lhs.index)
                assigned.add(base)
            elif isinstance(stmt, IfStmt):
                check_expr(stmt.cond)
            elif isinstance(stmt, CaseStmt):
                check_expr(stmt.scrutinee)
                for arm in stmt.arms:
                    for label in arm.labels:
                        check_expr(label)
        if proc.kind == "clocked" and proc.clock is not None:
            check_ident(proc.clock, proc.span)
        for net in sorted(assigned):
            add_driver(net, proc.span.line_start, proc.kind)
    for inst in module.instances:
        for port, expr in inst.conns:
            if expr is not None:
                check_expr(expr)

    for net, sites in sorted(drivers.items()):
        if len(sites) > 1:
            raise MultiDriver(net, [line for line, _ in sites])
        line, how = sites[0]
        decl_kind = None
        port = module.port(net)
        if port is not None:
            if port.direction == "input":
                raise MultiDriver(net, [line])  # driving an input port
            decl_kind = port.kind
        else:
            decl = module.net(net)
            if decl is not None:
                decl_kind = decl.kind
        if decl_kind == "wire" and how in ("clocked", "comb"):
            raise RtlSyntaxError(line, 1, f"reg kind for procedurally assigned {net!r}")
        if decl_kind == "reg" and how == "assign":
            raise RtlSyntaxError(line, 1, f"wire kind for continuously assigned {net!r}")


def parse_verilog(source: str, source_name: str = "<memory>") -> RtlDesign:
    """Parse source text into an RtlDesign.

    Raises RtlSyntaxError, UnsupportedConstruct, or MultiDriver naming
    the first offending location.
    """
    tokens = tokenize(source)
    return _Parser(tokens).parse_design(source_name)
