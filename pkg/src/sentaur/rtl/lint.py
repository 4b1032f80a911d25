"""Static checks over a parsed module.

Rules:

* latch-inference -- a combinational process leaves some assigned net
  unassigned on at least one control path (if without else, or a case
  without default that does not enumerate all 2^width label values).
  The exhaustiveness check is exact, not heuristic.
* multi-driver -- a net driven by more than one construct (parse also
  rejects this; the rule exists for programmatically built modules).
* unreachable-arm -- a case arm all of whose label values already
  appeared in earlier arms.
* width-mismatch -- comparison operands or case labels whose resolved
  widths differ (unsized literals adopt the other side's width).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sentaur.rtl.ast import (
    Assign,
    Binary,
    CaseStmt,
    Const,
    Ident,
    IfStmt,
    RtlModule,
    Span,
    lvalue_base,
    walk_expr,
    walk_stmts,
)
from sentaur.rtl.widths import WidthEnv

COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class LintFinding:
    rule: str  # latch-inference | multi-driver | unreachable-arm | width-mismatch
    location: Span
    message: str
    net: str = field(default="", compare=False)


def _label_value(label, env: WidthEnv):
    """Constant value of a case label, resolving localparam names."""
    if isinstance(label, Const):
        return label.value
    if isinstance(label, Ident) and label.name in env.params:
        return env.params[label.name].value
    return None


def _covered_nets(body, env: WidthEnv) -> set[str]:
    """Nets assigned on every control path through body."""
    covered: set[str] = set()
    for stmt in body:
        if isinstance(stmt, Assign):
            covered.add(lvalue_base(stmt.lhs))
        elif isinstance(stmt, IfStmt):
            if stmt.else_body is not None:
                covered |= _covered_nets(stmt.then_body, env) & _covered_nets(
                    stmt.else_body, env
                )
        elif isinstance(stmt, CaseStmt):
            arm_sets = [_covered_nets(arm.body, env) for arm in stmt.arms]
            if stmt.default_body is not None:
                arm_sets.append(_covered_nets(stmt.default_body, env))
                if arm_sets:
                    common = set.intersection(*arm_sets)
                    covered |= common
            else:
                # exact exhaustiveness: all 2^width values enumerated
                width = env.width_of(stmt.scrutinee)
                values = set()
                for arm in stmt.arms:
                    for label in arm.labels:
                        v = _label_value(label, env)
                        if v is not None:
                            values.add(v)
                if width is not None and len(values) == (1 << width) and arm_sets:
                    covered |= set.intersection(*arm_sets)
    return covered


def _assigned_nets(body) -> dict[str, Span]:
    assigned: dict[str, Span] = {}
    for stmt in walk_stmts(body):
        if isinstance(stmt, Assign):
            assigned.setdefault(lvalue_base(stmt.lhs), stmt.span)
    return assigned


def _check_latches(module: RtlModule, env: WidthEnv, findings: list[LintFinding]):
    for proc in module.processes:
        if proc.kind != "comb":
            continue
        assigned = _assigned_nets(proc.body)
        covered = _covered_nets(proc.body, env)
        for net in assigned:
            if net not in covered:
                findings.append(
                    LintFinding(
                        "latch-inference",
                        proc.span,
                        f"'{net}' is not assigned on every path of a "
                        "combinational process; a latch would be inferred",
                        net=net,
                    )
                )


def _check_drivers(module: RtlModule, findings: list[LintFinding]):
    drivers: dict[str, list[Span]] = {}
    for a in module.assigns:
        drivers.setdefault(lvalue_base(a.lhs), []).append(a.span)
    for proc in module.processes:
        for net in sorted(_assigned_nets(proc.body)):
            drivers.setdefault(net, []).append(proc.span)
    for net, spans in sorted(drivers.items()):
        if len(spans) > 1:
            lines = ", ".join(str(s.line_start) for s in spans)
            findings.append(
                LintFinding(
                    "multi-driver",
                    spans[0],
                    f"'{net}' is driven by {len(spans)} constructs (lines {lines})",
                    net=net,
                )
            )


def _check_cases(module: RtlModule, env: WidthEnv, findings: list[LintFinding]):
    for proc in module.processes:
        for stmt in walk_stmts(proc.body):
            if not isinstance(stmt, CaseStmt):
                continue
            seen: set[int] = set()
            for arm in stmt.arms:
                values = [_label_value(l, env) for l in arm.labels]
                known = [v for v in values if v is not None]
                if known and all(v in seen for v in known):
                    findings.append(
                        LintFinding(
                            "unreachable-arm",
                            arm.span,
                            "case arm is unreachable; all its label values "
                            "appear in earlier arms",
                        )
                    )
                seen.update(known)


def _check_widths(module: RtlModule, env: WidthEnv, findings: list[LintFinding]):
    def check_expr(expr, where: Span):
        for node in walk_expr(expr):
            if isinstance(node, Binary) and node.op in COMPARE_OPS:
                lw = env.width_of(node.left)
                rw = env.width_of(node.right)
                if lw is not None and rw is not None and lw != rw:
                    findings.append(
                        LintFinding(
                            "width-mismatch",
                            node.span if node.span else where,
                            f"comparison mixes {lw}-bit and {rw}-bit operands",
                        )
                    )

    for a in module.assigns:
        check_expr(a.rhs, a.span)
    for proc in module.processes:
        for stmt in walk_stmts(proc.body):
            if isinstance(stmt, Assign):
                check_expr(stmt.rhs, stmt.span)
            elif isinstance(stmt, IfStmt):
                check_expr(stmt.cond, stmt.span)
            elif isinstance(stmt, CaseStmt):
                sw = env.width_of(stmt.scrutinee)
                check_expr(stmt.scrutinee, stmt.span)
                for arm in stmt.arms:
                    for label in arm.labels:
                        lw = env.width_of(label)
                        if sw is not None and lw is not None and lw != sw:
                            findings.append(
                                LintFinding(
                                    "width-mismatch",
                                    arm.span,
                                    f"case label width {lw} does not match "
                                    f"{sw}-bit scrutinee",
                                )
                            )


def lint(module: RtlModule) -> list[LintFinding]:
    """All findings for one module; empty means clean."""
    env = WidthEnv(module)
    findings: list[LintFinding] = []
    _check_latches(module, env, findings)
    _check_drivers(module, findings)
    _check_cases(module, env, findings)
    _check_widths(module, env, findings)
    return findings


def lint_design(design) -> list[LintFinding]:
    findings: list[LintFinding] = []
    for module in design.modules:
        findings.extend(lint(module))
    return findings
