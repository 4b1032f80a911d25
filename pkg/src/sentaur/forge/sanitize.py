"""Repair combinational processes with incomplete assignment coverage.

Every control path through a combinational process must assign each of
the process's nets, otherwise synthesis infers a latch and the circuit
stops matching its RTL simulation. The repair adds the missing
default/else arm assigning a hold value:

* Next-state style nets (the combinational process cases on the very
  register R the net feeds, and R follows the synchronous-reset idiom
  `if (r) R <= <const>; else R <= net;`) take R's reset expression:
  the designated idle constant.
* Any other net that feeds a register R via `R <= net` takes R itself
  (the register's current value), which behaviorally holds.
* Otherwise the hold value is not inferable and CannotInferHoldValue is
  raised rather than guessed.

Covered paths keep their behavior bit-for-bit; the repair only adds
arms that previously fell through.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from sentaur.errors import CannotInferHoldValue
from sentaur.rtl.ast import (
    Assign,
    CaseStmt,
    Const,
    Ident,
    IfStmt,
    RtlModule,
    Span,
    walk_stmts,
)
from sentaur.rtl.lint import _covered_nets, _assigned_nets
from sentaur.rtl.widths import WidthEnv


@dataclass(frozen=True)
class SanitizeFix:
    process_span: Span
    net: str
    kind: str  # "case-default" | "if-else" | "tail-assign"
    hold_text: str


def _cases_on(proc, reg: str) -> bool:
    for stmt in walk_stmts(proc.body):
        if isinstance(stmt, CaseStmt) and isinstance(stmt.scrutinee, Ident):
            if stmt.scrutinee.name == reg:
                return True
    return False


def _find_hold_expr(module: RtlModule, net: str, comb_proc):
    """Hold expression for a comb-driven net, per the rules above.

    A net is next-state style when its combinational process cases on
    the very register it feeds; only then is the reset constant the
    designated idle value.
    """
    for proc in module.processes:
        if proc.kind != "clocked":
            continue
        body = proc.body
        if (
            len(body) == 1
            and isinstance(body[0], IfStmt)
            and isinstance(body[0].cond, Ident)
            and body[0].else_body is not None
        ):
            reset_rhs = {}
            for stmt in body[0].then_body:
                if isinstance(stmt, Assign) and isinstance(stmt.lhs, Ident):
                    reset_rhs[stmt.lhs.name] = stmt.rhs
            for stmt in walk_stmts(body[0].else_body):
                if (
                    isinstance(stmt, Assign)
                    and isinstance(stmt.lhs, Ident)
                    and isinstance(stmt.rhs, Ident)
                    and stmt.rhs.name == net
                    and stmt.lhs.name in reset_rhs
                ):
                    reg = stmt.lhs.name
                    rhs = reset_rhs[reg]
                    if _cases_on(comb_proc, reg) and isinstance(rhs, (Const, Ident)):
                        return rhs
                    return Ident(reg)
    for proc in module.processes:
        if proc.kind != "clocked":
            continue
        for stmt in walk_stmts(proc.body):
            if (
                isinstance(stmt, Assign)
                and isinstance(stmt.lhs, Ident)
                and isinstance(stmt.rhs, Ident)
                and stmt.rhs.name == net
            ):
                return Ident(stmt.lhs.name)
    return None


def _repair_body(body: tuple, net: str, hold, env: WidthEnv, fixes: list, span: Span):
    """Return a body that assigns `net` on every path, least-invasively."""
    if net in _covered_nets(body, env):
        return body
    out = list(body)
    for i in reversed(range(len(out))):
        stmt = out[i]
        if net not in _assigned_nets([stmt]):
            continue
        if isinstance(stmt, IfStmt):
            then_body = _repair_body(stmt.then_body, net, hold, env, fixes, span)
            if stmt.else_body is None:
                fixes.append(SanitizeFix(span, net, "if-else", _hold_text(hold)))
                else_body = (Assign(Ident(net), hold, blocking=True),)
            else:
                else_body = _repair_body(stmt.else_body, net, hold, env, fixes, span)
            out[i] = replace(stmt, then_body=then_body, else_body=else_body)
            return tuple(out)
        if isinstance(stmt, CaseStmt):
            arms = tuple(
                replace(arm, body=_repair_body(arm.body, net, hold, env, fixes, span))
                for arm in stmt.arms
            )
            if stmt.default_body is None:
                fixes.append(SanitizeFix(span, net, "case-default", _hold_text(hold)))
                default = (Assign(Ident(net), hold, blocking=True),)
            else:
                default = _repair_body(stmt.default_body, net, hold, env, fixes, span)
            out[i] = replace(stmt, arms=arms, default_body=default)
            return tuple(out)
    # nothing on this path touches the net: assign the hold value at the end
    fixes.append(SanitizeFix(span, net, "tail-assign", _hold_text(hold)))
    out.append(Assign(Ident(net), hold, blocking=True))
    return tuple(out)


def _hold_text(expr) -> str:
    from sentaur.rtl.emit import emit_expr

    return emit_expr(expr)


def sanitize_fsm(module: RtlModule) -> tuple[RtlModule, list[SanitizeFix]]:
    """Repair every combinational coverage gap in the module.

    Idempotent: a clean module comes back unchanged with no fixes.
    """
    env = WidthEnv(module)
    fixes: list[SanitizeFix] = []
    new_processes = []
    changed = False
    for proc in module.processes:
        if proc.kind != "comb":
            new_processes.append(proc)
            continue
        assigned = _assigned_nets(proc.body)
        body = proc.body
        for net in assigned:
            if net in _covered_nets(body, env):
                continue
            hold = _find_hold_expr(module, net, proc)
            if hold is None:
                raise CannotInferHoldValue(
                    f"no register consumes {net!r}; cannot infer a hold value"
                )
            body = _repair_body(body, net, hold, env, fixes, proc.span)
        if body is not proc.body:
            changed = True
            new_processes.append(replace(proc, body=body))
        else:
            new_processes.append(proc)

    if not changed:
        return module, []
    by_old = dict(zip(module.processes, new_processes))
    order = tuple(by_old.get(item, item) for item in module.ordered_items())
    return (
        replace(module, processes=tuple(new_processes), item_order=order),
        fixes,
    )
