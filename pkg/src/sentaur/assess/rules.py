"""Deterministic structural rules for the four assessment categories.

The rules key on structure, never on names, so adversarial renaming of
every identifier leaves the flag row unchanged. They deliberately err
toward flagging: scrutiny is cheaper than a missed insertion.

logic  -- a conditional site (ternary, if, or case) whose controlling
          expression depends, through combinational logic, on a
          comparison against a constant, and which gates an assignment
          that can reach a primary output. Case statements count as
          constant-equality guards.
signal -- a non-port net whose only influence on the outputs runs
          through the conditions of flagged guards: dormant in normal
          operation. RAM primitive contents count as reaching the read
          port, so normal datapaths stay live.
fsm    -- a registered state variable whose combinational next-state
          case compares some non-state net against two or more distinct
          constants while stepping through distinct states: the shape
          of a sequence detector.
io     -- a top-level input that (combinationally) feeds the increment
          of a monotone event counter whose value flows into a flagged
          guard condition. Wrapping counters (value compared to a
          constant inside their own update process and reset to a
          constant) are timers, not event counters, and do not count.
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
    RtlDesign,
    Span,
    Ternary,
    COMPARE_OPS,
    expr_idents,
    walk_expr,
    walk_stmts,
)
from sentaur.rtl.elaborate import ElaboratedDesign, FlatAssign, elaborate

CATEGORIES = ("io", "fsm", "logic", "signal")


@dataclass(frozen=True)
class Finding:
    category: str
    nets: tuple[str, ...]
    span: Span
    rationale: str


@dataclass
class AssessmentReport:
    design: str
    top: str
    flags: dict[str, bool]
    findings: list[Finding]
    metrics: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# expression predicates
# ---------------------------------------------------------------------------


def _has_const_compare(expr) -> bool:
    for node in walk_expr(expr):
        if isinstance(node, Binary) and node.op in COMPARE_OPS:
            if isinstance(node.left, Const) or isinstance(node.right, Const):
                return True
    return False


@dataclass(frozen=True)
class _Site:
    """One conditional construct: condition expression, the nets whose
    assignments it gates, and where it lives."""

    cond_reads: tuple[str, ...]
    cond_has_cc: bool
    gated: tuple[str, ...]
    span: Span
    kind: str  # ternary | if | case


def _expr_sites(expr, gated: tuple[str, ...], span: Span, out: list[_Site]):
    for node in walk_expr(expr):
        if isinstance(node, Ternary):
            out.append(
                _Site(
                    cond_reads=tuple(sorted(expr_idents(node.cond))),
                    cond_has_cc=_has_const_compare(node.cond),
                    gated=gated,
                    span=span,
                    kind="ternary",
                )
            )


def _assigned_in(body) -> tuple[str, ...]:
    return tuple(
        sorted(
            {
                s.lhs.name if isinstance(s.lhs, Ident) else s.lhs.base
                for s in walk_stmts(body)
                if isinstance(s, Assign)
            }
        )
    )


def _body_sites(body, span: Span, out: list[_Site]):
    for stmt in body:
        if isinstance(stmt, Assign):
            target = (
                stmt.lhs.name if isinstance(stmt.lhs, Ident) else stmt.lhs.base
            )
            _expr_sites(stmt.rhs, (target,), span, out)
        elif isinstance(stmt, IfStmt):
            gated = _assigned_in(stmt.then_body) + (
                _assigned_in(stmt.else_body) if stmt.else_body else ()
            )
            out.append(
                _Site(
                    cond_reads=tuple(sorted(expr_idents(stmt.cond))),
                    cond_has_cc=_has_const_compare(stmt.cond),
                    gated=tuple(sorted(set(gated))),
                    span=stmt.span if stmt.span else span,
                    kind="if",
                )
            )
            _expr_sites(stmt.cond, tuple(sorted(set(gated))), span, out)
            _body_sites(stmt.then_body, span, out)
            if stmt.else_body:
                _body_sites(stmt.else_body, span, out)
        elif isinstance(stmt, CaseStmt):
            gated = []
            label_const = False
            for arm in stmt.arms:
                gated += list(_assigned_in(arm.body))
                label_const = label_const or any(
                    isinstance(l, Const) for l in arm.labels
                )
            if stmt.default_body:
                gated += list(_assigned_in(stmt.default_body))
            out.append(
                _Site(
                    cond_reads=tuple(sorted(expr_idents(stmt.scrutinee))),
                    cond_has_cc=label_const or _has_const_compare(stmt.scrutinee),
                    gated=tuple(sorted(set(gated))),
                    span=stmt.span if stmt.span else span,
                    kind="case",
                )
            )
            for arm in stmt.arms:
                _body_sites(arm.body, span, out)
            if stmt.default_body:
                _body_sites(stmt.default_body, span, out)


# ---------------------------------------------------------------------------
# flat-graph facts
# ---------------------------------------------------------------------------


class _Facts:
    def __init__(self, elab: ElaboratedDesign):
        self.elab = elab
        self.sites: list[_Site] = []
        for a in elab.assigns:
            _expr_sites(a.rhs, (a.lhs,), a.span, self.sites)
        for proc in elab.comb_procs + elab.clocked_procs:
            _body_sites(proc.body, proc.span, self.sites)

        # comb dependency edges (stop at registers, inputs, RAM outputs)
        self.comb_deps: dict[str, tuple[str, ...]] = {}
        self.direct_cc: dict[str, bool] = {}
        for a in elab.assigns:
            self.comb_deps[a.lhs] = tuple(sorted(expr_idents(a.rhs)))
            self.direct_cc[a.lhs] = _has_const_compare(a.rhs)
        for proc in elab.comb_procs:
            has_cc = False
            for stmt in walk_stmts(proc.body):
                if isinstance(stmt, Assign) and _has_const_compare(stmt.rhs):
                    has_cc = True
                elif isinstance(stmt, IfStmt) and _has_const_compare(stmt.cond):
                    has_cc = True
                elif isinstance(stmt, CaseStmt) and any(
                    isinstance(l, Const) for arm in stmt.arms for l in arm.labels
                ):
                    has_cc = True
            for net in proc.assigned:
                self.comb_deps[net] = proc.reads
                self.direct_cc[net] = has_cc

        self._cc_memo: dict[str, bool] = {}

        # forward edges: reader graph with guard-condition classification
        flagged = self.flagged_sites()
        guard_cond_reads: set[tuple[str, str]] = set()  # (src, gated net)
        self.normal_fwd: dict[str, set[str]] = {}
        self.all_fwd: dict[str, set[str]] = {}

        def add_edge(src: str, dst: str, normal: bool):
            self.all_fwd.setdefault(src, set()).add(dst)
            if normal:
                self.normal_fwd.setdefault(src, set()).add(dst)

        flagged_cond_by_target: dict[str, set[str]] = {}
        for site in flagged:
            for dst in site.gated:
                flagged_cond_by_target.setdefault(dst, set()).update(site.cond_reads)

        for a in elab.assigns:
            conds = flagged_cond_by_target.get(a.lhs, set())
            for src in expr_idents(a.rhs):
                add_edge(src, a.lhs, normal=src not in conds)
        for proc in elab.comb_procs + elab.clocked_procs:
            for dst in proc.assigned:
                conds = flagged_cond_by_target.get(dst, set())
                for src in proc.reads:
                    add_edge(src, dst, normal=src not in conds)
        for ram in elab.rams:
            dout = ram.conns["dout_b"]
            for port in ("din_a", "addr_a", "addr_b", "we_a"):
                add_edge(ram.conns[port], dout, normal=True)

        self.guard_cond_nets: set[str] = set()
        for site in flagged:
            self.guard_cond_nets.update(site.cond_reads)

    # -- const-compare cones ------------------------------------------------

    def cc_cone(self, net: str) -> bool:
        memo = self._cc_memo
        if net in memo:
            return memo[net]
        memo[net] = False  # cycle guard; comb graph is acyclic anyway
        result = self.direct_cc.get(net, False)
        if not result:
            for dep in self.comb_deps.get(net, ()):
                if self.cc_cone(dep):
                    result = True
                    break
        memo[net] = result
        return result

    def cond_flagged(self, site: _Site) -> bool:
        if site.cond_has_cc:
            return True
        return any(self.cc_cone(net) for net in site.cond_reads)

    def output_reachable(self) -> set[str]:
        return self._reverse_reach(self.all_fwd)

    def normally_live(self) -> set[str]:
        return self._reverse_reach(self.normal_fwd)

    def _reverse_reach(self, fwd: dict[str, set[str]]) -> set[str]:
        back: dict[str, set[str]] = {}
        for src, dsts in fwd.items():
            for dst in dsts:
                back.setdefault(dst, set()).add(src)
        seen = set(self.elab.outputs)
        work = list(self.elab.outputs)
        while work:
            net = work.pop()
            for src in back.get(net, ()):
                if src not in seen:
                    seen.add(src)
                    work.append(src)
        return seen

    def flagged_sites(self) -> list[_Site]:
        cached = getattr(self, "_flagged", None)
        if cached is not None:
            return cached
        reach = self._output_reach_all()
        flagged = [
            site
            for site in self.sites
            if self.cond_flagged(site) and any(g in reach for g in site.gated)
        ]
        self._flagged = flagged
        return flagged

    def _output_reach_all(self) -> set[str]:
        cached = getattr(self, "_reach_all", None)
        if cached is not None:
            return cached
        fwd: dict[str, set[str]] = {}

        def add(src, dst):
            fwd.setdefault(src, set()).add(dst)

        for a in self.elab.assigns:
            for src in expr_idents(a.rhs):
                add(src, a.lhs)
        for proc in self.elab.comb_procs + self.elab.clocked_procs:
            for dst in proc.assigned:
                for src in proc.reads:
                    add(src, dst)
        for ram in self.elab.rams:
            dout = ram.conns["dout_b"]
            for port in ("din_a", "addr_a", "addr_b", "we_a"):
                add(ram.conns[port], dout)
        back: dict[str, set[str]] = {}
        for src, dsts in fwd.items():
            for dst in dsts:
                back.setdefault(dst, set()).add(src)
        seen = set(self.elab.outputs)
        work = list(self.elab.outputs)
        while work:
            net = work.pop()
            for src in back.get(net, ()):
                if src not in seen:
                    seen.add(src)
                    work.append(src)
        self._reach_all = seen
        return seen

    def ancestors(self, targets: set[str]) -> set[str]:
        back: dict[str, set[str]] = {}
        for src, dsts in self.all_fwd.items():
            for dst in dsts:
                back.setdefault(dst, set()).add(src)
        seen = set(targets)
        work = list(targets)
        while work:
            net = work.pop()
            for src in back.get(net, ()):
                if src not in seen:
                    seen.add(src)
                    work.append(src)
        return seen

    def comb_support(self, nets) -> set[str]:
        """Transitive combinational support (stops at registers/inputs)."""
        seen: set[str] = set()
        work = list(nets)
        while work:
            net = work.pop()
            if net in seen:
                continue
            seen.add(net)
            work.extend(self.comb_deps.get(net, ()))
        return seen


# ---------------------------------------------------------------------------
# category passes
# ---------------------------------------------------------------------------


def _logic_findings(facts: _Facts) -> list[Finding]:
    findings = []
    for site in facts.flagged_sites():
        nets = tuple(sorted(set(site.cond_reads) | set(site.gated)))
        findings.append(
            Finding(
                category="logic",
                nets=nets,
                span=site.span,
                rationale=(
                    f"{site.kind} guard conditioned on a constant comparison "
                    f"gates assignment(s) to {', '.join(site.gated)} on the "
                    "output path"
                ),
            )
        )
    return findings


def _signal_findings(facts: _Facts) -> list[Finding]:
    elab = facts.elab
    live = facts.normally_live()
    cone = facts.ancestors(set(facts.guard_cond_nets))
    ports = set(elab.inputs) | set(elab.outputs)
    flagged = sorted(
        net
        for net, _ in elab.flat_nets
        if net not in ports
        and net not in live
        and (net in cone or net in facts.guard_cond_nets)
    )
    if not flagged:
        return []
    return [
        Finding(
            category="signal",
            nets=tuple(flagged),
            span=Span(),
            rationale=(
                "net(s) influence the outputs only through guarded trigger "
                "conditions; dormant in normal operation"
            ),
        )
    ]


def _fsm_findings(facts: _Facts) -> list[Finding]:
    elab = facts.elab
    findings = []
    # registered state var R updated from comb net N under the reset idiom
    pairs: list[tuple[str, str, Span]] = []
    for proc in elab.clocked_procs:
        for stmt in walk_stmts(proc.body):
            if (
                isinstance(stmt, Assign)
                and isinstance(stmt.lhs, Ident)
                and isinstance(stmt.rhs, Ident)
                and stmt.lhs.name != stmt.rhs.name
            ):
                pairs.append((stmt.lhs.name, stmt.rhs.name, proc.span))
    for reg, nxt, _ in pairs:
        for proc in elab.comb_procs:
            if nxt not in proc.assigned:
                continue
            for stmt in walk_stmts(proc.body):
                if not isinstance(stmt, CaseStmt):
                    continue
                if not (
                    isinstance(stmt.scrutinee, Ident)
                    and stmt.scrutinee.name == reg
                ):
                    continue
                watch_consts: dict[str, set[int]] = {}
                progressing = 0
                for arm in stmt.arms:
                    arm_labels = {
                        l.value for l in arm.labels if isinstance(l, Const)
                    }
                    for inner in walk_stmts(arm.body):
                        if not isinstance(inner, IfStmt):
                            continue
                        for node in walk_expr(inner.cond):
                            if (
                                isinstance(node, Binary)
                                and node.op == "=="
                                and isinstance(node.left, Ident)
                                and isinstance(node.right, Const)
                                and node.left.name not in (reg, nxt)
                            ):
                                assigns_next = [
                                    s
                                    for s in walk_stmts(inner.then_body)
                                    if isinstance(s, Assign)
                                    and isinstance(s.lhs, Ident)
                                    and s.lhs.name == nxt
                                    and isinstance(s.rhs, Const)
                                ]
                                moves = any(
                                    s.rhs.value not in arm_labels
                                    for s in assigns_next
                                )
                                if assigns_next and moves:
                                    watch_consts.setdefault(
                                        node.left.name, set()
                                    ).add(node.right.value)
                                    progressing += 1
                for watch, consts in sorted(watch_consts.items()):
                    if len(consts) >= 2:
                        findings.append(
                            Finding(
                                category="fsm",
                                nets=(reg, nxt),
                                span=stmt.span,
                                rationale=(
                                    f"state register stepped through "
                                    f"{len(consts)} distinct comparison "
                                    "constants on a non-state net: sequence-"
                                    "detector shape"
                                ),
                            )
                        )
    return findings


def _io_findings(facts: _Facts) -> list[Finding]:
    elab = facts.elab
    findings = []
    excluded = set()
    if elab.clock_root:
        excluded.add(elab.clock_root)
    for rnet in elab.reset_nets:
        excluded.add(rnet)
        drv = elab.drivers.get(rnet)
        while isinstance(drv, FlatAssign) and isinstance(drv.rhs, Ident):
            excluded.add(drv.rhs.name)
            drv = elab.drivers.get(drv.rhs.name)

    guard_cone = facts.ancestors(set(facts.guard_cond_nets)) | set(
        facts.guard_cond_nets
    )
    inputs = set(elab.inputs)

    for proc in elab.clocked_procs:
        assigned = set(proc.assigned)
        for counter in sorted(assigned):
            adds: list = []
            wraps = False
            conds: list = []

            def visit(body, enclosing):
                nonlocal wraps
                for stmt in body:
                    if isinstance(stmt, Assign):
                        if (
                            isinstance(stmt.lhs, Ident)
                            and stmt.lhs.name == counter
                        ):
                            for node in walk_expr(stmt.rhs):
                                if isinstance(node, Binary) and node.op == "+":
                                    sides = (node.left, node.right)
                                    if any(
                                        isinstance(s, Ident) and s.name == counter
                                        for s in sides
                                    ):
                                        step = (
                                            node.right
                                            if isinstance(node.left, Ident)
                                            and node.left.name == counter
                                            else node.left
                                        )
                                        adds.append((step, list(enclosing)))
                        for node in walk_expr(stmt.rhs):
                            if (
                                isinstance(node, Binary)
                                and node.op in COMPARE_OPS
                                and any(
                                    isinstance(s, Ident) and s.name == counter
                                    for s in (node.left, node.right)
                                )
                                and any(
                                    isinstance(s, Const)
                                    for s in (node.left, node.right)
                                )
                            ):
                                wraps = True
                    elif isinstance(stmt, IfStmt):
                        for node in walk_expr(stmt.cond):
                            if (
                                isinstance(node, Binary)
                                and node.op in COMPARE_OPS
                                and any(
                                    isinstance(s, Ident) and s.name == counter
                                    for s in (node.left, node.right)
                                )
                                and any(
                                    isinstance(s, Const)
                                    for s in (node.left, node.right)
                                )
                            ):
                                wraps = True
                        visit(stmt.then_body, enclosing + [stmt.cond])
                        if stmt.else_body:
                            visit(stmt.else_body, enclosing + [stmt.cond])
                    elif isinstance(stmt, CaseStmt):
                        for arm in stmt.arms:
                            visit(arm.body, enclosing + [stmt.scrutinee])
                        if stmt.default_body:
                            visit(stmt.default_body, enclosing + [stmt.scrutinee])

            visit(proc.body, [])
            if not adds or wraps:
                continue
            if counter not in guard_cone:
                continue
            support: set[str] = set()
            for step, enclosing in adds:
                support |= facts.comb_support(expr_idents(step))
                for cond in enclosing[1:]:  # skip the outermost reset guard
                    support |= facts.comb_support(expr_idents(cond))
                if enclosing:
                    head = enclosing[0]
                    if not (
                        isinstance(head, Ident) and head.name in excluded
                    ):
                        support |= facts.comb_support(expr_idents(head))
            hits = sorted((support & inputs) - excluded)
            for name in hits:
                findings.append(
                    Finding(
                        category="io",
                        nets=(name, counter),
                        span=proc.span,
                        rationale=(
                            f"input feeds the increment of event counter "
                            f"{counter!r} whose value conditions a guarded "
                            "output path"
                        ),
                    )
                )
    return findings


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def assess(design: RtlDesign, top: str, metrics: list | None = None) -> AssessmentReport:
    """Assess the elaborated design; flags[c] is true iff at least one
    finding landed in category c."""
    elab = elaborate(design, top)
    facts = _Facts(elab)

    findings: list[Finding] = []
    findings += _io_findings(facts)
    findings += _fsm_findings(facts)
    findings += _logic_findings(facts)
    findings += _signal_findings(facts)

    flags = {c: any(f.category == c for f in findings) for c in CATEGORIES}
    return AssessmentReport(
        design=design.source_name,
        top=top,
        flags=flags,
        findings=findings,
        metrics=list(metrics or []),
    )
