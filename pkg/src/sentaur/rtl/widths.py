"""Expression width resolution for a module scope.

Width rules: comparison operands must match widths exactly; arithmetic
results truncate to the destination width; bare decimal literals (and
unsized localparams) adopt the width of the other operand in relational
contexts. Logical operators and comparisons are 1 bit wide.
"""

from __future__ import annotations

from typing import Optional

from sentaur.rtl.ast import (
    Binary,
    BitSelect,
    Concat,
    Const,
    Ident,
    PartSelect,
    RtlModule,
    Ternary,
    Unary,
)


class WidthEnv:
    """Widths of declared names in one module; localparams resolve to
    their constant's width (None when written unsized)."""

    def __init__(self, module: RtlModule):
        self.widths: dict[str, Optional[int]] = {}
        for p in module.ports:
            self.widths[p.name] = p.width
        for n in module.nets:
            self.widths[n.name] = n.width
        self.params = module.param_values()
        for name, const in self.params.items():
            self.widths[name] = const.width

    def width_of(self, expr) -> Optional[int]:
        """Resolved width, or None for context-adopting operands."""
        if isinstance(expr, Const):
            return expr.width
        if isinstance(expr, Ident):
            return self.widths.get(expr.name)
        if isinstance(expr, Unary):
            if expr.op == "!":
                return 1
            return self.width_of(expr.operand)
        if isinstance(expr, Binary):
            if expr.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
                return 1
            return _max_width(self.width_of(expr.left), self.width_of(expr.right))
        if isinstance(expr, Ternary):
            return _max_width(self.width_of(expr.then_val), self.width_of(expr.else_val))
        if isinstance(expr, BitSelect):
            return 1
        if isinstance(expr, PartSelect):
            return expr.msb - expr.lsb + 1
        if isinstance(expr, Concat):
            total = 0
            for p in expr.parts:
                w = self.width_of(p)
                if w is None:
                    return None
                total += w
            return total
        raise TypeError(f"not an expression: {expr!r}")


def _max_width(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)
