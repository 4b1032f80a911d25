"""Parse, represent, lint, print, and elaborate the supported Verilog subset."""

from sentaur.rtl.ast import (
    RtlDesign,
    RtlModule,
    PortDecl,
    NetDecl,
    LocalParam,
    ContinuousAssign,
    AlwaysBlock,
    ModuleInst,
    Const,
    Ident,
    Unary,
    Binary,
    Ternary,
    BitSelect,
    PartSelect,
    Concat,
    Assign,
    IfStmt,
    CaseStmt,
    CaseArm,
    Span,
    RAM_PRIMITIVE,
    RAM_PORTS,
)
from sentaur.rtl.parser import parse_verilog
from sentaur.rtl.emit import emit_verilog
from sentaur.rtl.lint import lint, LintFinding
from sentaur.rtl.elaborate import elaborate, cell_count, ElaboratedDesign

__all__ = [
    "RtlDesign",
    "RtlModule",
    "PortDecl",
    "NetDecl",
    "LocalParam",
    "ContinuousAssign",
    "AlwaysBlock",
    "ModuleInst",
    "Const",
    "Ident",
    "Unary",
    "Binary",
    "Ternary",
    "BitSelect",
    "PartSelect",
    "Concat",
    "Assign",
    "IfStmt",
    "CaseStmt",
    "CaseArm",
    "Span",
    "RAM_PRIMITIVE",
    "RAM_PORTS",
    "parse_verilog",
    "emit_verilog",
    "lint",
    "LintFinding",
    "elaborate",
    "cell_count",
    "ElaboratedDesign",
]
