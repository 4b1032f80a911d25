"""Toolkit for inserting, simulating, and statically assessing RTL trojans.

The package operates on a small synthesizable Verilog subset. The main
entry points are:

* :mod:`sentaur.rtl` -- parse / emit / lint / elaborate designs
* :mod:`sentaur.sim` -- cycle-accurate two-value simulation and VCD export
* :mod:`sentaur.forge` -- trigger/payload construction and insertion
* :mod:`sentaur.sigops` -- signal surgery (ports, joins, routes, renames)
* :mod:`sentaur.assess` -- four-category static assessment
* :mod:`sentaur.llm` -- prompt-driven generation/assessment via a chat backend
* :mod:`sentaur.cli` -- batch command-line front end
"""

from sentaur.rtl import parse_verilog, emit_verilog, lint, elaborate, cell_count
from sentaur.sim import simulate, activation_cycles, compare_traces, emit_vcd
from sentaur.forge import TriggerSpec, PayloadSpec, insert_trojan, sanitize_fsm

__all__ = [
    "parse_verilog",
    "emit_verilog",
    "lint",
    "elaborate",
    "cell_count",
    "simulate",
    "activation_cycles",
    "compare_traces",
    "emit_vcd",
    "TriggerSpec",
    "PayloadSpec",
    "insert_trojan",
    "sanitize_fsm",
]

__version__ = "0.1.0"
