"""Cycle-accurate two-value simulation of elaborated designs."""

from sentaur.sim.prng import Xorshift64Star
from sentaur.sim.stimulus import StimulusProgram, stimulus_from_json, stimulus_to_json
from sentaur.sim.trace import (
    SimTrace,
    DivergenceReport,
    activation_cycles,
    compare_traces,
)
from sentaur.sim.engine import simulate
from sentaur.sim.vcd import emit_vcd, read_vcd

__all__ = [
    "Xorshift64Star",
    "StimulusProgram",
    "stimulus_from_json",
    "stimulus_to_json",
    "SimTrace",
    "DivergenceReport",
    "activation_cycles",
    "compare_traces",
    "simulate",
    "emit_vcd",
    "read_vcd",
]
