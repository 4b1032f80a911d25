"""Activation-probability estimates for 1-bit nets.

Quantitative evidence for signal findings: under seeded-random inputs a
trigger net should sit at (or near) zero while functional strobes
toggle freely.
"""

from __future__ import annotations

from dataclasses import dataclass

from sentaur.rtl.ast import mask
from sentaur.rtl.elaborate import ElaboratedDesign, FlatAssign
from sentaur.sim.engine import simulate
from sentaur.sim.stimulus import StimulusProgram


@dataclass(frozen=True)
class RareNetMetric:
    net: str
    activation_probability: float
    cycles: int
    seed: int


def _reset_root(elab: ElaboratedDesign) -> str | None:
    for rnet in sorted(elab.reset_nets):
        current = rnet
        while True:
            drv = elab.drivers.get(current)
            if drv == "input":
                return current
            if isinstance(drv, FlatAssign) and hasattr(drv.rhs, "name"):
                current = drv.rhs.name
                continue
            break
    return None


def random_stimulus(elab: ElaboratedDesign, seed: int, reset_cycles: int = 2) -> StimulusProgram:
    """Uniform random drive over every non-clock, non-reset input."""
    reset = _reset_root(elab)
    clock = elab.clock_root or (elab.inputs[0] if elab.inputs else "clk")
    ranges = tuple(
        (name, 0, mask(elab.widths[name]))
        for name in elab.inputs
        if name not in (clock, reset)
    )
    return StimulusProgram(
        clock=clock,
        reset_net=reset or "",
        reset_cycles=reset_cycles if reset else 0,
        random_ranges=ranges,
        random_seed=seed,
    )


def rare_net_metrics(
    elab: ElaboratedDesign, seed: int, cycles: int
) -> list[RareNetMetric]:
    """p = (cycles sampled at 1) / cycles for every 1-bit net, under
    seeded-random stimulus."""
    stim = random_stimulus(elab, seed)
    trace = simulate(elab, stim, cycles)
    out = []
    for net, width in elab.flat_nets:
        if width != 1:
            continue
        ones = sum(trace.values[net])
        out.append(
            RareNetMetric(
                net=net,
                activation_probability=ones / cycles,
                cycles=cycles,
                seed=seed,
            )
        )
    return out
