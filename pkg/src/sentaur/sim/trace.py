"""Trace containers and comparisons."""

from __future__ import annotations

import json
from dataclasses import dataclass

from sentaur.errors import LengthMismatch, UnknownNet, WidthNotOne


@dataclass
class SimTrace:
    """Per-cycle sampled values for every flat net.

    Sampling happens at the end of each cycle, after the clock edge and
    the post-edge combinational settle, so a one-cycle register pulse
    occupies exactly one sample. Values are columnar: values[net][t].
    """

    cycles: int
    widths: dict[str, int]
    values: dict[str, list[int]]
    seed: int = 0

    def value(self, net: str, cycle: int) -> int:
        if net not in self.values:
            raise UnknownNet(net)
        return self.values[net][cycle]

    def column(self, net: str) -> list[int]:
        if net not in self.values:
            raise UnknownNet(net)
        return self.values[net]

    def summary_json(self) -> str:
        nets = []
        for name, column in self.values.items():
            changes = sum(
                1 for a, b in zip(column, column[1:]) if a != b
            )
            nets.append(
                {
                    "name": name,
                    "width": self.widths[name],
                    "changes": changes,
                    "final": column[-1] if column else 0,
                }
            )
        return json.dumps({"cycles": self.cycles, "nets": nets}, indent=2) + "\n"


@dataclass
class DivergenceReport:
    first_divergence_cycle: int | None
    diverging_cycles: dict[str, list[int]]  # output -> cycles where golden != suspect
    match_fraction: float
    cycles: int = 0

    def to_json(self) -> str:
        doc = {
            "first_divergence_cycle": self.first_divergence_cycle,
            "cycles": self.cycles,
            "match_fraction": self.match_fraction,
            "outputs": [
                {"net": net, "diverging_cycles": cycles}
                for net, cycles in self.diverging_cycles.items()
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def activation_cycles(trace: SimTrace, net: str) -> list[int]:
    """Cycles where a 1-bit net samples as 1."""
    if net not in trace.values:
        raise UnknownNet(net)
    if trace.widths[net] != 1:
        raise WidthNotOne(f"{net} is {trace.widths[net]} bits wide")
    return [t for t, v in enumerate(trace.values[net]) if v == 1]


def compare_traces(
    golden: SimTrace, suspect: SimTrace, outputs: list[str]
) -> DivergenceReport:
    """Cycle-by-cycle comparison of the listed outputs."""
    if golden.cycles != suspect.cycles:
        raise LengthMismatch(
            f"golden has {golden.cycles} cycles, suspect {suspect.cycles}"
        )
    for net in outputs:
        if net not in golden.values or net not in suspect.values:
            raise UnknownNet(net)

    diverging: dict[str, list[int]] = {net: [] for net in outputs}
    bad_cycles: set[int] = set()
    for net in outputs:
        g = golden.values[net]
        s = suspect.values[net]
        for t in range(golden.cycles):
            if g[t] != s[t]:
                diverging[net].append(t)
                bad_cycles.add(t)

    first = min(bad_cycles) if bad_cycles else None
    matching = golden.cycles - len(bad_cycles)
    fraction = matching / golden.cycles if golden.cycles else 1.0
    return DivergenceReport(
        first_divergence_cycle=first,
        diverging_cycles=diverging,
        match_fraction=fraction,
        cycles=golden.cycles,
    )
