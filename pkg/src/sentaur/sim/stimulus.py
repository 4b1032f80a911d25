"""Stimulus programs: input drives plus optional generators.

JSON form:

    {
      "clock": "clk",
      "reset": {"net": "rst", "cycles": 2},
      "cycles": 100,
      "drives": [{"cycle": 0, "input": "we_a", "value": 1}, ...],
      "random": {"seed": 1, "ranges": {"din_a": [0, 65535]}},
      "counter": ["addr_b"]
    }

Values are decimal integers or "0x"-prefixed hex strings. Explicitly
driven values persist until the same input is driven again. Inputs
listed under "random" draw a fresh value every cycle (an explicit drive
overrides only the listed cycle); inputs under "counter" take the cycle
index truncated to their width. The reset net is driven high for the
first `cycles` cycles of the run and low afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from sentaur.errors import InvalidSpec


@dataclass(frozen=True)
class StimulusProgram:
    clock: str
    reset_net: str
    reset_cycles: int
    drives: tuple[tuple[int, str, int], ...] = ()  # (cycle, input, value)
    random_seed: int = 0
    random_ranges: tuple[tuple[str, int, int], ...] = ()  # (input, lo, hi)
    counter_inputs: tuple[str, ...] = ()
    cycles: int = 0  # default cycle count; simulate() may override
    source: str = field(default="<memory>", compare=False)

    def __post_init__(self):
        if self.reset_cycles < 0:
            raise InvalidSpec("reset assert_cycles must be >= 0")
        per_input_last: dict[str, int] = {}
        for cycle, name, _ in self.drives:
            if cycle < 0:
                raise InvalidSpec("drive cycles must be >= 0")
            if per_input_last.get(name, -1) > cycle:
                raise InvalidSpec(
                    f"drive cycles for input {name!r} must be nondecreasing"
                )
            per_input_last[name] = cycle
        for name, lo, hi in self.random_ranges:
            if lo > hi:
                raise InvalidSpec(f"empty random range for input {name!r}")

    def driven_inputs(self) -> set[str]:
        names = {name for _, name, _ in self.drives}
        names.update(name for name, _, _ in self.random_ranges)
        names.update(self.counter_inputs)
        if self.reset_net:
            names.add(self.reset_net)
        return names


def _parse_value(raw) -> int:
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        text = raw.strip().lower()
        if text.startswith("0x"):
            return int(text, 16)
        return int(text, 10)
    raise InvalidSpec(f"bad stimulus value: {raw!r}")


def stimulus_from_json(text: str, source: str = "<memory>") -> StimulusProgram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"stimulus is not valid JSON: {exc}") from exc
    try:
        clock = doc["clock"]
        reset = doc["reset"]
        reset_net = reset["net"]
        reset_cycles = int(reset["cycles"])
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"stimulus missing required field: {exc}") from exc

    drives = tuple(
        (int(d["cycle"]), str(d["input"]), _parse_value(d["value"]))
        for d in doc.get("drives", [])
    )
    seed = 0
    ranges: tuple[tuple[str, int, int], ...] = ()
    if "random" in doc and doc["random"] is not None:
        seed = int(doc["random"].get("seed", 0))
        ranges = tuple(
            (name, _parse_value(pair[0]), _parse_value(pair[1]))
            for name, pair in doc["random"].get("ranges", {}).items()
        )
    counter = tuple(doc.get("counter", []))
    return StimulusProgram(
        clock=clock,
        reset_net=reset_net,
        reset_cycles=reset_cycles,
        drives=drives,
        random_seed=seed,
        random_ranges=ranges,
        counter_inputs=counter,
        cycles=int(doc.get("cycles", 0)),
        source=source,
    )


def stimulus_to_json(stim: StimulusProgram) -> str:
    doc: dict = {
        "clock": stim.clock,
        "reset": {"net": stim.reset_net, "cycles": stim.reset_cycles},
        "cycles": stim.cycles,
        "drives": [
            {"cycle": c, "input": n, "value": v} for c, n, v in stim.drives
        ],
    }
    if stim.random_ranges:
        doc["random"] = {
            "seed": stim.random_seed,
            "ranges": {name: [lo, hi] for name, lo, hi in stim.random_ranges},
        }
    if stim.counter_inputs:
        doc["counter"] = list(stim.counter_inputs)
    return json.dumps(doc, indent=2) + "\n"
