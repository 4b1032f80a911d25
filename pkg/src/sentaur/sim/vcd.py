"""VCD export of traces and a minimal reader for round-trip checks.

Output follows the IEEE 1364 VCD format: header, $scope/$var
declarations, $enddefinitions, an initial $dumpvars block, then one
timestamp per cycle with value changes only for nets that changed.
Hierarchical separators (dots) in net names become nested scopes.
No $date section is emitted so identical traces yield identical bytes.
"""

from __future__ import annotations

from sentaur.sim.trace import SimTrace

_ID_CHARS = [chr(c) for c in range(33, 127)]


def _vcd_id(index: int) -> str:
    chars = []
    index += 1
    while index > 0:
        index -= 1
        chars.append(_ID_CHARS[index % len(_ID_CHARS)])
        index //= len(_ID_CHARS)
    return "".join(chars)


def _value_text(value: int, width: int, ident: str) -> str:
    if width == 1:
        return f"{value}{ident}"
    return f"b{value:b} {ident}"


def emit_vcd(trace: SimTrace, scope: str = "top") -> str:
    """Render a trace as VCD text; one timescale unit per cycle."""
    if trace.cycles < 1:
        raise ValueError("trace is empty")
    out: list[str] = []
    out.append("$version sentaur sim $end")
    out.append("$timescale 1ns $end")
    out.append(f"$scope module {scope} $end")

    ids: dict[str, str] = {}
    open_path: list[str] = []
    for index, name in enumerate(trace.values):
        parts = name.split(".")
        path, leaf = parts[:-1], parts[-1]
        while open_path and open_path != path[: len(open_path)]:
            open_path.pop()
            out.append("$upscope $end")
        while len(open_path) < len(path):
            nxt = path[len(open_path)]
            open_path.append(nxt)
            out.append(f"$scope module {nxt} $end")
        ident = _vcd_id(index)
        ids[name] = ident
        width = trace.widths[name]
        ref = leaf if width == 1 else f"{leaf} [{width - 1}:0]"
        out.append(f"$var wire {width} {ident} {ref} $end")
    while open_path:
        open_path.pop()
        out.append("$upscope $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")

    out.append("#0")
    out.append("$dumpvars")
    last: dict[str, int] = {}
    for name, column in trace.values.items():
        last[name] = column[0]
        out.append(_value_text(column[0], trace.widths[name], ids[name]))
    out.append("$end")

    for t in range(1, trace.cycles):
        changes = []
        for name, column in trace.values.items():
            if column[t] != last[name]:
                last[name] = column[t]
                changes.append(_value_text(column[t], trace.widths[name], ids[name]))
        if changes:
            out.append(f"#{t}")
            out.extend(changes)
    out.append(f"#{trace.cycles}")
    return "\n".join(out) + "\n"


def read_vcd(text: str) -> SimTrace:
    """Parse VCD produced by emit_vcd back into a SimTrace.

    Supports scalar and vector wire declarations, nested scopes, and
    binary value changes; enough to verify exported waveforms.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    widths: dict[str, int] = {}
    names_by_id: dict[str, str] = {}
    scope_path: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        i += 1
        if line.startswith("$scope"):
            scope_path.append(line.split()[2])
        elif line.startswith("$upscope"):
            scope_path.pop()
        elif line.startswith("$var"):
            parts = line.split()
            width = int(parts[2])
            ident = parts[3]
            leaf = parts[4]
            inner = scope_path[1:]  # first scope is the outer design scope
            name = ".".join(inner + [leaf])
            widths[name] = width
            names_by_id[ident] = name
        elif line.startswith("$enddefinitions"):
            break

    changes: list[tuple[int, str, int]] = []
    time = 0
    final_time = 0
    for line in lines[i:]:
        if line.startswith("#"):
            time = int(line[1:])
            final_time = max(final_time, time)
        elif line.startswith(("$dumpvars", "$end")):
            continue
        elif line.startswith("b"):
            value_text, ident = line[1:].split()
            changes.append((time, names_by_id[ident], int(value_text, 2)))
        elif line[0] in "01":
            changes.append((time, names_by_id[line[1:]], int(line[0])))

    cycles = final_time  # trailing "#cycles" stamp marks the end of the run
    values: dict[str, list[int]] = {name: [0] * cycles for name in widths}
    per_net: dict[str, list[tuple[int, int]]] = {name: [] for name in widths}
    for t, name, value in changes:
        per_net[name].append((t, value))
    for name, steps in per_net.items():
        column = values[name]
        current = 0
        pointer = 0
        for t in range(cycles):
            while pointer < len(steps) and steps[pointer][0] <= t:
                current = steps[pointer][1]
                pointer += 1
            column[t] = current
    return SimTrace(cycles=cycles, widths=widths, values=values)
