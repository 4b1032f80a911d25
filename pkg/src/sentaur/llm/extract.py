"""Pull Verilog source out of prose-wrapped completions."""

from __future__ import annotations

import re

from sentaur.errors import NoCodeFound

_FENCE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)


def extract_verilog(completion: str) -> str:
    """The first fenced code block; otherwise the region from the first
    line starting with `module` through the final `endmodule`
    (back-to-back modules come out concatenated)."""
    match = _FENCE.search(completion)
    if match:
        return match.group(1)

    lines = completion.splitlines()
    start = None
    end = None
    for i, line in enumerate(lines):
        if start is None and line.lstrip().startswith("module"):
            start = i
        if line.strip().startswith("endmodule") or line.strip() == "endmodule":
            end = i
    if start is None or end is None or end < start:
        raise NoCodeFound("completion contains no fenced block or module text")
    return "\n".join(lines[start : end + 1]) + "\n"
