"""Deterministic offline backend.

Generation bundles get a canned synthesizable module rendered from the
bundle's trigger parameters (the sequence shape mirrors the shipped
sequence detector). Assessment bundles get a canned JSON finding list.
The whole test suite runs against this backend with no network.
"""

from __future__ import annotations

import json

from sentaur.forge.specs import TriggerSpec
from sentaur.llm.prompts import PromptBundle


def _render_sequence_detector(t: TriggerSpec, alert_net: str, watch_width: int) -> str:
    n = len(t.sequence)
    state_width = max(1, (n + 1).bit_length())
    names = ["IDLE"] + [f"SEQ{i+1}" for i in range(n)] + ["TRIGGER"]
    decls = ", ".join(
        f"{name} = {state_width}'d{i}" for i, name in enumerate(names)
    )
    arms = []
    for i in range(n):
        arms.append(
            f"        {names[i]}:\n"
            f"            if (state == {watch_width}'h{t.sequence[i]:x})\n"
            f"                next_state = {names[i + 1]};\n"
            f"            else\n"
            f"                next_state = IDLE;"
        )
    arms.append(f"        {names[n]}:\n            next_state = TRIGGER;")
    arms.append("        TRIGGER:\n            next_state = IDLE;")
    arms.append("        default:\n            next_state = IDLE;")
    body = "\n".join(arms)
    return f"""module sequence_detector(input wire clk, input wire rst, input wire [{watch_width - 1}:0] state, output reg {alert_net});

localparam [{state_width - 1}:0] {decls};
reg [{state_width - 1}:0] current_state, next_state;

always @(*) begin
    case (current_state)
{body}
    endcase
end

always @(posedge clk) begin
    if (rst)
        current_state <= IDLE;
    else
        current_state <= next_state;
end

always @(current_state) begin
    {alert_net} = (current_state == TRIGGER) ? 1'b1 : 1'b0;
end
endmodule
"""


def _render_range_trigger(t: TriggerSpec, alert_net: str, width: int) -> str:
    port = "addr" if t.kind == "address" else "data"
    return f"""module range_monitor(input wire clk, input wire rst, input wire [{width - 1}:0] {port}, output wire {alert_net});
    assign {alert_net} = ({port} >= {width}'d{t.lo}) && ({port} <= {width}'d{t.hi});
endmodule
"""


def _render_time_trigger(t: TriggerSpec, alert_net: str) -> str:
    return f"""module window_timer(input wire clk, input wire rst, output wire {alert_net});
    reg [31:0] count;
    always @(posedge clk) begin
        if (rst)
            count <= 32'd0;
        else
            count <= count + 32'd1;
    end
    assign {alert_net} = (count >= 32'd{t.lo}) && (count <= 32'd{t.hi});
endmodule
"""


def _render_count_trigger(t: TriggerSpec, alert_net: str) -> str:
    return f"""module write_monitor(input wire clk, input wire rst, input wire we, output wire {alert_net});
    reg [31:0] writes;
    always @(posedge clk) begin
        if (rst)
            writes <= 32'd0;
        else
            writes <= writes + (we ? 32'd1 : 32'd0);
    end
    assign {alert_net} = (writes >= 32'd{t.threshold});
endmodule
"""


def mock_completion(bundle: PromptBundle) -> str:
    """Canned deterministic response for a bundle."""
    if bundle.purpose == "generate":
        t: TriggerSpec = bundle.meta.get("trigger")
        alert = bundle.meta.get("alert_net", "Tj_Trig")
        if t is None:
            raise ValueError("generation bundle carries no trigger parameters")
        if t.kind == "state_sequence":
            width = max(8, max(v.bit_length() for v in t.sequence))
            width = 128 if width > 64 else width
            source = _render_sequence_detector(t, alert, width)
        elif t.kind in ("logic", "address"):
            width = max(12, t.hi.bit_length())
            source = _render_range_trigger(t, alert, width)
        elif t.kind == "time":
            source = _render_time_trigger(t, alert)
        else:
            source = _render_count_trigger(t, alert)
        return (
            "Here is a synthesizable implementation of the requested "
            "module. The default arm keeps the combinational next-state "
            "logic fully covered.\n\n"
            f"```verilog\n{source}```\n"
        )

    findings = []
    if bundle.purpose == "assess_logic":
        findings.append(
            {
                "category": "logic",
                "nets": [],
                "rationale": "constant-guarded conditions may alter outputs",
            }
        )
    return json.dumps(findings)
