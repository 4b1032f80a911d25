"""Built-in dual-port RAM host used by the insertion experiments.

The host wraps the ram_dp primitive (4096 x 16, 12-bit addresses, the
smallest round widths that hold every stock trigger constant) with an
output register stage: synchronous write port a, registered read port b
with two cycles of read latency.
"""

from __future__ import annotations

from pathlib import Path

from sentaur.rtl.ast import RtlDesign
from sentaur.rtl.parser import parse_verilog

HOST_MODULE = "dp_ram_host"

_HOST_FILE = Path(__file__).resolve().parents[3] / "corpus" / "dp_ram_host.v"

_HOST_SOURCE = """\
module dp_ram_host (
    input wire clk,
    input wire rst,
    input wire we_a,
    input wire [11:0] addr_a,
    input wire [15:0] din_a,
    input wire [11:0] addr_b,
    output wire [15:0] dout_b
);
    wire [15:0] ram_q;
    reg [15:0] dout_r;
    ram_dp u_mem (
        .clk(clk),
        .we_a(we_a),
        .addr_a(addr_a),
        .din_a(din_a),
        .addr_b(addr_b),
        .dout_b(ram_q)
    );
    always @(posedge clk) begin
        if (rst) begin
            dout_r <= 16'h0000;
        end else begin
            dout_r <= ram_q;
        end
    end
    assign dout_b = dout_r;
endmodule
"""


def host_design() -> RtlDesign:
    """Fresh parse of the dual-port RAM host (corpus copy if present)."""
    if _HOST_FILE.exists():
        return parse_verilog(_HOST_FILE.read_text(), source_name=str(_HOST_FILE))
    return parse_verilog(_HOST_SOURCE, source_name="dp_ram_host")
