import pytest

from sentaur.rtl import lint, parse_verilog
from sentaur.rtl.ast import ContinuousAssign, Ident, PortDecl, RtlModule


def _module(src: str):
    return parse_verilog(src).modules[0]


def test_listing1_is_clean(listing1_design):
    assert lint(listing1_design.modules[0]) == []


def test_dedefaulted_listing1_flags_next_state(listing1_source):
    src = listing1_source.replace(
        "        default:\n            next_state = IDLE;\n", ""
    )
    findings = lint(parse_verilog(src).modules[0])
    latches = [f for f in findings if f.rule == "latch-inference"]
    assert len(latches) == 1
    assert latches[0].net == "next_state"


def test_purely_clocked_module_is_clean():
    src = (
        "module m (input wire clk, input wire rst, input wire d, output reg q);\n"
        "always @(posedge clk) begin\n"
        "  if (rst) q <= 1'b0;\n"
        "  else if (d) q <= 1'b1;\n"
        "end\n"
        "endmodule\n"
    )
    assert lint(_module(src)) == []


def test_if_without_else_in_comb_flags():
    src = (
        "module m (input wire c, input wire d, output reg q);\n"
        "always @(*) begin\n"
        "  if (c) q = d;\n"
        "end\n"
        "endmodule\n"
    )
    findings = lint(_module(src))
    assert [f.rule for f in findings] == ["latch-inference"]
    assert findings[0].net == "q"


@pytest.mark.parametrize("width,arm_count,clean", [(2, 4, True), (2, 3, False), (3, 8, True), (3, 6, False)])
def test_exhaustive_case_coverage_is_exact(width, arm_count, clean):
    arms = "\n".join(
        f"    {width}'d{i}: q = 1'b{i % 2};" for i in range(arm_count)
    )
    src = (
        f"module m (input wire [{width - 1}:0] s, output reg q);\n"
        "always @(*) begin\n"
        f"  case (s)\n{arms}\n  endcase\n"
        "end\n"
        "endmodule\n"
    )
    findings = [f for f in lint(_module(src)) if f.rule == "latch-inference"]
    assert (findings == []) is clean


def test_default_makes_partial_case_clean():
    src = (
        "module m (input wire [2:0] s, output reg q);\n"
        "always @(*) begin\n"
        "  case (s)\n"
        "    3'd0: q = 1'b1;\n"
        "    default: q = 1'b0;\n"
        "  endcase\n"
        "end\n"
        "endmodule\n"
    )
    assert lint(_module(src)) == []


def test_unreachable_duplicate_arm():
    src = (
        "module m (input wire [1:0] s, output reg q);\n"
        "always @(*) begin\n"
        "  case (s)\n"
        "    2'd1: q = 1'b1;\n"
        "    2'd1: q = 1'b0;\n"
        "    default: q = 1'b0;\n"
        "  endcase\n"
        "end\n"
        "endmodule\n"
    )
    rules = [f.rule for f in lint(_module(src))]
    assert "unreachable-arm" in rules


def test_comparison_width_mismatch():
    src = (
        "module m (input wire [7:0] a, input wire [15:0] b, output wire y);\n"
        "assign y = a == b;\n"
        "endmodule\n"
    )
    findings = lint(_module(src))
    assert [f.rule for f in findings] == ["width-mismatch"]


def test_unsized_literal_adopts_width():
    src = (
        "module m (input wire [7:0] a, output wire y);\n"
        "assign y = a == 200;\n"
        "endmodule\n"
    )
    assert lint(_module(src)) == []


def test_case_label_width_mismatch():
    src = (
        "module m (input wire [2:0] s, output reg q);\n"
        "always @(*) begin\n"
        "  case (s)\n"
        "    2'd0: q = 1'b1;\n"
        "    default: q = 1'b0;\n"
        "  endcase\n"
        "end\n"
        "endmodule\n"
    )
    rules = [f.rule for f in lint(_module(src))]
    assert rules == ["width-mismatch"]


def test_multi_driver_rule_on_programmatic_module():
    module = RtlModule(
        name="m",
        ports=(
            PortDecl("a", "input", "wire", 1),
            PortDecl("y", "output", "wire", 1),
        ),
        assigns=(
            ContinuousAssign(Ident("y"), Ident("a")),
            ContinuousAssign(Ident("y"), Ident("a")),
        ),
    )
    rules = [f.rule for f in lint(module)]
    assert "multi-driver" in rules


def test_finding_location_points_into_source(listing1_source):
    src = listing1_source.replace(
        "        default:\n            next_state = IDLE;\n", ""
    )
    finding = lint(parse_verilog(src).modules[0])[0]
    line_count = src.count("\n")
    assert 1 <= finding.location.line_start <= line_count
