import difflib
import json
import re

import pytest

from sentaur.errors import HostUnsupported
from sentaur.forge import TriggerSpec, host_design, insert_trojan
from sentaur.forge.specs import TrojanManifest
from sentaur.rtl import elaborate, emit_verilog
from sentaur.rtl.lint import lint_design
from sentaur.sim import activation_cycles, compare_traces, simulate
from sentaur.sim.stimulus import StimulusProgram

from conftest import TABLE_ROWS, insert_row, make_payload_spec, stock_triggers
from oracles import enable_oracle

_STRUCTURAL = re.compile(
    r"^[\s]*(end|begin|else|endcase|default: begin|\)\s*;|\);|endmodule"
    r"|always @\(\*\) begin)[\s]*(else\s+begin)?[\s]*$"
)


@pytest.mark.parametrize("kind,effect", TABLE_ROWS)
def test_all_table_rows_insert_clean(kind, effect):
    design, manifest = insert_row(kind, effect)
    assert lint_design(design) == []
    assert manifest.added_nets
    assert manifest.trigger_net == "Tj_Trig"
    assert manifest.enable_net == "Tj_En"
    assert manifest.added_processes == len(manifest.added_process_spans)
    for span in manifest.added_process_spans:
        assert span["line_start"] >= 1


def test_unknown_module_is_host_unsupported(host):
    with pytest.raises(HostUnsupported):
        insert_trojan(
            host, "nonexistent", stock_triggers()["time"], make_payload_spec("dos")
        )


def test_original_interface_preserved():
    golden = host_design().module("dp_ram_host")
    for kind, effect in TABLE_ROWS:
        design, manifest = insert_row(kind, effect)
        infected = design.module("dp_ram_host")
        original = [(p.name, p.direction, p.width) for p in golden.ports]
        now = [(p.name, p.direction, p.width) for p in infected.ports]
        assert now[: len(original)] == original
        extras = now[len(original):]
        assert len(extras) <= 1
        for name, direction, _ in extras:
            assert direction == "output"
            assert name == "leak_chan"


def test_transparency_when_trigger_never_satisfied():
    # logic trigger on din_a in [1000,2000]; keep din_a below 1000
    design, manifest = insert_row("logic", "dos")
    golden = host_design()
    drives = [(0, "we_a", 0), (0, "addr_b", 2)]
    drives += [(2, "we_a", 1), (2, "addr_a", 2), (2, "din_a", 900), (3, "we_a", 0)]
    stim = StimulusProgram(
        clock="clk", reset_net="rst", reset_cycles=2, drives=tuple(drives)
    )
    t_inf = simulate(elaborate(design, "dp_ram_host"), stim, 200)
    t_gold = simulate(elaborate(golden, "dp_ram_host"), stim, 200)
    assert activation_cycles(t_inf, "Tj_Trig") == []
    report = compare_traces(t_gold, t_inf, ["dout_b"])
    assert report.first_divergence_cycle is None
    assert report.match_fraction == 1.0


def test_manifest_diff_completeness():
    golden_text = emit_verilog(host_design())
    for kind, effect in TABLE_ROWS:
        design, manifest = insert_row(kind, effect)
        infected_text = emit_verilog(design)
        touched = manifest.touched_names()
        word = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
        removed, added = [], []
        for line in difflib.unified_diff(
            golden_text.splitlines(), infected_text.splitlines(), lineterm="", n=0
        ):
            if not line or line[0] not in "+-" or line.startswith(("+++", "---")):
                continue
            (removed if line[0] == "-" else added).append(line[1:])
        # a line that only gained/lost a trailing comma (port list grew)
        # is a formatting artifact of a manifest-listed addition
        removed_norm = {l.rstrip(",") for l in removed}
        added_norm = {l.rstrip(",") for l in added}
        for body in removed + added:
            if _STRUCTURAL.match(body):
                continue
            if body.rstrip(",") in removed_norm & added_norm:
                continue
            names = set(word.findall(body))
            assert names & touched, f"{kind}/{effect}: unexplained diff line {body!r}"


def test_level_enable_equals_trigger():
    for kind in ("time", "logic", "address", "input_count"):
        design, manifest = insert_row(kind, "dos")
        assert manifest.enable_kind == "level"
        elab = elaborate(design, "dp_ram_host")
        stim = StimulusProgram(
            clock="clk",
            reset_net="rst",
            reset_cycles=2,
            random_seed=3,
            random_ranges=(("we_a", 0, 1), ("din_a", 0, 65535), ("addr_b", 0, 4095)),
        )
        trace = simulate(elab, stim, 1200)
        assert trace.column("Tj_En") == trace.column("Tj_Trig")


def test_sticky_enable_holds_until_reset():
    design, manifest = insert_row("state_sequence", "dos")
    assert manifest.enable_kind == "sticky"
    elab = elaborate(design, "dp_ram_host")
    drives = [(5, "din_a", 0x55), (6, "din_a", 0xAA), (7, "din_a", 0xFF), (8, "din_a", 0)]
    stim = StimulusProgram(
        clock="clk", reset_net="rst", reset_cycles=2, drives=tuple(drives)
    )
    trace = simulate(elab, stim, 60)
    trig = activation_cycles(trace, "Tj_Trig")
    # matches at cycles 5,6,7; the pulse lands one cycle later
    assert trig == [8]
    expected_en = enable_oracle(trig, 60, sticky=True)
    assert trace.column("Tj_En") == expected_en


def test_persistence_trigger_stays_low_without_condition():
    for kind in ("time", "state_sequence", "input_count"):
        design, manifest = insert_row(kind, "dos")
        elab = elaborate(design, "dp_ram_host")
        # non-satisfying: no writes, din stays at 0, only 40 cycles for time
        stim = StimulusProgram(clock="clk", reset_net="rst", reset_cycles=2)
        horizon = 40 if kind == "time" else 1000
        trace = simulate(elab, stim, horizon)
        assert activation_cycles(trace, "Tj_Trig") == [], kind


def test_manifest_round_trips_via_json():
    _, manifest = insert_row("state_sequence", "info_leak")
    again = TrojanManifest.from_json(manifest.to_json())
    assert again.trigger_net == manifest.trigger_net
    assert again.added_nets == manifest.added_nets
    assert json.loads(manifest.to_json())["enable_kind"] == "sticky"


def test_added_constructs_absent_from_golden():
    golden = host_design().module("dp_ram_host")
    declared = golden.declared_names()
    for kind, effect in TABLE_ROWS:
        _, manifest = insert_row(kind, effect)
        assert not (manifest.added_names() & declared)


def test_retarget_process_driven_output():
    from sentaur.rtl import parse_verilog

    src = (
        "module regout (input wire clk, input wire rst, input wire [7:0] d, output reg [7:0] q);\n"
        "always @(posedge clk) begin\n"
        "  if (rst) q <= 8'd0;\n"
        "  else q <= q + d;\n"
        "end\n"
        "endmodule\n"
    )
    trig = TriggerSpec("logic", watch_net="d", lo=100, hi=200)
    design, manifest = insert_trojan(
        parse_verilog(src), "regout", trig, make_payload_spec("dos", target="q")
    )
    assert lint_design(design) == []
    infected = design.module("regout")
    # the port flipped to wire; the accumulator register became the carrier
    assert infected.port("q").kind == "wire"
    assert infected.net("tj_orig_q").kind == "reg"
    elab = elaborate(design, "regout")
    stim = StimulusProgram(
        clock="clk", reset_net="rst", reset_cycles=2,
        drives=((0, "d", 3), (10, "d", 150), (12, "d", 3)),
    )
    trace = simulate(elab, stim, 20)
    en = trace.column("Tj_En")
    carrier = trace.column("tj_orig_q")
    for t in range(20):
        assert trace.column("q")[t] == (0 if en[t] else carrier[t])
    # the accumulator keeps accumulating through its renamed self-reads
    assert carrier[5] == 3 * 4  # edges 2..5 added d=3 each


def test_insert_into_instantiated_module_ties_new_port():
    from sentaur.rtl import parse_verilog

    src = (
        "module inner (input wire clk, input wire rst, input wire [7:0] d, output wire [7:0] q);\n"
        "reg [7:0] r;\n"
        "always @(posedge clk) begin\n"
        "  if (rst) r <= 8'd0;\n"
        "  else r <= d;\n"
        "end\n"
        "assign q = r;\n"
        "endmodule\n"
        "module outer (input wire clk, input wire rst, input wire [7:0] din, output wire [7:0] out);\n"
        "inner u_i (.clk(clk), .rst(rst), .d(din), .q(out));\n"
        "endmodule\n"
    )
    trig = TriggerSpec("logic", watch_net="d", lo=1, hi=2)
    pay = make_payload_spec("info_leak", target="q", source="d")
    design, manifest = insert_trojan(parse_verilog(src), "inner", trig, pay)
    assert lint_design(design) == []
    conns = dict(design.module("outer").instances[0].conns)
    assert "leak_chan" in conns and conns["leak_chan"] is None  # open output
    elaborate(design, "outer")


def test_combinational_host_takes_level_trigger():
    from sentaur.rtl import parse_verilog

    src = (
        "module pure (input wire [7:0] d, output wire [7:0] q);\n"
        "assign q = d;\n"
        "endmodule\n"
    )
    trig = TriggerSpec("logic", watch_net="d", lo=10, hi=20)
    design, manifest = insert_trojan(
        parse_verilog(src), "pure", trig, make_payload_spec("dos", target="q")
    )
    assert lint_design(design) == []
    assert manifest.enable_kind == "level"


def test_combinational_host_rejects_clocked_trigger():
    from sentaur.rtl import parse_verilog

    src = (
        "module pure (input wire [7:0] d, output wire [7:0] q);\n"
        "assign q = d;\n"
        "endmodule\n"
    )
    with pytest.raises(HostUnsupported):
        insert_trojan(
            parse_verilog(src), "pure", stock_triggers()["time"],
            make_payload_spec("dos", target="q"),
        )


def test_prefix_override():
    design, manifest = insert_trojan(
        host_design(), "dp_ram_host", stock_triggers()["time"],
        make_payload_spec("dos"), prefix="Qx",
    )
    assert manifest.trigger_net == "Qx_Trig"
    assert design.module("dp_ram_host").net("qx_count") is not None
