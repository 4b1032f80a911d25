import pytest

from sentaur import sigops
from sentaur.errors import NameCollision, NoPath, UnknownNet, WidthMismatch
from sentaur.rtl import elaborate, emit_verilog, parse_verilog
from sentaur.rtl.lint import lint_design
from sentaur.sim import simulate
from sentaur.sim.stimulus import StimulusProgram

from conftest import CORPUS


@pytest.fixture
def two_mod():
    return parse_verilog((CORPUS / "two_modules.v").read_text())


def _counter_stim(seed=3):
    return StimulusProgram(
        clock="clk",
        reset_net="rst",
        reset_cycles=1,
        random_seed=seed,
        random_ranges=(("run", 0, 1),),
    )


def test_add_port_appends_and_roundtrips(host):
    out = sigops.add_port(host, "dp_ram_host", "leak_chan", "output", 16)
    mod = out.module("dp_ram_host")
    assert mod.ports[-1].name == "leak_chan"
    assert mod.ports[-1].width == 16
    reparsed = parse_verilog(emit_verilog(out))
    assert reparsed.modules == out.modules


def test_add_port_updates_instantiations(two_mod):
    out = sigops.add_port(two_mod, "sat_counter", "dbg", "input", 4)
    inst = out.module("counter_top").instances[0]
    conns = dict(inst.conns)
    assert "dbg" in conns
    assert conns["dbg"].value == 0  # tied to 0
    # the design still elaborates and simulates
    elaborate(out, "counter_top")


def test_add_port_output_left_open(two_mod):
    out = sigops.add_port(two_mod, "sat_counter", "spare", "output", 1)
    conns = dict(out.module("counter_top").instances[0].conns)
    assert conns["spare"] is None
    elaborate(out, "counter_top")


def test_add_port_collision(host):
    with pytest.raises(NameCollision):
        sigops.add_port(host, "dp_ram_host", "clk", "input", 1)


def test_add_port_twice_collides(host):
    once = sigops.add_port(host, "dp_ram_host", "leak_chan", "output", 16)
    with pytest.raises(NameCollision):
        sigops.add_port(once, "dp_ram_host", "leak_chan", "output", 16)


_JOIN_SRC = """\
module j (
    input wire clk,
    input wire rst,
    input wire a,
    input wire b,
    output reg y
);
    wire s1;
    wire s2;
    assign s1 = a & b;
    assign s2 = a ^ b;
    always @(*) begin
        if (s1)
            y = s2;
        else
            y = 1'b0;
    end
endmodule
"""


def test_join_rewrites_readers():
    design = parse_verilog(_JOIN_SRC)
    out = sigops.join_signals(design, "j", ["s1", "s2"], "tj_path")
    mod = out.module("j")
    # drivers untouched, readers now reference the joint net
    assert {str(a.lhs.name) for a in mod.assigns} == {"s1", "s2", "tj_path"}
    body = mod.processes[0].body[0]
    assert body.cond.name == "tj_path"
    assert lint_design(out) == []
    joint_driver = [a for a in mod.assigns if a.lhs.name == "tj_path"][0]
    assert joint_driver.rhs.op == "|"  # 1-bit merge is the OR of sources


def test_join_self_is_alias():
    design = parse_verilog(_JOIN_SRC)
    out = sigops.join_signals(design, "j", ["s1", "s1"], "alias_net")
    mod = out.module("j")
    alias = [a for a in mod.assigns if a.lhs.name == "alias_net"][0]
    assert alias.rhs.name == "s1"
    assert lint_design(out) == []


def test_join_width_mismatch(host):
    with pytest.raises(WidthMismatch):
        sigops.join_signals(host, "dp_ram_host", ["we_a", "din_a"], "jx")


def test_route_up_mirrors_inner_net(two_mod):
    log = []
    out = sigops.route_signal(two_mod, ("sat_counter", "value"), "counter_top", _log=log)
    assert lint_design(out) == []
    elab = elaborate(out, "counter_top")
    trace = simulate(elab, _counter_stim(), 50)
    assert trace.column("value_route") == trace.column("u_cnt.value")


def test_route_ram_host_din_up_to_wrapper(host):
    from dataclasses import replace

    wrapper_src = (
        "module wrapper (input wire clk, input wire rst, input wire we,\n"
        "    input wire [11:0] wa, input wire [15:0] wd, input wire [11:0] ra,\n"
        "    output wire [15:0] rd);\n"
        "dp_ram_host u_host (.clk(clk), .rst(rst), .we_a(we), .addr_a(wa),\n"
        "    .din_a(wd), .addr_b(ra), .dout_b(rd));\n"
        "endmodule\n"
    )
    wrapper = parse_verilog(wrapper_src).modules[0]
    design = replace(host, modules=host.modules + (wrapper,))
    routed = sigops.route_signal(design, ("dp_ram_host", "din_a"), "wrapper")
    assert lint_design(routed) == []
    elab = elaborate(routed, "wrapper")
    stim = StimulusProgram(
        clock="clk",
        reset_net="rst",
        reset_cycles=1,
        random_seed=9,
        random_ranges=(("wd", 0, 65535), ("we", 0, 1)),
    )
    trace = simulate(elab, stim, 100)
    # the wrapper-level wire mirrors the inner port every cycle
    assert trace.column("din_a_route") == trace.column("u_host.din_a")
    assert trace.column("din_a_route") == trace.column("wd")


def test_route_same_module_is_identity(two_mod):
    out = sigops.route_signal(two_mod, ("counter_top", "raw"), "counter_top")
    assert emit_verilog(out) == emit_verilog(two_mod)


def test_route_disconnected_is_no_path(two_mod, host):
    from dataclasses import replace

    combined = replace(
        two_mod, modules=two_mod.modules + host.modules
    )
    with pytest.raises(NoPath):
        sigops.route_signal(combined, ("dp_ram_host", "ram_q"), "counter_top")


def test_route_name_collision_suffixes(two_mod):
    # occupy the preferred names at both levels
    design = sigops.add_net(two_mod, "counter_top", "value_route", 8)
    log = []
    routed = sigops.route_signal(design, ("sat_counter", "value"), "counter_top", _log=log)
    assert lint_design(routed) == []
    renames = [e for e in log if e.kind == "route_rename"]
    assert renames and renames[0].params["used"].endswith("_r1")


def test_rename_module_updates_instances(two_mod):
    out = sigops.rename_module(two_mod, "sat_counter", "seq_det")
    assert out.module("seq_det") is not None
    assert out.module("sat_counter") is None
    assert out.module("counter_top").instances[0].module_name == "seq_det"


def test_rename_module_collision(two_mod):
    with pytest.raises(NameCollision):
        sigops.rename_module(two_mod, "sat_counter", "counter_top")


def test_rename_module_preserves_traces(two_mod):
    before = simulate(elaborate(two_mod, "counter_top"), _counter_stim(), 80)
    renamed = sigops.rename_module(two_mod, "sat_counter", "neutral_block")
    after = simulate(elaborate(renamed, "counter_top"), _counter_stim(), 80)
    assert before.column("total") == after.column("total")
    assert before.column("busy") == after.column("busy")


def test_rename_net_preserves_traces(two_mod):
    renamed = sigops.rename_net(two_mod, "sat_counter", "value", "v0")
    before = simulate(elaborate(two_mod, "counter_top"), _counter_stim(), 80)
    after = simulate(elaborate(renamed, "counter_top"), _counter_stim(), 80)
    assert before.column("total") == after.column("total")
    assert after.column("u_cnt.v0") == before.column("u_cnt.value")


def test_rename_port_updates_connection_sites(two_mod):
    renamed = sigops.rename_net(two_mod, "sat_counter", "en", "enable")
    conns = dict(renamed.module("counter_top").instances[0].conns)
    assert "enable" in conns and "en" not in conns
    assert lint_design(renamed) == []


def test_rename_net_unknown(two_mod):
    with pytest.raises(UnknownNet):
        sigops.rename_net(two_mod, "sat_counter", "ghost", "g2")


def test_lint_preservation_across_edits(two_mod):
    assert lint_design(two_mod) == []
    log = []
    edited = sigops.add_port(two_mod, "sat_counter", "dbg_in", "input", 2, _log=log)
    edited = sigops.join_signals(edited, "counter_top", ["raw", "raw"], "mirror", _log=log)
    edited = sigops.route_signal(edited, ("sat_counter", "value"), "counter_top", _log=log)
    edited = sigops.rename_module(edited, "sat_counter", "block_a", _log=log)
    assert lint_design(edited) == []


def test_edit_log_replay_is_byte_identical(two_mod):
    log = []
    edited = sigops.add_port(two_mod, "sat_counter", "dbg_in", "input", 2, _log=log)
    edited = sigops.route_signal(edited, ("sat_counter", "value"), "counter_top", _log=log)
    edited = sigops.rename_module(edited, "sat_counter", "block_a", _log=log)
    edited = sigops.rename_net(edited, "counter_top", "busy", "active", _log=log)

    replayed = sigops.apply_edits(two_mod, log)
    assert emit_verilog(replayed) == emit_verilog(edited)

    # and through the JSON script form
    script = sigops.edits_to_json(log)
    replayed2 = sigops.apply_edits(two_mod, sigops.edits_from_json(script))
    assert emit_verilog(replayed2) == emit_verilog(edited)
