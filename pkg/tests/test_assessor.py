import json

import pytest
from jsonschema import validate as js_validate

from sentaur import sigops
from sentaur.assess import (
    assess,
    rare_net_metrics,
    report_from_json,
    report_to_json,
)
from sentaur.forge import PayloadSpec, TriggerSpec, insert_trojan
from sentaur.rtl import elaborate, parse_verilog

from conftest import CORPUS, EXPECTED_FLAGS, SCHEMAS, TABLE_ROWS, insert_row


def _flag_tuple(report):
    return (
        report.flags["io"],
        report.flags["fsm"],
        report.flags["logic"],
        report.flags["signal"],
    )


@pytest.mark.parametrize("kind,effect", TABLE_ROWS)
def test_flag_rows_match_reference_pattern(kind, effect):
    design, _ = insert_row(kind, effect)
    report = assess(design, "dp_ram_host")
    assert _flag_tuple(report) == EXPECTED_FLAGS[kind], (kind, effect)


def test_clean_host_baseline(host):
    report = assess(host, "dp_ram_host")
    assert _flag_tuple(report) == (False, False, False, False)
    assert report.findings == []


def test_listing1_standalone_assessment(listing1_design):
    # sequence detector feeding its alert to an output: fsm and logic rise
    report = assess(listing1_design, "sequence_detector")
    assert report.flags["fsm"] is True
    assert report.flags["logic"] is True
    assert report.flags["io"] is False


def _rename_trojan_idents(design, manifest, module="dp_ram_host"):
    mod = design.module(module)
    renamed = design
    for i, name in enumerate(sorted(manifest.added_names())):
        declared = (
            mod.port(name) is not None
            or mod.net(name) is not None
            or name in mod.param_values()
        )
        if declared:
            renamed = sigops.rename_net(renamed, module, name, f"n{i}_sig")
        mod = renamed.module(module)
    return renamed


@pytest.mark.parametrize("kind,effect", TABLE_ROWS)
def test_name_blindness(kind, effect):
    design, manifest = insert_row(kind, effect)
    before = _flag_tuple(assess(design, "dp_ram_host"))
    renamed = _rename_trojan_idents(design, manifest)
    after = _flag_tuple(assess(renamed, "dp_ram_host"))
    assert before == after == EXPECTED_FLAGS[kind]


@pytest.mark.parametrize("kind,effect", TABLE_ROWS)
def test_evidence_soundness(kind, effect):
    design, manifest = insert_row(kind, effect)
    report = assess(design, "dp_ram_host")
    allowed = manifest.touched_names()
    for finding in report.findings:
        named = set(finding.nets)
        assert named & allowed, (kind, effect, finding)


def test_report_json_schema_and_roundtrip():
    design, _ = insert_row("state_sequence", "info_leak")
    elab = elaborate(design, "dp_ram_host")
    metrics = rare_net_metrics(elab, seed=5, cycles=400)
    report = assess(design, "dp_ram_host", metrics=metrics)
    text = report_to_json(report)
    doc = json.loads(text)
    schema = json.loads((SCHEMAS / "assessment.schema.json").read_text())
    js_validate(doc, schema)
    again = report_from_json(text)
    assert again.flags == report.flags
    assert [f.category for f in again.findings] == [
        f.category for f in report.findings
    ]


def test_empty_report_shape(host):
    report = assess(host, "dp_ram_host")
    doc = json.loads(report_to_json(report))
    assert doc["flags"] == {
        "io": False, "fsm": False, "logic": False, "signal": False,
    }
    assert doc["findings"] == []


def test_findings_carry_real_spans():
    design, _ = insert_row("state_sequence", "dos")
    report = assess(design, "dp_ram_host")
    line_count = __import__("sentaur.rtl.emit", fromlist=["emit_verilog"]).emit_verilog(design).count("\n")
    spanned = [f for f in report.findings if f.span.line_start > 0]
    assert spanned
    for f in spanned:
        assert 1 <= f.span.line_start <= f.span.line_end <= line_count


# -- rare-net metrics --------------------------------------------------------


def test_constant_zero_net_probability():
    src = (
        "module z (input wire clk, input wire rst, input wire d, output wire q);\n"
        "wire tied;\n"
        "assign tied = 1'b0;\n"
        "assign q = d & tied;\n"
        "endmodule\n"
    )
    elab = elaborate(parse_verilog(src), "z")
    metrics = {m.net: m for m in rare_net_metrics(elab, seed=3, cycles=2000)}
    assert metrics["tied"].activation_probability == 0.0
    assert metrics["q"].activation_probability == 0.0


def test_toggle_net_probability_near_half():
    src = (
        "module t (input wire clk, input wire rst, output wire q);\n"
        "reg s;\n"
        "always @(posedge clk) begin\n"
        "  if (rst) s <= 1'b0;\n"
        "  else s <= !s;\n"
        "end\n"
        "assign q = s;\n"
        "endmodule\n"
    )
    elab = elaborate(parse_verilog(src), "t")
    metrics = {m.net: m for m in rare_net_metrics(elab, seed=1, cycles=10000)}
    assert abs(metrics["q"].activation_probability - 0.5) < 0.05


def test_listing1_alert_never_fires_randomly(listing1_design):
    elab = elaborate(listing1_design, "sequence_detector")
    metrics = {m.net: m for m in rare_net_metrics(elab, seed=11, cycles=5000)}
    assert metrics["Tj_Trig"].activation_probability == 0.0


def test_trigger_nets_are_rare_in_infected_host():
    design, manifest = insert_row("state_sequence", "dos")
    elab = elaborate(design, "dp_ram_host")
    metrics = {m.net: m for m in rare_net_metrics(elab, seed=2, cycles=5000)}
    assert metrics[manifest.trigger_net].activation_probability == 0.0


# -- reduced benchmark stand-ins ----------------------------------------------
#
# Three infected variants of the toy cipher cover the classic
# single-benchmark trigger structures:
#   plaintext match (logic)   -> (.  .  x  x)
#   plaintext sequence (fsm)  -> (.  x  x  x)
#   encryption counter (io)   -> (x  .  x  x)


def _aes_like():
    return parse_verilog((CORPUS / "aes_like.v").read_text(), source_name="aes_like")


def test_standin_plaintext_match_row():
    trig = TriggerSpec("logic", watch_net="din", lo=0xBEEF, hi=0xBEEF)
    pay = PayloadSpec("info_leak", target_output="dout", leak_source="key")
    design, _ = insert_trojan(_aes_like(), "aes_like", trig, pay)
    report = assess(design, "aes_like")
    assert _flag_tuple(report) == (False, False, True, True)


def test_standin_plaintext_sequence_row():
    trig = TriggerSpec(
        "state_sequence",
        watch_net="din",
        sequence=(0x3243, 0x0011, 0x0000, 0x0001),
    )
    pay = PayloadSpec("info_leak", target_output="dout", leak_source="key")
    design, _ = insert_trojan(_aes_like(), "aes_like", trig, pay)
    report = assess(design, "aes_like")
    assert _flag_tuple(report) == (False, True, True, True)


def test_standin_encryption_counter_row():
    # the realistic trigger counts 2^128 encryptions; the structure is
    # validated at a small threshold
    trig = TriggerSpec("input_count", event_net="start", threshold=16)
    pay = PayloadSpec("info_leak", target_output="dout", leak_source="key")
    design, _ = insert_trojan(_aes_like(), "aes_like", trig, pay)
    report = assess(design, "aes_like")
    assert _flag_tuple(report) == (True, False, True, True)
