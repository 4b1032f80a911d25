"""Batch command-line front end.

Exit codes are stable across subcommands:
  0  success
  1  analysis negative (assessment flags raised, traces diverged,
     generated RTL rejected)
  2  usage error (bad flags or argument syntax)
  3  input error (unreadable/invalid design, stimulus, or backend auth)
  4  internal error

Every command is deterministic given its input files and seed flags;
outputs carry no timestamps.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from sentaur import sigops
from sentaur.errors import AuthError, CannotInferHoldValue, InvalidSpec, SentaurError
from sentaur.forge import (
    insert_trojan,
    parse_effect_arg,
    parse_trigger_arg,
    sanitize_fsm,
)
from sentaur.rtl import elaborate, emit_verilog, parse_verilog
from sentaur.rtl.lint import lint_design
from sentaur.assess import assess, rare_net_metrics, report_to_json
from sentaur.llm import (
    BackendConfig,
    build_assessment_prompts,
    build_generation_prompt,
    extract_verilog,
    invoke,
    validate_generated,
)
from sentaur.sim import (
    activation_cycles,
    compare_traces,
    emit_vcd,
    simulate,
    stimulus_from_json,
)

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


class Cli(click.Group):
    """Maps toolkit errors onto the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.exceptions.Exit:
            raise
        except click.UsageError:
            raise
        except CannotInferHoldValue as exc:
            _err(f"sanitize: {exc}")
            sys.exit(EXIT_INPUT)
        except AuthError as exc:
            _err(f"auth: {exc}")
            sys.exit(EXIT_INPUT)
        except (SentaurError, OSError, json.JSONDecodeError) as exc:
            _err(f"error: {exc}")
            sys.exit(EXIT_INPUT)


def _err(message: str):
    click.echo(message, err=True)


def _say(ctx, message: str):
    if not ctx.obj.get("quiet"):
        click.echo(message)


def _result(ctx, doc: dict):
    if ctx.obj.get("json"):
        click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _load_design(path: str):
    text = Path(path).read_text()
    return parse_verilog(text, source_name=path)


def _maybe_apply_edits(design, edits_path):
    if edits_path is None:
        return design
    edits = sigops.edits_from_json(Path(edits_path).read_text())
    return sigops.apply_edits(design, edits)


def _trigger_cb(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_trigger_arg(value)
    except InvalidSpec as exc:
        raise click.UsageError(str(exc))


def _effect_cb(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_effect_arg(value)
    except InvalidSpec as exc:
        raise click.UsageError(str(exc))


@click.group(cls=Cli)
@click.option("--seed", type=int, default=1, show_default=True, help="PRNG seed for seeded analyses.")
@click.option("--json", "json_out", is_flag=True, help="Print a machine-readable result to stdout.")
@click.option("--quiet", is_flag=True, help="Suppress progress text.")
@click.pass_context
def main(ctx, seed, json_out, quiet):
    """RTL trojan insertion, simulation, and assessment toolkit."""
    ctx.obj = {"seed": seed, "json": json_out, "quiet": quiet}


@main.command()
@click.option("--design", required=True, type=click.Path(exists=True))
@click.option("--top", "top", required=True, help="Module to infect.")
@click.option("--trigger", required=True, callback=_trigger_cb,
              help="time:lo:hi | logic:net:lo:hi | addr:net:lo:hi | "
                   "seq:net:v1,v2,... | count:net:threshold")
@click.option("--effect", required=True, callback=_effect_cb,
              help="dos | perf[:P:W] | leak:src[:port]")
@click.option("--target", default="dout_b", show_default=True,
              help="Output port the payload affects.")
@click.option("--prefix", default="Tj", show_default=True,
              help="Name prefix for inserted constructs.")
@click.option("--edits", type=click.Path(exists=True),
              help="JSON edit script applied before insertion.")
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("-m", "--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--allow-dirty", is_flag=True,
              help="Write the output even if it has lint findings.")
@click.pass_context
def insert(ctx, design, top, trigger, effect, target, prefix, edits, out,
           manifest_path, allow_dirty):
    """Insert a trigger/effect pair and write infected RTL + manifest."""
    from dataclasses import replace as _replace

    d = _maybe_apply_edits(_load_design(design), edits)
    effect = _replace(effect, target_output=target)
    infected, manifest = insert_trojan(d, top, trigger, effect, prefix=prefix)
    findings = lint_design(infected)
    if findings and not allow_dirty:
        _err(f"refusing to write: {len(findings)} lint finding(s); "
             "use --allow-dirty to override")
        sys.exit(EXIT_INPUT)
    Path(out).write_text(emit_verilog(infected))
    Path(manifest_path).write_text(manifest.to_json())
    _say(ctx, f"wrote {out} and {manifest_path}")
    _result(ctx, {"ok": True, "rtl": out, "manifest": manifest_path,
                  "lint_findings": len(findings)})


@main.command(name="assess")
@click.option("--design", required=True, type=click.Path(exists=True))
@click.option("--top", required=True)
@click.option("--edits", type=click.Path(exists=True),
              help="JSON edit script applied before assessment.")
@click.option("--metrics", "with_metrics", is_flag=True,
              help="Attach seeded-random activation probabilities.")
@click.option("--cycles", type=int, default=10000, show_default=True)
@click.option("--llm", "with_llm", is_flag=True,
              help="Also query the configured LLM backend.")
@click.option("--mock", is_flag=True, help="Use the offline mock backend.")
@click.option("-o", "--out", required=True, type=click.Path())
@click.pass_context
def assess_cmd(ctx, design, top, edits, with_metrics, cycles, with_llm, mock, out):
    """Assess a design; exit 1 if any category flags."""
    d = _maybe_apply_edits(_load_design(design), edits)
    metrics = []
    if with_metrics:
        metrics = rare_net_metrics(elaborate(d, top), ctx.obj["seed"], cycles)
    report = assess(d, top, metrics=metrics)
    doc = report_to_json(report)
    if with_llm:
        from sentaur.llm.client import request_json_findings

        cfg = BackendConfig(endpoint="mock:") if mock else BackendConfig.from_env()
        llm_findings = []
        for bundle in build_assessment_prompts(Path(design).read_text()):
            findings, raw = request_json_findings(cfg, bundle)
            if findings is not None:
                llm_findings.append({"purpose": bundle.purpose, "findings": findings})
            else:
                llm_findings.append({"purpose": bundle.purpose, "raw": raw})
        merged = json.loads(doc)
        merged["llm"] = llm_findings
        doc = json.dumps(merged, indent=2) + "\n"
    Path(out).write_text(doc)
    raised = [c for c, f in report.flags.items() if f]
    _say(ctx, f"flags: {report.flags}")
    _result(ctx, {"ok": True, "report": out, "flags": report.flags})
    sys.exit(EXIT_FLAGGED if raised else EXIT_OK)


@main.command()
@click.option("--design", required=True, type=click.Path(exists=True))
@click.option("--top", required=True)
@click.option("--stim", required=True, type=click.Path(exists=True))
@click.option("--cycles", type=int, default=None,
              help="Override the cycle count from the stimulus file.")
@click.option("--vcd", "vcd_path", type=click.Path(), help="Also write a VCD waveform.")
@click.option("--watch", help="Print the activation cycles of a 1-bit net.")
@click.option("-o", "--out", type=click.Path(), help="Trace summary JSON path.")
@click.pass_context
def sim(ctx, design, top, stim, cycles, vcd_path, watch, out):
    """Simulate a design under a stimulus program."""
    d = _load_design(design)
    elab = elaborate(d, top)
    program = stimulus_from_json(Path(stim).read_text(), source=stim)
    n = cycles if cycles is not None else program.cycles
    if n < 1:
        raise click.UsageError("cycle count must be >= 1")
    trace = simulate(elab, program, n)
    outputs = {}
    if out:
        Path(out).write_text(trace.summary_json())
        outputs["summary"] = out
    if vcd_path:
        Path(vcd_path).write_text(emit_vcd(trace, scope=top))
        outputs["vcd"] = vcd_path
    doc = {"ok": True, "cycles": n, **outputs}
    if watch:
        acts = activation_cycles(trace, watch)
        _say(ctx, f"{watch} active at cycles: {acts}")
        doc["watch"] = {watch: acts}
    else:
        _say(ctx, f"simulated {n} cycles")
    _result(ctx, doc)


@main.command()
@click.option("--design", required=True, type=click.Path(exists=True))
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--fixes", "fixes_path", type=click.Path(),
              help="Write the applied fix list as JSON.")
@click.pass_context
def sanitize(ctx, design, out, fixes_path):
    """Repair latch-inferring combinational processes."""
    d = _load_design(design)
    total = []
    modules = []
    for module in d.modules:
        repaired, fixes = sanitize_fsm(module)
        modules.append(repaired)
        total.extend(
            {"module": module.name, "net": f.net, "kind": f.kind,
             "hold": f.hold_text, "line": f.process_span.line_start}
            for f in fixes
        )
    from dataclasses import replace as _replace

    repaired_design = _replace(d, modules=tuple(modules))
    Path(out).write_text(emit_verilog(repaired_design))
    if fixes_path:
        Path(fixes_path).write_text(
            json.dumps({"count": len(total), "fixes": total}, indent=2) + "\n"
        )
    _say(ctx, f"applied {len(total)} fix(es); wrote {out}")
    _result(ctx, {"ok": True, "rtl": out, "fix_count": len(total),
                  "fixes": total})


@main.command()
@click.option("--golden", required=True, type=click.Path(exists=True))
@click.option("--suspect", required=True, type=click.Path(exists=True))
@click.option("--top", required=True)
@click.option("--stim", required=True, type=click.Path(exists=True))
@click.option("--cycles", type=int, default=None)
@click.option("-o", "--out", type=click.Path())
@click.pass_context
def diff(ctx, golden, suspect, top, stim, cycles, out):
    """Simulate two designs under one stimulus; exit 1 on divergence."""
    gd = _load_design(golden)
    sd = _load_design(suspect)
    g_mod = gd.module(top)
    s_mod = sd.module(top)
    if g_mod is None or s_mod is None:
        _err(f"module {top!r} missing from one of the designs")
        sys.exit(EXIT_INPUT)
    g_ports = {(p.name, p.direction, p.width) for p in g_mod.ports}
    s_ports = {(p.name, p.direction, p.width) for p in s_mod.ports}
    extra = s_ports - g_ports
    if g_ports - s_ports or any(d != "output" for _, d, _ in extra):
        _err("top-level interfaces differ beyond added output ports")
        sys.exit(EXIT_INPUT)

    program = stimulus_from_json(Path(stim).read_text(), source=stim)
    n = cycles if cycles is not None else program.cycles
    if n < 1:
        raise click.UsageError("cycle count must be >= 1")
    g_trace = simulate(elaborate(gd, top), program, n)
    s_trace = simulate(elaborate(sd, top), program, n)
    outputs = [p.name for p in g_mod.ports if p.direction == "output"]
    report = compare_traces(g_trace, s_trace, outputs)
    if out:
        Path(out).write_text(report.to_json())
    diverged = report.first_divergence_cycle is not None
    _say(ctx, f"match_fraction={report.match_fraction:.4f} "
              f"first_divergence={report.first_divergence_cycle}")
    _result(ctx, {"ok": True, "diverged": diverged,
                  "match_fraction": report.match_fraction,
                  "report": out})
    sys.exit(EXIT_FLAGGED if diverged else EXIT_OK)


@main.command(name="llm-gen")
@click.option("--trigger", required=True, callback=_trigger_cb)
@click.option("--effect", callback=_effect_cb)
@click.option("--spec-file", type=click.Path(exists=True),
              help="Design description embedded in the prompt.")
@click.option("--alert", default="Tj_Trig", show_default=True)
@click.option("--mock", is_flag=True, help="Use the offline mock backend.")
@click.option("-o", "--out", required=True, type=click.Path())
@click.pass_context
def llm_gen(ctx, trigger, effect, spec_file, alert, mock, out):
    """Generate RTL via the backend, validate it, and write it."""
    spec_text = Path(spec_file).read_text() if spec_file else ""
    bundle = build_generation_prompt(spec_text, trigger, effect, alert_net=alert)
    cfg = BackendConfig(endpoint="mock:") if mock else BackendConfig.from_env()
    completion = invoke(cfg, bundle)
    source = extract_verilog(completion)
    result = validate_generated(source, expected_trigger=trigger, alert_net=alert)
    if not result.accepted:
        _err(f"rejected: {result.reason}")
        _result(ctx, {"ok": False, "verdict": result.verdict,
                      "reason": result.reason})
        sys.exit(EXIT_FLAGGED)
    Path(out).write_text(source)
    _say(ctx, f"accepted: {result.reason}; wrote {out}")
    _result(ctx, {"ok": True, "rtl": out, "verdict": result.verdict,
                  "fire_cycles": result.fire_cycles})


@main.command()
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("-o", "--out", required=True, type=click.Path())
@click.pass_context
def report(ctx, inputs, out):
    """Merge result JSONs into one summary document."""
    merged = []
    for path in inputs:
        doc = json.loads(Path(path).read_text())
        kind = "unknown"
        if isinstance(doc, dict):
            if "flags" in doc:
                kind = "assessment"
            elif "trigger_net" in doc:
                kind = "manifest"
            elif "match_fraction" in doc:
                kind = "divergence"
            elif "fixes" in doc:
                kind = "sanitize"
            elif "nets" in doc and "cycles" in doc:
                kind = "trace"
        merged.append({"path": path, "kind": kind, "content": doc})
    summary = {
        "inputs": len(merged),
        "kinds": sorted({m["kind"] for m in merged}),
        "reports": merged,
    }
    Path(out).write_text(json.dumps(summary, indent=2) + "\n")
    _say(ctx, f"merged {len(merged)} report(s) into {out}")
    _result(ctx, {"ok": True, "summary": out, "inputs": len(merged)})


if __name__ == "__main__":
    main()
