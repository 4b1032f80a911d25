"""Stable JSON serialization of assessment reports.

Schema (see schemas/assessment.schema.json):
{"design", "top", "flags": {"io","fsm","logic","signal"},
 "findings": [{"category","nets":[],"span":{"file","line_start","line_end"},
               "rationale"}],
 "metrics": [{"net","p","cycles","seed"}]}
"""

from __future__ import annotations

import json

from sentaur.rtl.ast import Span
from sentaur.assess.rules import AssessmentReport, CATEGORIES, Finding
from sentaur.assess.metrics import RareNetMetric


def report_to_json(report: AssessmentReport) -> str:
    doc = {
        "design": report.design,
        "top": report.top,
        "flags": {c: bool(report.flags.get(c, False)) for c in CATEGORIES},
        "findings": [
            {
                "category": f.category,
                "nets": list(f.nets),
                "span": {
                    "file": report.design,
                    "line_start": f.span.line_start,
                    "line_end": f.span.line_end,
                },
                "rationale": f.rationale,
            }
            for f in report.findings
        ],
        "metrics": [
            {
                "net": m.net,
                "p": m.activation_probability,
                "cycles": m.cycles,
                "seed": m.seed,
            }
            for m in report.metrics
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_from_json(text: str) -> AssessmentReport:
    doc = json.loads(text)
    findings = [
        Finding(
            category=f["category"],
            nets=tuple(f["nets"]),
            span=Span(f["span"]["line_start"], f["span"]["line_end"]),
            rationale=f["rationale"],
        )
        for f in doc["findings"]
    ]
    metrics = [
        RareNetMetric(
            net=m["net"],
            activation_probability=m["p"],
            cycles=m["cycles"],
            seed=m["seed"],
        )
        for m in doc.get("metrics", [])
    ]
    return AssessmentReport(
        design=doc["design"],
        top=doc["top"],
        flags={c: bool(doc["flags"].get(c, False)) for c in CATEGORIES},
        findings=findings,
        metrics=metrics,
    )
