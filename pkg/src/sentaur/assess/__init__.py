"""Four-category static assessment: I/O, FSM, Logic, Signal."""

from sentaur.assess.rules import assess, AssessmentReport, Finding
from sentaur.assess.metrics import rare_net_metrics, RareNetMetric
from sentaur.assess.report import report_to_json, report_from_json

__all__ = [
    "assess",
    "AssessmentReport",
    "Finding",
    "rare_net_metrics",
    "RareNetMetric",
    "report_to_json",
    "report_from_json",
]
