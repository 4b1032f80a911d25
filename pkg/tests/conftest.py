from __future__ import annotations

from pathlib import Path

import pytest

from sentaur.rtl import parse_verilog

REPO = Path(__file__).resolve().parents[1]
CORPUS = REPO / "corpus"
SCHEMAS = REPO / "schemas"

LISTING1_SEQUENCE = (
    0x3243F6A8885A308D313198A2E0370734,
    0x00112233445566778899AABBCCDDEEFF,
    0x00000000000000000000000000000000,
    0x00000000000000000000000000000001,
)


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.v"))


@pytest.fixture
def listing1_source() -> str:
    return (CORPUS / "listing1_sequence_detector.v").read_text()


@pytest.fixture
def listing1_design(listing1_source):
    return parse_verilog(listing1_source, source_name="listing1")


@pytest.fixture
def host():
    from sentaur.forge import host_design

    return host_design()


# Stock trigger parameters used across the insertion and assessment
# tests (one per trigger class).
def stock_triggers():
    from sentaur.forge import TriggerSpec

    return {
        "time": TriggerSpec("time", lo=50, hi=200),
        "logic": TriggerSpec("logic", watch_net="din_a", lo=1000, hi=2000),
        "address": TriggerSpec("address", watch_net="addr_b", lo=2000, hi=3000),
        "state_sequence": TriggerSpec(
            "state_sequence", watch_net="din_a", sequence=(0x55, 0xAA, 0xFF)
        ),
        "input_count": TriggerSpec("input_count", event_net="we_a", threshold=1000),
    }


# The stock trigger x effect matrix: logic-based pairs only with dos
# and info_leak.
TABLE_ROWS = [
    ("time", "dos"),
    ("time", "perf_degrade"),
    ("time", "info_leak"),
    ("logic", "dos"),
    ("logic", "info_leak"),
    ("address", "dos"),
    ("address", "perf_degrade"),
    ("address", "info_leak"),
    ("state_sequence", "dos"),
    ("state_sequence", "perf_degrade"),
    ("state_sequence", "info_leak"),
    ("input_count", "dos"),
    ("input_count", "perf_degrade"),
    ("input_count", "info_leak"),
]

# Expected assessment flag rows (io, fsm, logic, signal) per trigger class.
EXPECTED_FLAGS = {
    "time": (False, False, True, True),
    "logic": (False, False, True, True),
    "address": (False, False, True, True),
    "state_sequence": (False, True, True, True),
    "input_count": (True, False, True, True),
}


def make_payload_spec(effect: str, target="dout_b", source="din_a"):
    from sentaur.forge import PayloadSpec

    if effect == "info_leak":
        return PayloadSpec(effect, target_output=target, leak_source=source)
    return PayloadSpec(effect, target_output=target)


def insert_row(kind: str, effect: str, prefix="Tj"):
    from sentaur.forge import host_design, insert_trojan

    return insert_trojan(
        host_design(), "dp_ram_host", stock_triggers()[kind],
        make_payload_spec(effect), prefix=prefix,
    )
