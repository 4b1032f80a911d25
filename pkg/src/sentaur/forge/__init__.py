"""Trigger/payload construction and insertion into host modules."""

from sentaur.forge.specs import (
    TriggerSpec,
    PayloadSpec,
    TrojanManifest,
    parse_trigger_arg,
    parse_effect_arg,
)
from sentaur.forge.triggers import make_trigger, Fragments
from sentaur.forge.payloads import make_payload
from sentaur.forge.insert import insert_trojan
from sentaur.forge.sanitize import sanitize_fsm, SanitizeFix
from sentaur.forge.host import host_design, HOST_MODULE

__all__ = [
    "TriggerSpec",
    "PayloadSpec",
    "TrojanManifest",
    "parse_trigger_arg",
    "parse_effect_arg",
    "make_trigger",
    "Fragments",
    "make_payload",
    "insert_trojan",
    "sanitize_fsm",
    "SanitizeFix",
    "host_design",
    "HOST_MODULE",
]
