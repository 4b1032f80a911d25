"""Prompt-driven generation and assessment against a chat backend."""

from sentaur.llm.prompts import (
    PromptBundle,
    build_generation_prompt,
    build_assessment_prompts,
)
from sentaur.llm.client import BackendConfig, invoke
from sentaur.llm.extract import extract_verilog
from sentaur.llm.validate import ValidationResult, validate_generated

__all__ = [
    "PromptBundle",
    "build_generation_prompt",
    "build_assessment_prompts",
    "BackendConfig",
    "invoke",
    "extract_verilog",
    "ValidationResult",
    "validate_generated",
]
