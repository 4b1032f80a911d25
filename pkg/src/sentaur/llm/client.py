"""Chat-completion client with retry, plus the offline mock endpoint.

Wire format: POST {model, messages:[{role,content}], temperature} to the
endpoint; the completion is response.choices[0].message.content.
Temperature is pinned to 0. Transient transport failures retry with
exponential backoff (rate limits honor Retry-After); authentication
failures never retry. The API key lives in an environment variable; the
config stores only the variable's NAME and no code path ever logs or
serializes the resolved secret.

Endpoints starting with "mock:" route to the deterministic offline
backend in sentaur.llm.mock.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import requests

from sentaur.errors import AuthError, MalformedResponse, RateLimited, TransportError
from sentaur.llm.mock import mock_completion
from sentaur.llm.prompts import PromptBundle

ENV_URL = "SENTAUR_LLM_URL"
ENV_MODEL = "SENTAUR_LLM_MODEL"
ENV_API_KEY = "SENTAUR_LLM_API_KEY"

MOCK_ENDPOINT = "mock:"


@dataclass
class BackendConfig:
    endpoint: str
    model: str = "default"
    api_key_env: str = ENV_API_KEY  # variable NAME; never the secret
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = field(default=0.0, init=False)

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @property
    def is_mock(self) -> bool:
        return self.endpoint.startswith(MOCK_ENDPOINT)

    def resolve_key(self) -> str:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise AuthError(
                f"no API key in environment variable {self.api_key_env}"
            )
        return key

    @staticmethod
    def from_env() -> "BackendConfig":
        url = os.environ.get(ENV_URL, "")
        if not url:
            raise AuthError(
                f"no backend configured; set {ENV_URL} (or use the mock)"
            )
        return BackendConfig(
            endpoint=url, model=os.environ.get(ENV_MODEL, "default")
        )


def _http_transport(url, payload, headers, timeout):
    """Default transport; returns (status, headers, parsed body)."""
    try:
        resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(str(exc)) from exc
    try:
        body = resp.json()
    except ValueError:
        body = None
    return resp.status_code, dict(resp.headers), body


def invoke(cfg: BackendConfig, bundle: PromptBundle, transport=None) -> str:
    """Raw completion text for the bundle.

    Retries transient transport failures up to cfg.max_retries with
    exponential backoff; Auth errors propagate immediately.
    """
    if cfg.is_mock:
        return mock_completion(bundle)
    key = cfg.resolve_key()
    send = transport or _http_transport
    payload = {
        "model": cfg.model,
        "messages": bundle.messages(),
        "temperature": cfg.temperature,
    }
    headers = {"Authorization": f"Bearer {key}"}

    last_error: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            delay = 0.25 * (2 ** (attempt - 1))
            if isinstance(last_error, RateLimited) and last_error.retry_after:
                delay = last_error.retry_after
            time.sleep(delay)
        try:
            status, resp_headers, body = send(
                cfg.endpoint, payload, headers, cfg.timeout
            )
        except AuthError:
            raise
        except TransportError as exc:
            last_error = exc
            continue
        if status in (401, 403):
            raise AuthError(f"backend rejected credentials (HTTP {status})")
        if status == 429:
            retry_after = float(resp_headers.get("Retry-After", 0) or 0)
            last_error = RateLimited(retry_after)
            continue
        if status >= 500:
            last_error = TransportError(f"server error (HTTP {status})")
            continue
        if status != 200 or body is None:
            raise MalformedResponse(f"HTTP {status}: {json.dumps(body)[:200]}")
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(
                f"response missing choices[0].message.content: {exc}"
            ) from exc
    raise last_error if last_error else TransportError("no attempts made")


def request_json_findings(cfg: BackendConfig, bundle: PromptBundle, transport=None):
    """Invoke an assessment bundle and parse its JSON finding list.

    Free-text answers are rejected and re-requested once with a
    format reminder; returns (findings or None, raw text).
    """
    raw = invoke(cfg, bundle, transport)
    try:
        return json.loads(raw), raw
    except ValueError:
        pass
    from dataclasses import replace

    reminder = replace(
        bundle,
        user_text=bundle.user_text
        + " Your previous answer was not valid JSON. Respond with ONLY the JSON list.",
    )
    raw = invoke(cfg, reminder, transport)
    try:
        return json.loads(raw), raw
    except ValueError:
        return None, raw
