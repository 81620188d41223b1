"""HTTP chat-completion client for LLM planners."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import string
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .base import AuthError, ConfigError, MissingCredential, PlannerResponse, PlannerTimeout, TransportError
from .decode import PlanDecodeError, Truncated, decode_plan_json
from .prompt import build_prompt

log = logging.getLogger(__name__)

# finish reasons that mean the provider stopped at the output-token limit
_LENGTH_STOPS = {"length", "max_tokens", "MAX_TOKENS"}


@dataclass(frozen=True)
class LlmPlannerConfig:
    display_name: str
    endpoint_url: str
    model_id: str
    api_key_env_var: str
    max_output_tokens: int = 8192
    temperature: float = 0.0
    request_timeout_seconds: float = 600
    max_retries: int = 2
    backoff_seconds: float = 1.0
    max_concurrency: int = 1
    # JSON text with $model, $system, $user, $max_tokens, $temperature placeholders
    request_template: str | None = None
    response_path: str = "choices.0.message.content"
    finish_reason_path: str | None = "choices.0.finish_reason"
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    extra_headers: dict = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.request_timeout_seconds <= 0:
            raise ConfigError("request_timeout_seconds must be > 0")
        if self.max_output_tokens <= 0:
            raise ConfigError("max_output_tokens must be > 0")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_concurrency < 1:
            raise ConfigError("max_concurrency must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "LlmPlannerConfig":
        data = {k: v for k, v in data.items() if k != "kind"}
        if any(k in data for k in ("api_key", "secret", "token")):
            raise ConfigError("secrets must not be stored in config; name an environment variable instead")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown LLM planner config field(s): {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "LlmPlannerConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(data)


def build_request_body(config: LlmPlannerConfig, system_text: str, user_text: str) -> str:
    values = {
        "model": config.model_id,
        "system": system_text,
        "user": user_text,
        "max_tokens": config.max_output_tokens,
        "temperature": config.temperature,
    }
    if config.request_template:
        try:
            body = string.Template(config.request_template).substitute(
                {k: json.dumps(v) for k, v in values.items()}
            )
            json.loads(body)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad request_template: {exc}") from None
        return body
    return json.dumps(
        {
            "model": config.model_id,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "max_tokens": config.max_output_tokens,
            "temperature": config.temperature,
        }
    )


def dig(obj, path: str):
    """Follow a dotted path such as ``choices.0.message.content``."""
    for part in path.split("."):
        if isinstance(obj, list):
            obj = obj[int(part)]
        elif isinstance(obj, dict):
            obj = obj[part]
        else:
            raise KeyError(part)
    return obj


def _post(config: LlmPlannerConfig, body: str, headers: dict) -> tuple[requests.Response, float]:
    attempt = 0
    while True:
        start = time.monotonic()
        try:
            resp = requests.post(
                config.endpoint_url, data=body.encode("utf-8"), headers=headers,
                timeout=config.request_timeout_seconds,
            )
        except requests.Timeout:
            raise PlannerTimeout(f"no response within {config.request_timeout_seconds}s") from None
        except requests.RequestException as exc:
            error = TransportError(f"{type(exc).__name__}: {exc}")
        else:
            latency = time.monotonic() - start
            if resp.status_code in (401, 403):
                raise AuthError(f"HTTP {resp.status_code}: {resp.text[:300]}")
            if resp.status_code == 429 or resp.status_code >= 500:
                error = TransportError(f"HTTP {resp.status_code}: {resp.text[:300]}")
            elif resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:300]}")
            else:
                return resp, latency
        if attempt >= config.max_retries:
            raise error
        wait = config.backoff_seconds * 2**attempt
        log.warning("%s: %s; retrying in %.2fs", config.display_name, error, wait)
        time.sleep(wait)
        attempt += 1


def request_llm_plan(config: LlmPlannerConfig, system_text: str, user_text: str) -> PlannerResponse:
    """Send one planning request and decode the reply.

    Raises MissingCredential before any network traffic when the API key variable
    is unset. Transport failures (connection errors, HTTP 429/5xx) are
    retried ``max_retries`` times with exponential backoff; timeouts and
    other HTTP errors are not. ``latency_seconds`` is the wall-clock time of
    the successful request.
    """
    key = os.environ.get(config.api_key_env_var)
    if not key:
        raise MissingCredential(f"environment variable {config.api_key_env_var} is not set")
    headers = {"Content-Type": "application/json", **config.extra_headers}
    headers[config.auth_header] = f"{config.auth_scheme} {key}".strip()
    body = build_request_body(config, system_text, user_text)

    resp, latency = _post(config, body, headers)
    try:
        payload = resp.json()
        text = dig(payload, config.response_path)
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"unexpected response body ({exc}): {resp.text[:300]}") from None
    text = text or ""
    if not isinstance(text, str):
        raise TransportError(f"response content at {config.response_path} is not text")
    finish = None
    if config.finish_reason_path:
        try:
            finish = dig(payload, config.finish_reason_path)
        except (KeyError, IndexError, ValueError, TypeError):
            finish = None

    try:
        plan = decode_plan_json(text)
    except PlanDecodeError as exc:
        return PlannerResponse(
            raw_text=text,
            plan=None,
            decode_error=str(exc) if text else None,
            latency_seconds=latency,
            truncated=isinstance(exc, Truncated) or finish in _LENGTH_STOPS,
            decode_kind=exc.kind,
        )
    plan = dataclasses.replace(plan, gen_time_seconds=latency)
    return PlannerResponse(text, plan, None, latency, truncated=finish in _LENGTH_STOPS)


class LlmPlanner:
    def __init__(self, config: LlmPlannerConfig):
        self.config = config
        self.name = config.display_name
        self.concurrency_key = config.endpoint_url
        self.max_concurrency = config.max_concurrency

    def available(self) -> str | None:
        if not os.environ.get(self.config.api_key_env_var):
            return f"environment variable {self.config.api_key_env_var} is not set"
        return None

    def solve(self, domain_file: Path, problem_file: Path) -> PlannerResponse:
        system, user = build_prompt(
            Path(domain_file).read_text(encoding="utf-8"), Path(problem_file).read_text(encoding="utf-8")
        )
        return request_llm_plan(self.config, system, user)
