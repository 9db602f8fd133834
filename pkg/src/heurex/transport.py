"""Completion transports: a real chat-completions client and a scripted
replay used for offline tests and fixtures."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

from .errors import HeurexError

ROLES = ("system", "user", "assistant")

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-4"

ENV_API_KEY = "HEUREX_API_KEY"
ENV_ENDPOINT = "HEUREX_ENDPOINT"
ENV_MODEL = "HEUREX_MODEL"


class TransportError(HeurexError, RuntimeError):
    pass


@dataclass(frozen=True)
class PromptMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = 0.0
    max_output_tokens: int = 2048
    model: str = DEFAULT_MODEL


class CompletionTransport(Protocol):
    def complete(
        self, messages: Sequence[PromptMessage], params: CompletionParams
    ) -> str: ...


def prompt_hash(messages: Sequence[PromptMessage]) -> str:
    """Stable digest of a prompt, used to key scripted responses."""
    payload = "\x1e".join(f"{m.role}\x1f{m.content}" for m in messages)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class ScriptedTransport:
    """Replays canned responses keyed by prompt hash. Fully deterministic."""

    script: dict[str, str] = field(default_factory=dict)
    calls: list[str] = field(default_factory=list)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedTransport":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise TransportError(f"cannot read scripted transport {path}: {exc}") from exc
        if not isinstance(data, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()
        ):
            raise TransportError(
                f"scripted transport {path} must map prompt hashes to response text"
            )
        return cls(script=data)

    @classmethod
    def from_pairs(
        cls, pairs: Sequence[tuple[Sequence[PromptMessage], str]]
    ) -> "ScriptedTransport":
        transport = cls()
        for messages, response in pairs:
            transport.add(messages, response)
        return transport

    def add(self, messages: Sequence[PromptMessage], response: str) -> str:
        digest = prompt_hash(messages)
        self.script[digest] = response
        return digest

    def complete(
        self, messages: Sequence[PromptMessage], params: CompletionParams
    ) -> str:
        digest = prompt_hash(messages)
        self.calls.append(digest)
        if digest not in self.script:
            raise TransportError(f"no scripted response for prompt hash {digest}")
        return self.script[digest]

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.script, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


class HttpTransport:
    """Minimal chat-completions client. The bearer key comes from the
    environment so it never lands in saved sessions or reports."""

    def __init__(
        self,
        endpoint: str = DEFAULT_ENDPOINT,
        api_key: str | None = None,
        timeout: float = 60.0,
    ):
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY)
        self.timeout = timeout

    @classmethod
    def from_env(cls) -> "HttpTransport":
        return cls(endpoint=os.environ.get(ENV_ENDPOINT, DEFAULT_ENDPOINT))

    def complete(
        self, messages: Sequence[PromptMessage], params: CompletionParams
    ) -> str:
        import httpx

        if not self.api_key:
            raise TransportError(f"no API key; set {ENV_API_KEY}")
        payload = {
            "model": params.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        try:
            response = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise TransportError(f"completion request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError(f"unexpected completion response shape: {exc}") from exc


def default_model() -> str:
    return os.environ.get(ENV_MODEL, DEFAULT_MODEL)
