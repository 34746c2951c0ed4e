"""Uniform completion interface: HTTP endpoint, scripted mock, replay cache.

Requests are keyed by a content hash over every request field; the cache is
an append-only JSONL so a fully warmed cache replays a run byte-for-byte
with zero network calls. The mock backend maps prompt hashes to canned
completions and refuses unknown prompts rather than fabricating output.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import BackendError, ConfigError, DataError

HTTP_RETRIES = 3
HTTP_BACKOFF_S = 0.5


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 512
    model_name: str = "mock"
    stop: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.prompt:
            raise DataError("completion prompt must be nonempty")
        if self.temperature < 0:
            raise DataError(f"temperature must be >= 0, got {self.temperature}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    cached: bool
    latency_ms: int


def request_key(req: CompletionRequest) -> str:
    payload = {
        "prompt": req.prompt,
        "temperature": req.temperature,
        "max_tokens": req.max_tokens,
        "model_name": req.model_name,
        "stop": list(req.stop) if req.stop else None,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class CompletionCache:
    """Append-only JSONL keyed by request hash; loaded fully at open."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, str] = {}
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError:
                        raise DataError(
                            f"{self.path}: malformed cache line {lineno}"
                        ) from None
                    self._entries[rec["key"]] = rec["text"]

    def get(self, key: str) -> str | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, text: str) -> None:
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = text
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps({"key": key, "text": text}, ensure_ascii=False) + "\n")

    def __len__(self) -> int:
        return len(self._entries)


class MockBackend:
    """Scripted completions: prompt hash -> text. Unknown prompts raise."""

    def __init__(self, script: dict[str, str]):
        self._script = dict(script)

    @staticmethod
    def from_file(path: str | Path) -> "MockBackend":
        script: dict[str, str] = {}
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"mock script does not exist: {path}")
        with path.open("r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if "prompt_sha256" in rec:
                    script[rec["prompt_sha256"]] = rec["text"]
                elif "prompt" in rec:
                    script[prompt_hash(rec["prompt"])] = rec["text"]
                else:
                    raise DataError(f"{path}: mock entry needs prompt or prompt_sha256")
        return MockBackend(script)

    def complete(self, req: CompletionRequest) -> str:
        key = prompt_hash(req.prompt)
        if key not in self._script:
            raise BackendError(f"mock backend has no completion for prompt hash {key}")
        return self._script[key]


class HttpBackend:
    """Plain JSON text-completion endpoint (prompt in, choices[].text out)."""

    def __init__(
        self,
        base_url: str,
        api_key_env: str = "TTQA_API_KEY",
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ):
        if not base_url:
            raise ConfigError("http backend requires a base URL")
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def complete(self, req: CompletionRequest) -> str:
        key = os.environ.get(self.api_key_env, "")
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": req.model_name,
            "prompt": req.prompt,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.stop:
            body["stop"] = list(req.stop)
        last_error: Exception | None = None
        for attempt in range(HTTP_RETRIES):
            try:
                resp = self._session.post(
                    f"{self.base_url}/completions",
                    json=body,
                    headers=headers,
                    timeout=self.timeout_s,
                )
                if resp.status_code in (401, 403):
                    raise BackendError(
                        f"authentication failed ({resp.status_code}); "
                        f"check ${self.api_key_env}"
                    )
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = BackendError(
                        f"endpoint returned {resp.status_code}: {resp.text[:200]}"
                    )
                else:
                    resp.raise_for_status()
                    payload = resp.json()
                    return payload["choices"][0]["text"]
            except BackendError:
                raise
            except Exception as exc:  # connection errors, bad payloads
                last_error = exc
            time.sleep(HTTP_BACKOFF_S * (2 ** attempt))
        raise BackendError(f"completion failed after {HTTP_RETRIES} attempts: {last_error}")


class LlmGateway:
    """Cache-first completion calls over a backend, safe for concurrent use."""

    def __init__(self, backend, cache: CompletionCache, max_in_flight: int = 4):
        self.backend = backend
        self.cache = cache
        self._gate = threading.Semaphore(max_in_flight)

    def complete(self, req: CompletionRequest) -> CompletionResult:
        key = request_key(req)
        hit = self.cache.get(key)
        if hit is not None:
            return CompletionResult(text=hit, cached=True, latency_ms=0)
        start = time.monotonic()
        with self._gate:
            text = self.backend.complete(req)
        latency_ms = int((time.monotonic() - start) * 1000)
        self.cache.put(key, text)
        return CompletionResult(text=text, cached=False, latency_ms=latency_ms)


def write_mock_script(entries: dict[str, str], path: str | Path) -> None:
    """Persist prompt->completion pairs as a mock script (hashes prompts)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for prompt, text in entries.items():
            f.write(
                json.dumps(
                    {"prompt_sha256": prompt_hash(prompt), "text": text},
                    ensure_ascii=False,
                )
                + "\n"
            )
