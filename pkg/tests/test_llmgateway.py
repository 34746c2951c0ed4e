import json

import pytest

from tabletextqa.errors import BackendError, DataError
from tabletextqa.llmgateway import (
    CompletionCache,
    CompletionRequest,
    HttpBackend,
    LlmGateway,
    MockBackend,
    prompt_hash,
    request_key,
    write_mock_script,
)


def gateway(tmp_path, script=None):
    backend = MockBackend(script or {prompt_hash("p"): "42"})
    cache = CompletionCache(tmp_path / "cache.jsonl")
    return LlmGateway(backend, cache)


class TestRequests:
    def test_empty_prompt_rejected(self):
        with pytest.raises(DataError):
            CompletionRequest(prompt="")

    def test_negative_temperature_rejected(self):
        with pytest.raises(DataError):
            CompletionRequest(prompt="p", temperature=-0.1)

    def test_request_key_stable_across_instances(self):
        a = CompletionRequest(prompt="p", temperature=0.0, max_tokens=64, model_name="m")
        b = CompletionRequest(prompt="p", temperature=0.0, max_tokens=64, model_name="m")
        assert request_key(a) == request_key(b)
        # pinned: a process restart must produce this same key
        assert request_key(a) == (
            "a892f1ea7de47b3243c1d0abf696b46dfe9c46fe3cf71cfd15a4949bce377086"
        )

    def test_key_distinguishes_fields(self):
        base = CompletionRequest(prompt="p")
        assert request_key(base) != request_key(CompletionRequest(prompt="p2"))
        assert request_key(base) != request_key(CompletionRequest(prompt="p", temperature=1.0))


class TestMockBackend:
    def test_scripted_completion(self, tmp_path):
        result = gateway(tmp_path).complete(CompletionRequest(prompt="p"))
        assert result.text == "42"
        assert result.cached is False

    def test_unscripted_prompt_names_hash(self, tmp_path):
        with pytest.raises(BackendError, match=prompt_hash("unknown")):
            gateway(tmp_path).complete(CompletionRequest(prompt="unknown"))

    def test_script_file_roundtrip(self, tmp_path):
        path = tmp_path / "script.jsonl"
        write_mock_script({"p": "out"}, path)
        backend = MockBackend.from_file(path)
        assert backend.complete(CompletionRequest(prompt="p")) == "out"

    def test_script_file_plain_prompt_key(self, tmp_path):
        path = tmp_path / "script.jsonl"
        path.write_text(json.dumps({"prompt": "p", "text": "out"}) + "\n")
        assert MockBackend.from_file(path).complete(CompletionRequest(prompt="p")) == "out"


class TestCache:
    def test_second_call_is_cached_and_identical(self, tmp_path):
        gw = gateway(tmp_path)
        first = gw.complete(CompletionRequest(prompt="p"))
        second = gw.complete(CompletionRequest(prompt="p"))
        assert second.cached is True
        assert second.text == first.text

    def test_cache_survives_reopen(self, tmp_path):
        gw = gateway(tmp_path)
        gw.complete(CompletionRequest(prompt="p"))

        class ExplodingBackend:
            def complete(self, req):
                raise AssertionError("network call on a warmed cache")

        cache = CompletionCache(tmp_path / "cache.jsonl")
        gw2 = LlmGateway(ExplodingBackend(), cache)
        result = gw2.complete(CompletionRequest(prompt="p"))
        assert result.cached is True
        assert result.text == "42"

    def test_malformed_cache_line_rejected(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text("{broken\n")
        with pytest.raises(DataError, match="line 1"):
            CompletionCache(path)


class _FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload or {}
        self.text = text

    def json(self):
        return self._payload

    def raise_for_status(self):
        if self.status_code >= 400:
            raise RuntimeError(f"status {self.status_code}")


class _FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls += 1
        return self.responses.pop(0)


class TestHttpBackend:
    def test_success(self):
        session = _FakeSession([_FakeResponse(payload={"choices": [{"text": "ok"}]})])
        backend = HttpBackend("http://endpoint", session=session)
        assert backend.complete(CompletionRequest(prompt="p")) == "ok"

    def test_retry_then_success(self, monkeypatch):
        monkeypatch.setattr("time.sleep", lambda s: None)
        session = _FakeSession(
            [
                _FakeResponse(status_code=500, text="boom"),
                _FakeResponse(payload={"choices": [{"text": "ok"}]}),
            ]
        )
        backend = HttpBackend("http://endpoint", session=session)
        assert backend.complete(CompletionRequest(prompt="p")) == "ok"
        assert session.calls == 2

    def test_exhausted_retries_surface(self, monkeypatch):
        monkeypatch.setattr("time.sleep", lambda s: None)
        session = _FakeSession([_FakeResponse(status_code=429, text="limit")] * 3)
        backend = HttpBackend("http://endpoint", session=session)
        with pytest.raises(BackendError, match="3 attempts"):
            backend.complete(CompletionRequest(prompt="p"))

    def test_auth_failure_not_retried(self):
        session = _FakeSession([_FakeResponse(status_code=401)])
        backend = HttpBackend("http://endpoint", api_key_env="MISSING_KEY", session=session)
        with pytest.raises(BackendError, match="MISSING_KEY"):
            backend.complete(CompletionRequest(prompt="p"))
        assert session.calls == 1
