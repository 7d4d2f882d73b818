"""Clients for remote transliteration/translation services.

Every fetch goes through a persistent line-oriented cache first, so reruns
are free and the test suite never touches a network. Batches are retried
with exponential backoff, failed items individually; a token-bucket limiter
keeps the request rate under the configured ceiling. Mock providers (echo
and dictionary-backed) implement the same transport protocol: a callable
taking a list of input strings and returning parallel outputs, with None
marking a retryable per-item failure.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import urllib.error
import urllib.request
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal

from .errors import AuthError, CacheError, ConfigError, ProviderError

API_KEY_ENV = "CSF_PROVIDER_KEY"

Transport = Callable[[list[str]], list["str | None"]]


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str = ""
    api_key: str | None = None  # falls back to $CSF_PROVIDER_KEY
    timeout: float = 10.0
    max_retries: int = 3
    backoff_base: float = 0.5
    backoff_factor: float = 2.0
    batch_size: int = 25
    rate_limit: float = 5.0  # requests per second

    def __post_init__(self):
        if self.timeout <= 0:
            raise ConfigError("timeout must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")


def cache_key(kind: str, source: str, target: str, text: str) -> str:
    """Stable 256-bit content hash over the full request identity."""
    payload = "\x1f".join((kind, source, target, text)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class Cache:
    """Append-only key-value file, one JSON record per line.

    A corrupt trailing line (truncated write) is tolerated and dropped;
    corruption anywhere else is an error. Reads are lock-free against the
    in-memory map; writes are serialized.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._data: dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as f:
            lines = f.read().split("\n")
        while lines and lines[-1] == "":
            lines.pop()
        for i, line in enumerate(lines):
            try:
                rec = json.loads(line)
                k, v = rec["k"], rec["v"]
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                if i == len(lines) - 1:
                    break  # truncated final write
                raise CacheError(f"{self.path}:{i + 1}: corrupt cache record") from e
            self._data[k] = v

    def get(self, key: str) -> str | None:
        return self._data.get(key)

    def put(self, key: str, value: str) -> None:
        with self._lock:
            if self._data.get(key) == value:
                return
            self._data[key] = value
            rec = {"k": key, "v": value, "t": int(time.time())}
            with open(self.path, "a", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
                f.flush()

    def __len__(self) -> int:
        return len(self._data)


class RateLimiter:
    """Sliding-window limiter: at most `rate` acquisitions per second."""

    def __init__(self, rate: float, now_fn=time.monotonic, sleep_fn=time.sleep):
        self.rate = rate
        self.now_fn = now_fn
        self.sleep_fn = sleep_fn
        self._times: deque[float] = deque()

    def acquire(self) -> None:
        if self.rate <= 0:
            return
        while True:
            now = self.now_fn()
            while self._times and now - self._times[0] >= 1.0:
                self._times.popleft()
            if len(self._times) < self.rate:
                self._times.append(now)
                return
            # overshoot by 1µs so float rounding cannot leave the window
            # boundary unexpired (and a zero-advance fake clock cannot spin)
            self.sleep_fn(max(self._times[0] + 1.0 - now, 0.0) + 1e-6)


class EchoProvider:
    """Identity transport; counts calls for cache/batching assertions."""

    def __init__(self):
        self.calls = 0
        self.batches: list[list[str]] = []

    def __call__(self, items: list[str]) -> list[str | None]:
        self.calls += 1
        self.batches.append(list(items))
        return list(items)


class DictionaryProvider:
    """Transport backed by a fixed lookup table. Unknown inputs echo back,
    or fail (None) in strict mode."""

    def __init__(self, mapping: dict[str, str], strict: bool = False):
        self.mapping = dict(mapping)
        self.strict = strict
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path, strict: bool = False) -> "DictionaryProvider":
        mapping = {}
        with open(path, encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ConfigError(f"{path}:{lineno}: expected 'src<TAB>dst'")
                mapping[parts[0]] = parts[1]
        return cls(mapping, strict=strict)

    def __call__(self, items: list[str]) -> list[str | None]:
        self.calls += 1
        if self.strict:
            return [self.mapping.get(x) for x in items]
        return [self.mapping.get(x, x) for x in items]


def http_transport(cfg: ProviderConfig, kind: str, source: str, target: str) -> Transport:
    """Thin JSON-over-POST vendor adapter.

    Request: {"kind", "source", "target", "items": [...]};
    response: {"items": [...]} with null for per-item failures.
    """
    if not cfg.endpoint:
        raise ConfigError("provider endpoint not configured")
    api_key = cfg.api_key or os.environ.get(API_KEY_ENV)

    def send(items: list[str]) -> list[str | None]:
        payload = json.dumps(
            {"kind": kind, "source": source, "target": target, "items": items}
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        req = urllib.request.Request(cfg.endpoint, data=payload, headers=headers)
        try:
            with urllib.request.urlopen(req, timeout=cfg.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as e:
            if e.code in (401, 403):
                raise AuthError(f"provider rejected credentials (HTTP {e.code})") from e
            raise ProviderError(f"provider HTTP {e.code}") from e
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as e:
            raise ProviderError(f"provider request failed: {e}") from e
        out = body.get("items")
        if not isinstance(out, list) or len(out) != len(items):
            raise ProviderError("provider returned a malformed response")
        return out

    return send


def _fetch_batched(
    kind: str,
    cfg: ProviderConfig,
    cache: Cache,
    items: list[str],
    source: str,
    target: str,
    transport: Transport,
    rate_limiter: RateLimiter | None,
    sleep_fn,
    on_failure: Literal["raise", "none"],
) -> list[str | None]:
    if not items:
        raise ProviderError("input list is empty")
    limiter = rate_limiter or RateLimiter(cfg.rate_limit, sleep_fn=sleep_fn)

    results: list[str | None] = [None] * len(items)
    key_of: dict[int, str] = {}
    pending: list[str] = []  # unique keys, first-appearance order
    pending_text: dict[str, str] = {}
    for i, text in enumerate(items):
        if text == "":
            results[i] = ""  # degenerate input: no network, no cache
            continue
        key = cache_key(kind, source, target, text)
        key_of[i] = key
        hit = cache.get(key)
        if hit is not None:
            results[i] = hit
        elif key not in pending_text:
            pending.append(key)
            pending_text[key] = text

    fetched: dict[str, str] = {}
    dead: set[str] = set()
    for start in range(0, len(pending), cfg.batch_size):
        remaining = pending[start : start + cfg.batch_size]
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                sleep_fn(cfg.backoff_base * cfg.backoff_factor ** (attempt - 1))
            limiter.acquire()
            texts = [pending_text[k] for k in remaining]
            try:
                batch_out = transport(texts)
            except AuthError:
                raise
            except ProviderError:
                batch_out = [None] * len(texts)  # whole batch retryable
            still = []
            for k, value in zip(remaining, batch_out):
                if value is None:
                    still.append(k)
                else:
                    fetched[k] = value
                    cache.put(k, value)
            remaining = still
            if not remaining:
                break
        dead.update(remaining)

    for i, key in key_of.items():
        if results[i] is None:
            if key in fetched:
                results[i] = fetched[key]
    if dead:
        failed = sorted(i for i, k in key_of.items() if k in dead)
        if on_failure == "raise":
            raise ProviderError(
                f"{kind}: {len(failed)} items failed after "
                f"{cfg.max_retries} retries (indices {failed[:10]}{'...' if len(failed) > 10 else ''})",
                failed_indices=failed,
            )
    return results


def translate_sentences(
    cfg: ProviderConfig,
    cache: Cache,
    sentences: list[str],
    source: str = "hi",
    target: str = "en",
    *,
    transport: Transport | None = None,
    rate_limiter: RateLimiter | None = None,
    sleep_fn=time.sleep,
    on_failure: Literal["raise", "none"] = "raise",
) -> list[str | None]:
    """Translate sentences, cache-first. Output is parallel to the input;
    with on_failure="none", items that exhausted their retries come back
    as None instead of raising."""
    transport = transport or http_transport(cfg, "translate", source, target)
    return _fetch_batched(
        "translate", cfg, cache, sentences, source, target, transport,
        rate_limiter, sleep_fn, on_failure,
    )


def transliterate_remote(
    cfg: ProviderConfig,
    cache: Cache,
    words: list[str],
    source: str = "hi-latn",
    target: str = "hi-deva",
    *,
    transport: Transport | None = None,
    rate_limiter: RateLimiter | None = None,
    sleep_fn=time.sleep,
    on_failure: Literal["raise", "none"] = "raise",
) -> list[str | None]:
    """Remote transliteration with the same caching/batching contract as
    translate_sentences."""
    transport = transport or http_transport(cfg, "transliterate", source, target)
    return _fetch_batched(
        "transliterate", cfg, cache, words, source, target, transport,
        rate_limiter, sleep_fn, on_failure,
    )
