"""
Remote logit service adapter.

Protocol:
  GET  /v1/vocab           -> {"tokens": [...], "eos": int}
  POST /v1/next_logprobs   {"tokens": [int...]} -> {"logprobs": [float; |V|]}

Received log-probabilities are renormalized. Requests are serialized; the
service is not assumed to be stationary.
"""

from typing import Any, Dict, Optional, Tuple
import threading
import time

import httpx
import numpy as np

from ..utils.fingerprint import fingerprint_payload
from .base_model import ModelError, RemoteModelError, TokenModel, Vocabulary, normalize_logprobs

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class RemoteModel(TokenModel):
    """Token model answered by an HTTP logit service."""

    def __init__(self, url: str, vocabulary: Vocabulary, client: httpx.Client,
                 retries: int = 3, backoff_seconds: float = 0.25):
        super().__init__(vocabulary)
        self.url = url.rstrip("/")
        self.client = client
        self.retries = retries
        self.backoff_seconds = backoff_seconds
        self.request_count = 0
        self._lock = threading.Lock()

    @property
    def is_stationary(self) -> bool:
        return False

    def _next_logprobs(self, prefix: Tuple[int, ...]) -> np.ndarray:
        payload = _request_json(self.client, "POST", f"{self.url}/v1/next_logprobs",
                                self.retries, self.backoff_seconds, self._lock,
                                json={"tokens": list(prefix)})
        self.request_count += 1
        values = payload.get("logprobs") if isinstance(payload, dict) else None
        if not isinstance(values, list):
            raise RemoteModelError("Malformed response: missing 'logprobs' list")
        if len(values) != len(self.vocabulary):
            raise RemoteModelError(
                f"Vector length mismatch: expected {len(self.vocabulary)}, got {len(values)}")
        try:
            return normalize_logprobs([float(v) for v in values], len(self.vocabulary))
        except (TypeError, ValueError) as e:
            raise RemoteModelError(f"Malformed response: {e}")
        except ModelError as e:
            raise RemoteModelError(f"Invalid log-probabilities from service: {e}")

    def get_model_name(self) -> str:
        return f"remote({self.url})"

    def fingerprint(self) -> str:
        # Only the endpoint and vocabulary identify a remote model.
        return fingerprint_payload({"backend": "remote", "url": self.url,
                                    "vocab": self.vocabulary.to_dict()})

    def close(self) -> None:
        self.client.close()


def _request_json(client: httpx.Client, method: str, url: str, retries: int,
                  backoff_seconds: float, lock: Optional[threading.Lock] = None,
                  **kwargs: Any) -> Any:
    """Send a request with exponential backoff on transport errors, 429 and 5xx."""
    last_error = "no attempt made"
    for attempt in range(retries + 1):
        try:
            if lock is not None:
                with lock:
                    response = client.request(method, url, **kwargs)
            else:
                response = client.request(method, url, **kwargs)
        except httpx.HTTPError as exc:
            last_error = f"transport error: {exc}"
        else:
            if response.status_code == 200:
                try:
                    return response.json()
                except ValueError as exc:
                    raise RemoteModelError(f"Malformed response from {url}: {exc}")
            if response.status_code not in RETRYABLE_STATUS:
                raise RemoteModelError(f"{method} {url} failed with HTTP {response.status_code}")
            last_error = f"HTTP {response.status_code}"
        if attempt < retries:
            time.sleep(backoff_seconds * (2 ** attempt))
    raise RemoteModelError(f"{method} {url} failed after {retries + 1} attempts ({last_error})")


def connect_remote(url: str, timeout_ms: int = 10000, retries: int = 3,
                   backoff_seconds: float = 0.25,
                   transport: Optional[httpx.BaseTransport] = None) -> RemoteModel:
    """
    Open a client to a logit service and fetch its vocabulary.

    Args:
        url: Base URL of the service
        timeout_ms: Per-request timeout in milliseconds
        retries: Extra attempts after the first failure
        backoff_seconds: Base delay, doubled after every failed attempt
        transport: Optional httpx transport (tests use httpx.MockTransport)

    Raises:
        RemoteModelError: service unreachable or vocabulary malformed
    """
    client = httpx.Client(timeout=timeout_ms / 1000.0, transport=transport,
                          headers={"Content-Type": "application/json"})
    base = url.rstrip("/")
    try:
        payload = _request_json(client, "GET", f"{base}/v1/vocab", retries, backoff_seconds)
        vocabulary = Vocabulary(tuple(payload["tokens"]), int(payload["eos"]))
    except (KeyError, TypeError, ValueError) as e:
        client.close()
        raise RemoteModelError(f"Malformed vocabulary response: {e}")
    except RemoteModelError:
        client.close()
        raise
    except ModelError as e:
        client.close()
        raise RemoteModelError(f"Invalid vocabulary from service: {e}")
    return RemoteModel(base, vocabulary, client, retries=retries, backoff_seconds=backoff_seconds)
