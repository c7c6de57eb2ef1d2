"""Entity A: the e-commerce side replaying orders to Entity B."""

from __future__ import annotations

import json
import logging
import random
import statistics
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from ..ecmath import CurveParams, ECPoint
from .crypto import generate_keypair
from .orders import read_orders
from .params import params_from_wire
from .wire import seal

logger = logging.getLogger(__name__)


class ServerUnavailable(ConnectionError):
    pass


def _request(method: str, url: str, body: Optional[dict], timeout: float) -> tuple[int, dict]:
    data = None if body is None else json.dumps(body).encode("utf-8")
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.status, json.loads(resp.read() or b"{}")
    except urllib.error.HTTPError as exc:
        try:
            payload = json.loads(exc.read() or b"{}")
        except ValueError:
            payload = {"status": "error"}
        return exc.code, payload


def http_json(method: str, url: str, body: Optional[dict] = None, *, timeout: float = 10.0,
              retries: int = 3, backoff: float = 0.2) -> tuple[int, dict]:
    """One JSON request with retry and exponential backoff on connection errors."""
    for attempt in range(retries + 1):
        try:
            return _request(method, url, body, timeout)
        except (urllib.error.URLError, ConnectionError, TimeoutError, OSError) as exc:
            if attempt == retries:
                raise ServerUnavailable(f"{method} {url}: {exc}") from exc
            time.sleep(backoff * 2 ** attempt)
    raise AssertionError("unreachable")


def fetch_params(server: str, **kw) -> CurveParams:
    status, body = http_json("GET", f"{server}/ecc_params", **kw)
    if status != 200:
        raise ServerUnavailable(f"/ecc_params returned {status}")
    return params_from_wire(body)


def fetch_public_key(server: str, **kw) -> ECPoint:
    status, body = http_json("GET", f"{server}/public_key", **kw)
    if status != 200:
        raise ServerUnavailable(f"/public_key returned {status}")
    return ECPoint(int(body["x"]), int(body["y"]))


@dataclass
class TransactionSummary:
    sent: int = 0
    accepted: int = 0
    rejected: int = 0
    connection_failures: int = 0
    skipped_rows: int = 0
    latencies: list = field(default_factory=list)
    statuses: dict = field(default_factory=dict)
    payloads: dict = field(default_factory=dict)

    @property
    def latency_mean(self) -> float:
        return statistics.fmean(self.latencies) if self.latencies else 0.0

    @property
    def latency_max(self) -> float:
        return max(self.latencies, default=0.0)

    def as_dict(self) -> dict:
        return {"sent": self.sent, "accepted": self.accepted, "rejected": self.rejected,
                "connection_failures": self.connection_failures,
                "skipped_rows": self.skipped_rows,
                "latency_mean": self.latency_mean, "latency_max": self.latency_max}


def run_entity_a(server: str, orders_path: Optional[Union[str, Path]] = None, duration: float = 10.0,
                 interval: float = 0.5, rng: Optional[random.Random] = None, *,
                 max_orders: Optional[int] = None, params_override: Optional[CurveParams] = None,
                 timeout: float = 10.0, retries: int = 3) -> TransactionSummary:
    """Send encrypted, authenticated orders until ``duration`` elapses.

    ``params_override`` makes the client use its own curve instead of the one
    the server advertises; ``max_orders`` caps the number of sends.
    """
    rng = rng or random.Random()
    records, skipped = read_orders(orders_path)
    summary = TransactionSummary(skipped_rows=skipped)
    if not records:
        return summary
    params = params_override or fetch_params(server, timeout=timeout, retries=retries)
    server_public = fetch_public_key(server, timeout=timeout, retries=retries)
    keys = generate_keypair(params, rng)

    end = time.monotonic() + duration
    i = 0
    while time.monotonic() < end and (max_orders is None or summary.sent < max_orders):
        record = records[i % len(records)]
        request_id = f"{i:06d}-{rng.getrandbits(32):08x}"
        plaintext = record.to_json()
        start = time.monotonic()
        try:
            envelope = seal(plaintext, keys.private, keys.public, server_public, params, rng,
                            request_id)
            status, _ = http_json("POST", f"{server}/order", envelope.to_wire(),
                                  timeout=timeout, retries=retries)
        except ServerUnavailable as exc:
            logger.warning("order %s not delivered: %s", request_id, exc)
            summary.connection_failures += 1
            status = None
        except ValueError as exc:
            # Client-side failure, e.g. our curve does not contain the server key.
            logger.warning("order %s could not be sealed: %s", request_id, exc)
            status = None
            summary.rejected += 1
        summary.sent += 1
        summary.latencies.append(time.monotonic() - start)
        summary.statuses[request_id] = status
        summary.payloads[request_id] = plaintext
        if status == 200:
            summary.accepted += 1
        elif status is not None:
            summary.rejected += 1
        i += 1
        if interval > 0:
            time.sleep(interval)
    return summary
