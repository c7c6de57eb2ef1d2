"""Entity B: the simulated ERP endpoint that receives encrypted orders."""

from __future__ import annotations

import csv
import json
import logging
import random
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Union

from ..ecmath import CurveParams
from ..fitness import validate_curve
from .crypto import DecryptionFailed, KeyPair, OffCurve, InfinityResult, generate_keypair, generate_public_key
from .orders import OrderRecord
from .params import load_params, params_to_wire
from .wire import MalformedEnvelope, OrderEnvelope, open_envelope, verify_envelope

logger = logging.getLogger(__name__)


class StartupError(RuntimeError):
    pass


@dataclass
class ServerConfig:
    seed: Optional[int] = None
    private_key: Optional[int] = None
    params_dir: Union[str, Path] = "."
    order_log_csv: Optional[Union[str, Path]] = None


@dataclass
class ReceivedOrder:
    order_id: str
    request_id: str
    plaintext: bytes
    order: OrderRecord


@dataclass
class EntityB:
    """Handle to a running server; ``stop()`` shuts it down."""

    params: CurveParams
    keypair: KeyPair
    httpd: ThreadingHTTPServer
    thread: threading.Thread
    orders: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    rejected: int = 0
    order_log_csv: Optional[Path] = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self.httpd.server_address[:2]
        return host, port

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self.thread.join(timeout=5)
        if self.order_log_csv is not None:
            self.dump_orders(self.order_log_csv)

    def dump_orders(self, path) -> None:
        with self.lock, open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["order_id", "request_id", "payload"])
            for rec in self.orders:
                writer.writerow([rec.order_id, rec.request_id, rec.plaintext.decode("utf-8")])

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.stop()

    def handle_order(self, body: dict) -> tuple[int, dict]:
        try:
            envelope = OrderEnvelope.from_wire(body)
        except MalformedEnvelope as exc:
            return 400, {"status": "error", "error": str(exc)}
        try:
            authentic = verify_envelope(envelope, self.keypair.private, self.params)
        except (OffCurve, InfinityResult) as exc:
            return 400, {"status": "error", "error": f"bad sender key: {exc}"}
        if not authentic:
            return 400, {"status": "error", "error": "HMAC verification failed"}
        try:
            plaintext = open_envelope(envelope, self.keypair.private, self.params)
            order = OrderRecord.from_json(plaintext)
        except (DecryptionFailed, ValueError, KeyError, TypeError) as exc:
            return 422, {"status": "error", "error": f"decryption failed: {exc}"}
        order_id = uuid.uuid4().hex
        with self.lock:
            self.orders.append(ReceivedOrder(order_id, envelope.request_id, plaintext, order))
        return 200, {"status": "ok", "order_id": order_id, "request_id": envelope.request_id}


def _make_handler(server: "EntityB"):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            logger.debug("%s - %s", self.address_string(), fmt % args)

        def _reply(self, status: int, body: dict) -> None:
            data = json.dumps(body).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/ecc_params":
                self._reply(200, {"status": "ok", **params_to_wire(server.params)})
            elif self.path == "/public_key":
                pub = server.keypair.public
                self._reply(200, {"status": "ok", "x": str(pub.x), "y": str(pub.y)})
            else:
                self._reply(404, {"status": "error", "error": "not found"})

        def do_POST(self):
            if self.path != "/order":
                self._reply(404, {"status": "error", "error": "not found"})
                return
            length = int(self.headers.get("Content-Length") or 0)
            try:
                body = json.loads(self.rfile.read(length) or b"null")
                if not isinstance(body, dict):
                    raise ValueError("body must be a JSON object")
            except ValueError as exc:
                self._reply(400, {"status": "error", "error": f"invalid JSON: {exc}"})
                return
            status, reply = server.handle_order(body)
            if status != 200:
                with server.lock:
                    server.rejected += 1
            self._reply(status, reply)

    return Handler


def serve_entity_b(params_choice=None, bind_address: tuple[str, int] = ("127.0.0.1", 0),
                   config: Optional[ServerConfig] = None) -> EntityB:
    """Load and validate the curve, create the server key pair and start serving
    on a background thread."""
    config = config or ServerConfig()
    try:
        params = load_params(params_choice, config.params_dir)
    except (OSError, ValueError, KeyError) as exc:
        raise StartupError(f"cannot load curve parameters: {exc}") from exc
    ok, reason = validate_curve(params)
    if not ok:
        raise StartupError(f"curve parameters rejected: {reason}")
    if config.private_key is not None:
        if not 1 <= config.private_key < params.n:
            raise StartupError("configured private key outside [1, n-1]")
        keypair = KeyPair(config.private_key, generate_public_key(config.private_key, params))
    else:
        keypair = generate_keypair(params, random.Random(config.seed))

    httpd = ThreadingHTTPServer(bind_address, None)
    httpd.daemon_threads = True
    thread = threading.Thread(target=httpd.serve_forever, name="entity-b", daemon=True)
    log_path = Path(config.order_log_csv) if config.order_log_csv else None
    handle = EntityB(params, keypair, httpd, thread, order_log_csv=log_path)
    httpd.RequestHandlerClass = _make_handler(handle)
    thread.start()
    logger.info("Entity B listening on %s", handle.url)
    return handle
