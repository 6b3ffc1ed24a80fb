"""Wire-protocol service: HTTP POST /generate and newline-delimited stdio.

Request:  {"id": str, "inputs": [str]}
Response: {"id": str, "outputs": [str]} with len(outputs) == len(inputs).
GET /health answers {"status": "ok"|"degraded", "model": str}.

Echo mode needs no model: it returns each input's final prompt segment (the
text after the last " \n " separator, i.e. the output template), which is
deterministic and lets protocol tests run without any ML stack.
"""
from __future__ import annotations

import json
import logging
import sys
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

logger = logging.getLogger(__name__)

ECHO_SEPARATOR = " \n "


@dataclass
class ServiceConfig:
    mode: str = "echo"                 # "echo" or "model"
    checkpoint: str | None = None
    max_input_length: int = 256
    max_output_length: int = 64
    beam_size: int = 1
    batch_size: int = 16
    device: str = "cpu"
    port: int = 8000
    echo_separator: str = ECHO_SEPARATOR

    def __post_init__(self):
        if self.mode not in ("echo", "model"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "model" and not self.checkpoint:
            raise ValueError("model mode requires a checkpoint path")


def echo_transform(text: str, separator: str = ECHO_SEPARATOR) -> str:
    return text.rsplit(separator, 1)[-1]


class GenerationService:
    """Backend shared by both transports.  Generation is serialized; order
    within one request is always preserved."""

    def __init__(self, cfg: ServiceConfig):
        self.cfg = cfg
        self.error: str | None = None
        self.checkpoint = None
        self._lock = threading.Lock()
        if cfg.mode == "model":
            try:
                from .model import Checkpoint

                self.checkpoint = Checkpoint.load(cfg.checkpoint)
                self.checkpoint.model.to(cfg.device)
            except Exception as exc:
                logger.error("failed to load checkpoint %s: %s", cfg.checkpoint, exc)
                self.error = str(exc)

    @property
    def model_name(self) -> str:
        if self.cfg.mode == "echo":
            return "echo"
        return str(self.cfg.checkpoint)

    def health(self) -> dict:
        status = "degraded" if self.error else "ok"
        body = {"status": status, "model": self.model_name}
        if self.error:
            body["error"] = self.error
        return body

    def generate(self, inputs: list[str]) -> list[str]:
        if self.cfg.mode == "echo":
            return [echo_transform(t, self.cfg.echo_separator) for t in inputs]
        if self.checkpoint is None:
            return [""] * len(inputs)
        with self._lock:
            try:
                return self.checkpoint.generate(
                    inputs,
                    max_input_length=self.cfg.max_input_length,
                    max_output_length=self.cfg.max_output_length,
                    beam_size=self.cfg.beam_size,
                    batch_size=self.cfg.batch_size,
                )
            except Exception as exc:
                logger.error("generation failed: %s", exc)
                return [""] * len(inputs)

    def handle_request(self, body: dict) -> dict:
        req_id = body.get("id", "")
        inputs = body.get("inputs")
        if not isinstance(inputs, list):
            raise ValueError("request must carry an 'inputs' list")
        outputs = self.generate([str(t) for t in inputs])
        assert len(outputs) == len(inputs)
        return {"id": req_id, "outputs": outputs}


def make_http_server(service: GenerationService,
                     port: int | None = None) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send(self, code: int, payload: dict):
            body = json.dumps(payload).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/health":
                self._send(200, service.health())
            else:
                self._send(404, {"error": "not found"})

        def do_POST(self):
            if self.path != "/generate":
                self._send(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length))
                self._send(200, service.handle_request(body))
            except Exception as exc:
                self._send(400, {"error": str(exc)})

    bind_port = service.cfg.port if port is None else port
    return ThreadingHTTPServer(("127.0.0.1", bind_port), Handler)


def serve_http(service: GenerationService) -> None:
    httpd = make_http_server(service)
    host, port = httpd.server_address
    logger.info("serving %s on http://%s:%d", service.model_name, host, port)
    print(f"listening on http://{host}:{port}", flush=True)
    httpd.serve_forever()


def serve_stdio(service: GenerationService, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            response = service.handle_request(json.loads(line))
        except Exception as exc:
            response = {"id": "", "outputs": [], "error": str(exc)}
        stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
        stdout.flush()
    return 0


def serve_in_thread(service: GenerationService):
    """Start an HTTP server on an ephemeral port; returns (httpd, endpoint).
    Callers shut it down with httpd.shutdown()."""
    httpd = make_http_server(service, port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    host, port = httpd.server_address
    return httpd, f"http://{host}:{port}"
