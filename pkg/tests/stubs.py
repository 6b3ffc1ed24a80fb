"""Test doubles for the generation wire protocol."""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubState:
    def __init__(self):
        self.lock = threading.Lock()
        self.n_requests = 0
        self.batch_sizes = []
        self.fail_first = 0
        self.wrong_count = False

    def record(self, batch_size):
        with self.lock:
            self.n_requests += 1
            self.batch_sizes.append(batch_size)
            return self.n_requests


def echo_transform(text: str) -> str:
    return f"echo::{text}"


class StubServer:
    """HTTP generation stub: deterministic echo plus failure knobs."""

    def __init__(self):
        state = self.state = StubState()

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                if self.path == "/health":
                    body = json.dumps({"status": "ok", "model": "stub"}).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.end_headers()
                    self.wfile.write(body)
                else:
                    self.send_response(404)
                    self.end_headers()

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                req = json.loads(self.rfile.read(length))
                n = state.record(len(req["inputs"]))
                if n <= state.fail_first:
                    self.send_response(503)
                    self.end_headers()
                    return
                outputs = [echo_transform(t) for t in req["inputs"]]
                if state.wrong_count:
                    outputs = outputs[:-1]
                body = json.dumps({"id": req["id"], "outputs": outputs}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.end_headers()
                self.wfile.write(body)

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()
