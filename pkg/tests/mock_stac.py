"""In-process HTTP catalog mock with a request log and failure injection."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlparse


class MockCatalogServer:
    """Serves /search from a feature list and /assets/<name> from a dict.

    fail_next makes the next N requests answer 500; every request path is
    appended to .log.
    """

    def __init__(self):
        self.features: list[dict] = []
        self.assets: dict[str, bytes] = {}
        self.fail_next = 0
        self.log: list[str] = []
        self._lock = threading.Lock()

        mock = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # silence default stderr chatter
                pass

            def do_GET(self):
                with mock._lock:
                    mock.log.append(self.path)
                    if mock.fail_next > 0:
                        mock.fail_next -= 1
                        self.send_response(500)
                        self.end_headers()
                        self.wfile.write(b"injected failure")
                        return
                path = urlparse(self.path).path
                if path == "/search":
                    body = json.dumps({"features": mock.features}).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.end_headers()
                    self.wfile.write(body)
                elif path.startswith("/assets/"):
                    name = path[len("/assets/") :]
                    blob = mock.assets.get(name)
                    if blob is None:
                        self.send_response(404)
                        self.end_headers()
                        return
                    self.send_response(200)
                    self.send_header("Content-Type", "application/octet-stream")
                    self.end_headers()
                    self.wfile.write(blob)
                else:
                    self.send_response(404)
                    self.end_headers()

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def asset_href(self, name: str) -> str:
        return f"{self.endpoint}/assets/{name}"

    def request_count(self, prefix: str = "") -> int:
        with self._lock:
            return sum(1 for p in self.log if p.startswith(prefix) or not prefix)

    def __enter__(self) -> "MockCatalogServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
