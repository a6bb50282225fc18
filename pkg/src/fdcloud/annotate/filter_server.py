"""Filter servers: newline-delimited JSON frames over TCP.

A frame in is ``{"doc_id"?, "text", "spans"?}``; the server applies its
stage and answers one frame ``{"text", "spans"}``. A frame containing
``{"eof": true}`` closes the stream. Cascading connects one server's
output stream to the next server's input.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
from typing import Sequence

from .pipeline import Stage
from .spans import AnnotationSpan


class _FrameHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        while True:
            line = self.rfile.readline()
            if not line:
                return
            line = line.strip()
            if not line:
                continue
            try:
                frame = json.loads(line)
            except json.JSONDecodeError as exc:
                self._send({"error": {"message": f"bad frame: {exc}"}})
                continue
            if frame.get("eof"):
                return
            try:
                text = frame["text"]
                spans = [AnnotationSpan.from_wire(s) for s in frame.get("spans", [])]
                text, spans = self.server.stage(text, spans)  # type: ignore[attr-defined]
            except Exception as exc:
                self._send({"error": {"message": str(exc)}})
                continue
            reply = {"text": text, "spans": [s.to_wire() for s in spans]}
            if "doc_id" in frame:
                reply["doc_id"] = frame["doc_id"]
            self._send(reply)

    def _send(self, obj: dict) -> None:
        self.wfile.write(json.dumps(obj).encode("utf-8") + b"\n")
        self.wfile.flush()


class FilterServer(socketserver.ThreadingTCPServer):
    """One filter stage listening on a TCP port."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, stage: Stage, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _FrameHandler)
        self.stage = stage
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def start(self) -> "FilterServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


class FilterClient:
    """Line-framed client for a single filter server."""

    def __init__(self, address: tuple[str, int], timeout: float = 10.0):
        self._sock = socket.create_connection(address, timeout=timeout)
        self._rfile = self._sock.makefile("rb")

    def process(self, frame: dict) -> dict:
        self._sock.sendall(json.dumps(frame).encode("utf-8") + b"\n")
        line = self._rfile.readline()
        if not line:
            raise ConnectionError("filter server closed the stream")
        return json.loads(line)

    def close(self) -> None:
        try:
            self._sock.sendall(b'{"eof": true}\n')
        except OSError:
            pass
        self._rfile.close()
        self._sock.close()


def run_cascade(
    addresses: Sequence[tuple[str, int]], frame: dict
) -> dict:
    """Pipe one frame through a chain of filter servers."""
    for address in addresses:
        client = FilterClient(address)
        try:
            frame = client.process(frame)
        finally:
            client.close()
        if "error" in frame:
            raise RuntimeError(f"filter at {address} failed: {frame['error']}")
    return frame
