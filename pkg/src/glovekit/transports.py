"""Byte transports: ordered, lossy-tolerant streams the pipeline reads/writes.

Specs accepted on the command line:

    pipe        stdin/stdout (binary)
    file:PATH   regular file
    tcp:PORT    localhost TCP; writers listen and accept one client,
                readers connect
    PATH        any other string is opened as a device/file path
"""

from __future__ import annotations

import socket
import sys
import time
from contextlib import contextmanager

from .errors import TransportError

_TCP_CONNECT_ATTEMPTS = 50
_TCP_RETRY_DELAY = 0.1


@contextmanager
def open_transport(spec: str, mode: str):
    """Yield a binary file-like object for the given transport spec.

    ``mode`` is ``"rb"`` for readers or ``"wb"`` for writers.
    """
    if mode not in ("rb", "wb"):
        raise ValueError(f"mode must be 'rb' or 'wb', got {mode!r}")
    if spec == "pipe":
        yield sys.stdin.buffer if mode == "rb" else sys.stdout.buffer
        return
    if spec.startswith("tcp:"):
        try:
            port = int(spec[4:])
        except ValueError:
            raise TransportError(f"bad TCP port in {spec!r}") from None
        if mode == "wb":
            with _tcp_accept(port) as stream:
                yield stream
        else:
            with _tcp_connect(port) as stream:
                yield stream
        return
    path = spec[5:] if spec.startswith("file:") else spec
    try:
        handle = open(path, mode)
    except OSError as exc:
        raise TransportError(f"cannot open {path}: {exc}") from exc
    try:
        yield handle
    finally:
        handle.close()


@contextmanager
def _tcp_accept(port: int):
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind(("127.0.0.1", port))
        server.listen(1)
        conn, _ = server.accept()
    except OSError as exc:
        server.close()
        raise TransportError(f"TCP listen on port {port} failed: {exc}") from exc
    stream = conn.makefile("wb")
    try:
        yield stream
    finally:
        try:
            stream.close()
        except OSError:
            pass
        conn.close()
        server.close()


@contextmanager
def _tcp_connect(port: int):
    last_error = None
    for _ in range(_TCP_CONNECT_ATTEMPTS):
        try:
            conn = socket.create_connection(("127.0.0.1", port))
            break
        except OSError as exc:
            last_error = exc
            time.sleep(_TCP_RETRY_DELAY)
    else:
        raise TransportError(f"cannot connect to TCP port {port}: {last_error}")
    stream = conn.makefile("rb")
    try:
        yield stream
    finally:
        stream.close()
        conn.close()
