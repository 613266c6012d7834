"""JSON-over-TCP wire protocol for the authentication service.

Each request and each response is one compact JSON document on its own line.
Requests carry an ``op`` of ``enroll``, ``begin``, ``submit_scan``, or
``status``; responses always carry ``ok`` plus either result fields or an
``error`` code taken from the service's exception names. Snapshot documents
mirror :class:`proxauth.beacon_model.ScanSnapshot` field names, with RSSI in
integer dBm and timestamps in integer milliseconds.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading

from .auth_service import AuthService, AuthSession
from .beacon_model import BeaconObservation, DeviceRole, ScanSnapshot
from .errors import ProxauthError

__all__ = [
    "snapshot_to_doc",
    "snapshot_from_doc",
    "AuthWireServer",
    "AuthClient",
]


def snapshot_to_doc(snapshot: ScanSnapshot) -> dict:
    return {
        "device_id": snapshot.device_id,
        "role": snapshot.role.value,
        "timestamp": snapshot.timestamp,
        "location_tag": snapshot.location_tag,
        "observations": [
            {
                "ssid": o.ssid,
                "bssid": o.bssid,
                "frequency": o.frequency,
                "rssi": o.rssi,
            }
            for o in snapshot.observations
        ],
    }


def snapshot_from_doc(doc: dict) -> ScanSnapshot:
    observations = tuple(
        BeaconObservation(
            ssid=o["ssid"],
            frequency=int(o["frequency"]),
            rssi=int(o["rssi"]),
            bssid=o.get("bssid"),
        )
        for o in doc["observations"]
    )
    return ScanSnapshot(
        device_id=doc["device_id"],
        role=DeviceRole(doc.get("role", "mobile")),
        timestamp=int(doc["timestamp"]),
        observations=observations,
        location_tag=doc.get("location_tag"),
    )


def _session_doc(session: AuthSession) -> dict:
    doc = {"session_id": session.session_id, "state": session.state.value}
    if session.decision is not None:
        doc["outcome"] = session.decision.outcome.value
        doc["reason"] = session.decision.reason.value
        doc["authentic_fraction"] = session.decision.authentic_fraction
    return doc


def _dispatch(service: AuthService, request: dict) -> dict:
    op = request.get("op")
    if op == "enroll":
        record = service.enroll_user(
            username=request["username"],
            secret=request["secret"],
            mobile_device_id=request["mobile_device_id"],
            login_device_id=request["login_device_id"],
        )
        return {"ok": True, "username": record.username, "enrolled_at": record.enrolled_at}
    if op == "begin":
        session = service.begin_session(request["username"], request["secret"])
        return {"ok": True, **_session_doc(session)}
    if op == "submit_scan":
        session = service.submit_scan(
            session_id=request["session_id"],
            device_id=request["device_id"],
            snapshot=snapshot_from_doc(request["snapshot"]),
        )
        return {"ok": True, **_session_doc(session)}
    if op == "status":
        session = service.get_session(request["session_id"])
        return {"ok": True, **_session_doc(session)}
    return {"ok": False, "error": "UnknownOp", "message": f"unknown op {op!r}"}


def handle_request_line(service: AuthService, line: str) -> dict:
    """Parse and execute one request line; never raises."""
    try:
        request = json.loads(line)
        if not isinstance(request, dict):
            raise ValueError("request must be a JSON object")
    except ValueError as exc:
        return {"ok": False, "error": "BadRequest", "message": f"malformed JSON: {exc}"}
    try:
        return _dispatch(service, request)
    except ProxauthError as exc:
        return {"ok": False, "error": exc.code, "message": str(exc)}
    except (KeyError, TypeError, ValueError) as exc:
        return {"ok": False, "error": "BadRequest", "message": str(exc)}
    except Exception as exc:  # pragma: no cover - defensive catch-all
        return {"ok": False, "error": "Internal", "message": type(exc).__name__}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        service = self.server.proxauth_service  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            response = handle_request_line(service, line)
            self.wfile.write((json.dumps(response, separators=(",", ":")) + "\n").encode("utf-8"))
            self.wfile.flush()


class _TcpServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class AuthWireServer:
    """Threaded TCP listener speaking the JSON-lines protocol.

    ``port=0`` binds an ephemeral port; read the actual one from ``address``.
    Use ``start()``/``shutdown()`` for a background server or
    ``serve_forever()`` to block.
    """

    def __init__(self, service: AuthService, host: str = "127.0.0.1", port: int = 0):
        self._tcp = _TcpServer((host, port), _Handler)
        self._tcp.proxauth_service = service  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._tcp.server_address[:2]
        return str(host), int(port)

    def start(self) -> "AuthWireServer":
        self._thread = threading.Thread(target=self._tcp.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._tcp.serve_forever()

    def shutdown(self) -> None:
        self._tcp.shutdown()
        self._tcp.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "AuthWireServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.shutdown()


class AuthClient:
    """Blocking client for the JSON-lines protocol; one request at a time."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
        self._writer = self._sock.makefile("w", encoding="utf-8", newline="\n")

    def call(self, request: dict) -> dict:
        self._writer.write(json.dumps(request, separators=(",", ":")) + "\n")
        self._writer.flush()
        line = self._reader.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line)

    def enroll(
        self, username: str, secret: str, mobile_device_id: str, login_device_id: str
    ) -> dict:
        return self.call(
            {
                "op": "enroll",
                "username": username,
                "secret": secret,
                "mobile_device_id": mobile_device_id,
                "login_device_id": login_device_id,
            }
        )

    def begin(self, username: str, secret: str) -> dict:
        return self.call({"op": "begin", "username": username, "secret": secret})

    def submit_scan(self, session_id: str, device_id: str, snapshot: ScanSnapshot) -> dict:
        return self.call(
            {
                "op": "submit_scan",
                "session_id": session_id,
                "device_id": device_id,
                "snapshot": snapshot_to_doc(snapshot),
            }
        )

    def status(self, session_id: str) -> dict:
        return self.call({"op": "status", "session_id": session_id})

    def close(self) -> None:
        try:
            self._reader.close()
            self._writer.close()
        finally:
            self._sock.close()

    def __enter__(self) -> "AuthClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
