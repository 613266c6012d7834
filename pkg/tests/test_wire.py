import json
import socket
import threading

import pytest

from proxauth.auth_service import AuthService, PolicyConfig, UserStore
from proxauth.beacon_model import (
    BeaconObservation,
    DeviceRole,
    FeatureEncoder,
    Label,
    ScanSnapshot,
)
from proxauth.colocation_ml import DecisionTree, LeafNode, TreeParams
from proxauth.wire import AuthClient, AuthWireServer, snapshot_from_doc, snapshot_to_doc

ENCODER = FeatureEncoder({"NetA": 1}, (2412000000.0, 5240000000.0))
GRANT_ALL = DecisionTree(LeafNode(Label.AUTHENTIC, (0, 1)), TreeParams())


def make_snapshot(device_id="d1", role=DeviceRole.MOBILE, ts=1000):
    return ScanSnapshot(
        device_id,
        role,
        ts,
        (BeaconObservation("NetA", 2437000000, -60, "aa:bb:cc:dd:ee:ff"),),
        location_tag="desk",
    )


@pytest.fixture()
def server():
    service = AuthService(UserStore(), GRANT_ALL, ENCODER, PolicyConfig())
    with AuthWireServer(service, "127.0.0.1", 0) as srv:
        yield srv


def client_for(server):
    host, port = server.address
    return AuthClient(host, port)


class TestSnapshotCodec:
    def test_round_trip(self):
        snap = make_snapshot()
        doc = snapshot_to_doc(snap)
        assert doc["device_id"] == "d1"
        assert doc["observations"][0]["rssi"] == -60
        again = snapshot_from_doc(json.loads(json.dumps(doc)))
        assert again == snap

    def test_missing_bssid_tolerated(self):
        doc = snapshot_to_doc(make_snapshot())
        del doc["observations"][0]["bssid"]
        again = snapshot_from_doc(doc)
        assert again.observations[0].bssid is None


class TestWireProtocol:
    def test_full_round_trip(self, server):
        with client_for(server) as client:
            resp = client.enroll("alice", "sesame-street", "a-m", "a-l")
            assert resp["ok"] is True
            assert resp["username"] == "alice"

            begun = client.begin("alice", "sesame-street")
            assert begun["ok"] is True
            assert begun["state"] == "AwaitingScans"
            sid = begun["session_id"]

            first = client.submit_scan(sid, "a-m", make_snapshot("a-m", DeviceRole.MOBILE))
            assert first["ok"] is True
            assert first["state"] == "AwaitingScans"

            final = client.submit_scan(sid, "a-l", make_snapshot("a-l", DeviceRole.LOGIN))
            assert final["ok"] is True
            assert final["state"] == "Decided"
            assert final["outcome"] == "Grant"
            assert final["reason"] == "ClassifierAuthentic"
            assert final["authentic_fraction"] == 1.0

            status = client.status(sid)
            assert status["outcome"] == "Grant"

    def test_first_factor_failure_on_wire(self, server):
        with client_for(server) as client:
            client.enroll("bob", "bobs-password", "b-m", "b-l")
            resp = client.begin("bob", "wrong")
            assert resp["ok"] is True
            assert resp["state"] == "Decided"
            assert resp["outcome"] == "Deny"
            assert resp["reason"] == "FirstFactorFailed"

    def test_error_codes_surface(self, server):
        with client_for(server) as client:
            client.enroll("carol", "carols-secret", "c-m", "c-l")
            dup = client.enroll("carol", "carols-secret", "x1", "x2")
            assert dup == {"ok": False, "error": "DuplicateUser", "message": dup["message"]}

            weak = client.enroll("dave", "short", "d-m", "d-l")
            assert weak["error"] == "WeakSecret"

            unknown = client.begin("nobody", "whatever1")
            assert unknown["error"] == "UnknownUser"

            missing = client.status("no-such-session")
            assert missing["error"] == "UnknownSession"

    def test_foreign_device_error(self, server):
        with client_for(server) as client:
            client.enroll("erin", "erins-secret", "e-m", "e-l")
            sid = client.begin("erin", "erins-secret")["session_id"]
            resp = client.submit_scan(sid, "z-z", make_snapshot("z-z"))
            assert resp["error"] == "ForeignDevice"

    def test_malformed_json_line(self, server):
        host, port = server.address
        with socket.create_connection((host, port)) as sock:
            sock.sendall(b"this is not json\n")
            line = sock.makefile("r").readline()
        resp = json.loads(line)
        assert resp["ok"] is False
        assert resp["error"] == "BadRequest"

    def test_unknown_op(self, server):
        with client_for(server) as client:
            resp = client.call({"op": "frobnicate"})
            assert resp["error"] == "UnknownOp"

    def test_missing_fields_are_bad_request(self, server):
        with client_for(server) as client:
            resp = client.call({"op": "begin"})
            assert resp["error"] == "BadRequest"

    def test_concurrent_sessions_for_distinct_users(self, server):
        host, port = server.address
        errors = []

        def one_user(name):
            try:
                with AuthClient(host, port) as client:
                    client.enroll(name, f"{name}-password", f"{name}-m", f"{name}-l")
                    sid = client.begin(name, f"{name}-password")["session_id"]
                    client.submit_scan(sid, f"{name}-m", make_snapshot(f"{name}-m", DeviceRole.MOBILE))
                    final = client.submit_scan(sid, f"{name}-l", make_snapshot(f"{name}-l", DeviceRole.LOGIN))
                    assert final["outcome"] == "Grant"
            except Exception as exc:  # surface failures to the main thread
                errors.append(exc)

        threads = [threading.Thread(target=one_user, args=(f"user{i}",)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=10)
        assert errors == []
