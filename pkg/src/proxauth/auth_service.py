"""The authentication server: enrollment, paired-scan sessions, decisions.

A user enrolls a username, a first-factor secret, and the ids of their two
devices. An authentication attempt begins with the first factor; the session
then waits for a beacon scan from each device, and as soon as both are in,
the co-location classifier runs over the observations of every access point
both devices saw. The attempt is granted only when the authentic fraction of
those per-observation predictions clears the vote threshold; every other
path denies.

State and durability: user records live in a JSON file rewritten atomically
by a single writer; decisions are appended to a JSON-lines audit log.
Secrets are stored only as salted PBKDF2 hashes and never appear in scan
records, the audit log, or decisions. Sessions are in-memory and
short-lived. A service-wide lock serializes state transitions, so each
session processes one submission at a time while the immutable model and
encoder serve concurrent predictions freely.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets as _secrets
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable

from .beacon_model import (
    BeaconObservation,
    DeviceRole,
    FeatureEncoder,
    Label,
    ScanSnapshot,
    encode_observation,
)
from .colocation_ml import DecisionTree, RandomForest, predict
from .errors import (
    DuplicateDeviceId,
    DuplicateRoleSubmission,
    DuplicateUser,
    ForeignDevice,
    MissingScan,
    SessionDecided,
    UnknownSession,
    UnknownUser,
    WeakSecret,
)

__all__ = [
    "MatchKey",
    "PolicyConfig",
    "UserRecord",
    "SessionState",
    "DecisionOutcome",
    "DecisionReason",
    "AuthDecision",
    "AuthSession",
    "UserStore",
    "AuthService",
    "hash_secret",
    "verify_secret",
    "overlap_observations",
]

_PBKDF2_ITERATIONS = 20_000
_MIN_SECRET_LENGTH = 8


class MatchKey(Enum):
    BSSID_THEN_SSID = "BssidThenSsid"
    SSID_ONLY = "SsidOnly"


@dataclass(frozen=True)
class PolicyConfig:
    """Decision policy: scan pairing window, vote threshold, and AP matching."""

    pairing_window_ms: int = 10_000
    vote_threshold_tau: float = 0.6
    min_overlap_aps: int = 1
    match_key: MatchKey = MatchKey.BSSID_THEN_SSID

    def __post_init__(self):
        if not 0.0 < self.vote_threshold_tau <= 1.0:
            raise ValueError("vote_threshold_tau must be in (0, 1]")
        if self.min_overlap_aps < 1:
            raise ValueError("min_overlap_aps must be >= 1")
        if self.pairing_window_ms < 0:
            raise ValueError("pairing_window_ms must be >= 0")


@dataclass(frozen=True)
class UserRecord:
    username: str
    credential_hash: str
    mobile_device_id: str
    login_device_id: str
    enrolled_at: int  # ms since epoch

    def __post_init__(self):
        if self.mobile_device_id == self.login_device_id:
            raise ValueError("device ids must be distinct")


class SessionState(Enum):
    AWAITING_SCANS = "AwaitingScans"
    DECIDED = "Decided"


class DecisionOutcome(Enum):
    GRANT = "Grant"
    DENY = "Deny"


class DecisionReason(Enum):
    CLASSIFIER_AUTHENTIC = "ClassifierAuthentic"
    CLASSIFIER_UNAUTHORIZED = "ClassifierUnauthorized"
    NO_OVERLAP = "NoOverlap"
    STALE_SCANS = "StaleScans"
    MISSING_SCAN = "MissingScan"
    FIRST_FACTOR_FAILED = "FirstFactorFailed"


@dataclass(frozen=True)
class AuthDecision:
    outcome: DecisionOutcome
    reason: DecisionReason
    authentic_fraction: float | None
    decided_at: int

    def __post_init__(self):
        if self.outcome is DecisionOutcome.GRANT:
            if self.reason is not DecisionReason.CLASSIFIER_AUTHENTIC:
                raise ValueError("a grant must come from the classifier")
            if self.authentic_fraction is None:
                raise ValueError("a grant must carry its authentic fraction")


@dataclass
class AuthSession:
    session_id: str
    username: str
    state: SessionState
    created_at: int
    mobile_scan: ScanSnapshot | None = None
    login_scan: ScanSnapshot | None = None
    decision: AuthDecision | None = None


def hash_secret(secret: str, salt: bytes | None = None) -> str:
    """Salted PBKDF2-SHA256 of a first-factor secret, self-describing."""
    if salt is None:
        salt = _secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", secret.encode("utf-8"), salt, _PBKDF2_ITERATIONS)
    return f"pbkdf2-sha256${_PBKDF2_ITERATIONS}${salt.hex()}${digest.hex()}"


def verify_secret(secret: str, stored: str) -> bool:
    try:
        _, iterations, salt_hex, digest_hex = stored.split("$")
        digest = hashlib.pbkdf2_hmac(
            "sha256", secret.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations)
        )
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


class UserStore:
    """Durable user records plus an append-only audit log.

    With a root directory, users live in ``users.json`` (rewritten atomically
    on every enrollment) and audit entries append to ``audit.log`` as JSON
    lines. Without one, everything stays in memory (useful in tests). Reads
    are lock-free on immutable records; writes are serialized by the caller
    (AuthService holds its lock across mutations).
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else None
        self._users: dict[str, UserRecord] = {}
        self._devices: dict[str, str] = {}  # device_id -> username
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
            self._load()

    @property
    def _users_path(self) -> Path:
        assert self.root is not None
        return self.root / "users.json"

    @property
    def _audit_path(self) -> Path:
        assert self.root is not None
        return self.root / "audit.log"

    def _load(self) -> None:
        if not self._users_path.exists():
            return
        doc = json.loads(self._users_path.read_text(encoding="utf-8"))
        for u in doc.get("users", []):
            record = UserRecord(
                username=u["username"],
                credential_hash=u["credential_hash"],
                mobile_device_id=u["mobile_device_id"],
                login_device_id=u["login_device_id"],
                enrolled_at=int(u["enrolled_at"]),
            )
            self._index(record)

    def _index(self, record: UserRecord) -> None:
        self._users[record.username] = record
        self._devices[record.mobile_device_id] = record.username
        self._devices[record.login_device_id] = record.username

    def _flush(self) -> None:
        if self.root is None:
            return
        doc = {
            "version": 1,
            "users": [
                {
                    "username": r.username,
                    "credential_hash": r.credential_hash,
                    "mobile_device_id": r.mobile_device_id,
                    "login_device_id": r.login_device_id,
                    "enrolled_at": r.enrolled_at,
                }
                for r in self._users.values()
            ],
        }
        tmp = self._users_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, self._users_path)

    def add_user(self, record: UserRecord) -> None:
        self._index(record)
        self._flush()

    def get_user(self, username: str) -> UserRecord | None:
        return self._users.get(username)

    def username_for_device(self, device_id: str) -> str | None:
        return self._devices.get(device_id)

    def audit(self, entry: dict) -> None:
        if self.root is None:
            return
        with self._audit_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(entry, separators=(",", ":")) + "\n")


def _observation_key(obs: BeaconObservation) -> tuple[str, str | None]:
    return (obs.ssid, obs.bssid)


def overlap_observations(
    mobile: ScanSnapshot,
    login: ScanSnapshot,
    policy: PolicyConfig = PolicyConfig(),
) -> list[tuple[DeviceRole, BeaconObservation]]:
    """Observations of every AP seen by both devices.

    APs match by BSSID when both sides carry one; anything left unmatched
    falls back to SSID equality (or SSID only, per the policy's match key).
    The result carries both devices' observations of each common AP, in the
    mobile snapshot's AP order; it is empty when the devices share no AP.
    """
    mobile_unmatched = list(mobile.observations)
    login_unmatched = list(login.observations)
    pairs: list[tuple[DeviceRole, BeaconObservation]] = []

    if policy.match_key is MatchKey.BSSID_THEN_SSID:
        login_by_bssid: dict[str, list[BeaconObservation]] = {}
        for obs in login_unmatched:
            if obs.bssid is not None:
                login_by_bssid.setdefault(obs.bssid, []).append(obs)
        matched_login: set[int] = set()
        still_mobile = []
        for obs in mobile_unmatched:
            hits = login_by_bssid.get(obs.bssid) if obs.bssid is not None else None
            if hits:
                pairs.append((DeviceRole.MOBILE, obs))
                for hit in hits:
                    if id(hit) not in matched_login:
                        pairs.append((DeviceRole.LOGIN, hit))
                        matched_login.add(id(hit))
            else:
                still_mobile.append(obs)
        mobile_unmatched = still_mobile
        login_unmatched = [o for o in login_unmatched if id(o) not in matched_login]

    login_by_ssid: dict[str, list[BeaconObservation]] = {}
    for obs in login_unmatched:
        login_by_ssid.setdefault(obs.ssid, []).append(obs)
    matched_ssids: set[str] = set()
    for obs in mobile_unmatched:
        if obs.ssid in login_by_ssid:
            pairs.append((DeviceRole.MOBILE, obs))
            if obs.ssid not in matched_ssids:
                for hit in login_by_ssid[obs.ssid]:
                    pairs.append((DeviceRole.LOGIN, hit))
                matched_ssids.add(obs.ssid)
    return pairs


class AuthService:
    """Session state machine around an immutable trained model.

    Every decision path that is not an affirmative classifier grant denies;
    a session's decision never changes once set.
    """

    def __init__(
        self,
        store: UserStore,
        model: DecisionTree | RandomForest,
        encoder: FeatureEncoder,
        policy: PolicyConfig = PolicyConfig(),
        clock: Callable[[], int] | None = None,
    ):
        self.store = store
        self.model = model
        self.encoder = encoder
        self.policy = policy
        self._clock = clock or (lambda: time.time_ns() // 1_000_000)
        self._lock = threading.RLock()
        self._sessions: dict[str, AuthSession] = {}

    # -- enrollment ---------------------------------------------------------

    def enroll_user(
        self, username: str, secret: str, mobile_device_id: str, login_device_id: str
    ) -> UserRecord:
        if len(secret) < _MIN_SECRET_LENGTH:
            raise WeakSecret(f"secret must be at least {_MIN_SECRET_LENGTH} characters")
        with self._lock:
            if self.store.get_user(username) is not None:
                raise DuplicateUser(f"user {username!r} already enrolled")
            if mobile_device_id == login_device_id:
                raise DuplicateDeviceId("mobile and login device ids must differ")
            for device_id in (mobile_device_id, login_device_id):
                if self.store.username_for_device(device_id) is not None:
                    raise DuplicateDeviceId(f"device {device_id!r} is already enrolled")
            record = UserRecord(
                username=username,
                credential_hash=hash_secret(secret),
                mobile_device_id=mobile_device_id,
                login_device_id=login_device_id,
                enrolled_at=self._clock(),
            )
            self.store.add_user(record)
            self.store.audit({"ts": record.enrolled_at, "event": "enroll", "username": username})
            return record

    # -- session lifecycle ---------------------------------------------------

    def begin_session(self, username: str, secret: str) -> AuthSession:
        with self._lock:
            record = self.store.get_user(username)
            if record is None:
                raise UnknownUser(f"no such user {username!r}")
            now = self._clock()
            session = AuthSession(
                session_id=uuid.uuid4().hex,
                username=username,
                state=SessionState.AWAITING_SCANS,
                created_at=now,
            )
            self._sessions[session.session_id] = session
            self.store.audit(
                {"ts": now, "event": "begin", "session_id": session.session_id, "username": username}
            )
            if not verify_secret(secret, record.credential_hash):
                self._finalize(
                    session,
                    AuthDecision(
                        outcome=DecisionOutcome.DENY,
                        reason=DecisionReason.FIRST_FACTOR_FAILED,
                        authentic_fraction=None,
                        decided_at=now,
                    ),
                )
            return session

    def get_session(self, session_id: str) -> AuthSession:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(f"no such session {session_id!r}")
            return session

    def submit_scan(
        self, session_id: str, device_id: str, snapshot: ScanSnapshot
    ) -> AuthSession:
        """Store one device's scan; the second submission triggers the decision."""
        with self._lock:
            session = self.get_session(session_id)
            if session.state is SessionState.DECIDED:
                raise SessionDecided(f"session {session_id!r} already decided")
            record = self.store.get_user(session.username)
            assert record is not None
            if device_id == record.mobile_device_id:
                role = DeviceRole.MOBILE
            elif device_id == record.login_device_id:
                role = DeviceRole.LOGIN
            else:
                raise ForeignDevice(f"device {device_id!r} is not enrolled to {session.username!r}")

            # the enrollment binding is authoritative for role and identity
            snapshot = replace(snapshot, device_id=device_id, role=role)
            if role is DeviceRole.MOBILE:
                if session.mobile_scan is not None:
                    raise DuplicateRoleSubmission("mobile scan already submitted")
                session.mobile_scan = snapshot
            else:
                if session.login_scan is not None:
                    raise DuplicateRoleSubmission("login scan already submitted")
                session.login_scan = snapshot

            if session.mobile_scan is not None and session.login_scan is not None:
                self.decide_session(session_id)
            return session

    def decide_session(self, session_id: str) -> AuthDecision:
        """Run the decision procedure; idempotent once a decision exists.

        Raises :class:`MissingScan` when invoked before both scans arrived
        (the session stays open).
        """
        with self._lock:
            session = self.get_session(session_id)
            if session.decision is not None:
                return session.decision
            if session.mobile_scan is None or session.login_scan is None:
                raise MissingScan("both device scans are required before deciding")

            decision = self._evaluate(session.mobile_scan, session.login_scan)
            self._finalize(session, decision)
            return decision

    def _evaluate(self, mobile: ScanSnapshot, login: ScanSnapshot) -> AuthDecision:
        now = self._clock()
        if abs(mobile.timestamp - login.timestamp) > self.policy.pairing_window_ms:
            return AuthDecision(DecisionOutcome.DENY, DecisionReason.STALE_SCANS, None, now)
        pairs = overlap_observations(mobile, login, self.policy)
        if len(pairs) < 2 * self.policy.min_overlap_aps:
            return AuthDecision(DecisionOutcome.DENY, DecisionReason.NO_OVERLAP, None, now)

        authentic = 0
        for role, obs in pairs:
            x = encode_observation(self.encoder, role, obs)
            if predict(self.model, x) is Label.AUTHENTIC:
                authentic += 1
        fraction = authentic / len(pairs)
        if fraction >= self.policy.vote_threshold_tau:
            return AuthDecision(
                DecisionOutcome.GRANT, DecisionReason.CLASSIFIER_AUTHENTIC, fraction, now
            )
        return AuthDecision(
            DecisionOutcome.DENY, DecisionReason.CLASSIFIER_UNAUTHORIZED, fraction, now
        )

    def _finalize(self, session: AuthSession, decision: AuthDecision) -> None:
        session.decision = decision
        session.state = SessionState.DECIDED
        self.store.audit(
            {
                "ts": decision.decided_at,
                "event": "decision",
                "session_id": session.session_id,
                "username": session.username,
                "outcome": decision.outcome.value,
                "reason": decision.reason.value,
                "authentic_fraction": decision.authentic_fraction,
            }
        )
