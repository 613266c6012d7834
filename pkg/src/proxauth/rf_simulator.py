"""Synthetic regeneration of the beacon-scan data collection protocol.

Access points live in a square area; received power follows a log-distance
path-loss model with Gaussian shadowing, rounded to integer dBm and clamped
to a realistic receiver range. A device pair is either *authentic* (placed
within 7 ft of each other) or *unauthorized* (at least 7.5 ft apart); the
band between 7 and 7.5 ft is deliberately never generated.

Dataset generation mirrors the field protocol the data follows: each
synthetic location has a home spot where the legitimate device pair works,
and a separate intruder zone where unauthorized pairs operate. Sessions
jitter around those spots while the pair separation varies per scenario,
and every (zone, device, AP) combination carries a persistent shadowing
offset standing in for walls and multipath. This spot-based structure is
what makes single observations (SSID + RSSI) informative about the label;
device pairs dropped uniformly at random would produce statistically
indistinguishable classes. :func:`generate_session` without a geometry
still performs a one-off uniform placement for standalone use.

Everything is a pure function of (configs, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .beacon_model import (
    BeaconObservation,
    Dataset,
    DeviceRole,
    Label,
    LabeledSample,
    Provenance,
    ScanSnapshot,
)
from .colocation_ml import derived_rng
from .errors import ConfigurationError, NonPositiveDistance, NoVisibleAp

__all__ = [
    "PathLossConfig",
    "EnvironmentConfig",
    "CampaignConfig",
    "Scenario",
    "AccessPoint",
    "LocationGeometry",
    "AUTHENTIC_MAX_SEPARATION_M",
    "UNAUTHORIZED_MIN_SEPARATION_M",
    "rssi_at_distance",
    "place_access_points",
    "location_geometry",
    "generate_session",
    "generate_dataset",
    "sessions_for_target_rows",
    "scenario_session",
    "simulation_metadata",
]

# 7 ft and 7.5 ft in meters: the co-location threshold and the start of the
# excluded gray band.
AUTHENTIC_MAX_SEPARATION_M = 2.1336
UNAUTHORIZED_MIN_SEPARATION_M = 2.286
AUTHENTIC_MIN_SEPARATION_M = 0.1
UNAUTHORIZED_MAX_SEPARATION_M = 10.0

_GEOMETRY_STREAM = 101
_SESSION_STREAM = 202
_PROBE_STREAM = 303
_ATTEMPT_STREAM = 404


@dataclass(frozen=True)
class PathLossConfig:
    """Log-distance path loss: p0 at d0, decaying 10*n*log10(d/d0) dB, plus
    zero-mean Gaussian noise, rounded to integer dBm and clamped."""

    p0_dbm: float = -40.0
    d0_m: float = 1.0
    exponent_n: float = 2.5
    noise_sigma_dbm: float = 2.0
    clamp_dbm: tuple[int, int] = (-100, -20)

    def __post_init__(self):
        if self.d0_m <= 0:
            raise ValueError("d0_m must be positive")
        if self.exponent_n <= 0:
            raise ValueError("exponent_n must be positive")
        if self.noise_sigma_dbm < 0:
            raise ValueError("noise_sigma_dbm must be >= 0")
        if self.clamp_dbm[0] >= self.clamp_dbm[1]:
            raise ValueError("clamp min must be below clamp max")


@dataclass(frozen=True)
class EnvironmentConfig:
    n_aps: int = 10
    area_m: float = 30.0
    ssid_pattern: str = "AP-{i:02d}"
    frequency_set_hz: tuple[int, ...] = (
        2412000000,
        2437000000,
        2462000000,
        5180000000,
        5240000000,
    )
    detection_radius_m: float = 25.0

    def __post_init__(self):
        if self.n_aps < 1:
            raise ValueError("n_aps must be >= 1")
        if any(f <= 0 for f in self.frequency_set_hz):
            raise ValueError("frequencies must be positive")
        if self.area_m <= 0 or self.detection_radius_m <= 0:
            raise ValueError("area and detection radius must be positive")


@dataclass(frozen=True)
class CampaignConfig:
    """Spot-based collection structure used by :func:`generate_dataset`.

    ``anchor_jitter_m`` is how far a session's pair midpoint wanders from its
    zone spot. ``intruder_offset_m`` bounds the distance between a location's
    home spot and its intruder zone. ``shadow_sigma_dbm`` is the std-dev of
    the persistent per-(zone, device, AP) shadowing offsets that stand in for
    walls; session-to-session noise stays in PathLossConfig.
    ``zone_visibility_margin_m`` shrinks the detection radius when choosing
    zone spots so that every session device still sees the location's full AP
    set after jitter and pair separation; this keeps the two classes' row
    counts symmetric. ``min_band_gap_dbm`` enforces a minimum contrast
    between the two zones' expected signal bands per (device, AP): distinct
    spots in a building rarely share an identical RF signature, and without
    that contrast single observations would carry no label information.
    """

    anchor_jitter_m: float = 0.5
    intruder_offset_m: tuple[float, float] = (5.0, 12.0)
    shadow_sigma_dbm: float = 6.0
    zone_visibility_margin_m: float = 5.5
    min_band_gap_dbm: float = 2.0

    def __post_init__(self):
        if self.anchor_jitter_m < 0:
            raise ValueError("anchor_jitter_m must be >= 0")
        if not 0 < self.intruder_offset_m[0] < self.intruder_offset_m[1]:
            raise ValueError("intruder_offset_m must be an increasing positive pair")
        if self.shadow_sigma_dbm < 0:
            raise ValueError("shadow_sigma_dbm must be >= 0")
        if self.zone_visibility_margin_m < 0:
            raise ValueError("zone_visibility_margin_m must be >= 0")
        if self.min_band_gap_dbm < 0:
            raise ValueError("min_band_gap_dbm must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Separation regime for a device pair; the defaults exclude the
    (7 ft, 7.5 ft) gray band by construction."""

    label: Label
    separation_range_m: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.separation_range_m
        if not 0 < lo < hi:
            raise ValueError("separation range must be an increasing positive pair")

    @staticmethod
    def authentic(
        min_m: float = AUTHENTIC_MIN_SEPARATION_M,
        max_m: float = AUTHENTIC_MAX_SEPARATION_M,
    ) -> "Scenario":
        return Scenario(Label.AUTHENTIC, (min_m, max_m))

    @staticmethod
    def unauthorized(
        min_m: float = UNAUTHORIZED_MIN_SEPARATION_M,
        max_m: float = UNAUTHORIZED_MAX_SEPARATION_M,
    ) -> "Scenario":
        return Scenario(Label.UNAUTHORIZED, (min_m, max_m))

    @property
    def is_authentic(self) -> bool:
        return self.label is Label.AUTHENTIC

    def draw_separation(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(*self.separation_range_m))


@dataclass(frozen=True)
class AccessPoint:
    ssid: str
    frequency: int
    bssid: str
    x: float
    y: float

    @property
    def pos(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class LocationGeometry:
    """Frozen per-location randomness: AP placement, the home and intruder
    spots, campaign movement bearings, and the persistent shadow offsets
    indexed [zone(0=authentic,1=unauthorized), role(0=mobile,1=login), ap]."""

    tag: str
    aps: tuple[AccessPoint, ...]
    home: np.ndarray
    intruder_anchor: np.ndarray
    bearing_authentic: np.ndarray
    bearing_unauthorized: np.ndarray
    shadows: np.ndarray


def rssi_at_distance(
    cfg: PathLossConfig,
    distance_m: float,
    rng: np.random.Generator | None = None,
    extra_offset_dbm: float = 0.0,
) -> int:
    """Integer dBm at a given transmitter distance: deterministic path loss
    plus Gaussian noise, rounded then clamped. ``extra_offset_dbm`` lets a
    caller fold in a persistent shadowing term before round-and-clamp."""
    if distance_m <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance_m}")
    value = (
        cfg.p0_dbm
        - 10.0 * cfg.exponent_n * math.log10(distance_m / cfg.d0_m)
        + extra_offset_dbm
    )
    if cfg.noise_sigma_dbm > 0:
        if rng is None:
            raise ValueError("an rng is required when noise_sigma_dbm > 0")
        value += rng.normal(0.0, cfg.noise_sigma_dbm)
    lo, hi = cfg.clamp_dbm
    return int(min(max(round(value), lo), hi))


def _ap_identity(env: EnvironmentConfig, i: int) -> tuple[str, int, str]:
    ssid = env.ssid_pattern.format(i=i)
    frequency = env.frequency_set_hz[i % len(env.frequency_set_hz)]
    bssid = f"02:00:5e:00:{(i >> 8) & 0xFF:02x}:{i & 0xFF:02x}"
    return ssid, frequency, bssid


def place_access_points(
    env: EnvironmentConfig,
    rng: np.random.Generator,
    indices: Sequence[int] | None = None,
) -> tuple[AccessPoint, ...]:
    """Place the APs with the given identity indices uniformly in the area."""
    if indices is None:
        indices = range(env.n_aps)
    indices = list(indices)
    xy = rng.uniform(0.0, env.area_m, size=(len(indices), 2))
    aps = []
    for (x, y), i in zip(xy, indices):
        ssid, freq, bssid = _ap_identity(env, i)
        aps.append(AccessPoint(ssid=ssid, frequency=freq, bssid=bssid, x=float(x), y=float(y)))
    return tuple(aps)


def _sees_any_ap(point: np.ndarray, aps: Sequence[AccessPoint], radius: float) -> bool:
    return any(math.hypot(point[0] - ap.x, point[1] - ap.y) <= radius for ap in aps)


def _sees_all_aps(point: np.ndarray, aps: Sequence[AccessPoint], radius: float) -> bool:
    return all(math.hypot(point[0] - ap.x, point[1] - ap.y) <= radius for ap in aps)


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = min(max(float((p - a) @ ab) / denom, 0.0), 1.0)
    return float(np.hypot(*(p - (a + t * ab))))


def _det_rssi_interval(
    loss: PathLossConfig,
    ap: AccessPoint,
    anchor: np.ndarray,
    bearing: np.ndarray,
    t_range: tuple[float, float],
    jitter: float,
) -> tuple[float, float]:
    """Deterministic (noise-free) RSSI interval a device sweeps while sliding
    along ``anchor + t * bearing`` for t in t_range, inflated by anchor jitter."""
    a = anchor + t_range[0] * bearing
    b = anchor + t_range[1] * bearing
    slop = jitter * math.sqrt(2.0)
    d_min = max(_point_segment_distance(ap.pos, a, b) - slop, 1e-3)
    d_max = (
        max(math.hypot(*(ap.pos - a)), math.hypot(*(ap.pos - b))) + slop
    )

    def det(d: float) -> float:
        return loss.p0_dbm - 10.0 * loss.exponent_n * math.log10(d / loss.d0_m)

    return det(d_max), det(d_min)


def _role_t_range(role_idx: int, separation_range: tuple[float, float]) -> tuple[float, float]:
    lo, hi = separation_range
    if role_idx == 0:  # mobile sits at anchor - sep/2 * bearing
        return (-hi / 2.0, -lo / 2.0)
    return (lo / 2.0, hi / 2.0)


def _enforce_band_gaps(
    loss: PathLossConfig,
    campaign: CampaignConfig,
    aps: Sequence[AccessPoint],
    home: np.ndarray,
    intruder: np.ndarray,
    bearing_auth: np.ndarray,
    bearing_unauth: np.ndarray,
    shadows: np.ndarray,
) -> None:
    """Shift the intruder zone's shadow offsets so each (device, AP) signal
    band keeps at least ``min_band_gap_dbm`` of contrast with the home zone's
    band. Position geometry alone leaves some AP/zone combinations nearly
    indistinguishable; a guaranteed contrast models the reality that two
    separate spots see each AP through different obstructions."""
    sep_auth = (AUTHENTIC_MIN_SEPARATION_M, AUTHENTIC_MAX_SEPARATION_M)
    sep_unauth = (UNAUTHORIZED_MIN_SEPARATION_M, UNAUTHORIZED_MAX_SEPARATION_M)
    gap = campaign.min_band_gap_dbm
    for role_idx in (0, 1):
        for k, ap in enumerate(aps):
            a_lo, a_hi = _det_rssi_interval(
                loss, ap, home, bearing_auth,
                _role_t_range(role_idx, sep_auth), campaign.anchor_jitter_m,
            )
            u_lo, u_hi = _det_rssi_interval(
                loss, ap, intruder, bearing_unauth,
                _role_t_range(role_idx, sep_unauth), campaign.anchor_jitter_m,
            )
            a_lo += shadows[0, role_idx, k]
            a_hi += shadows[0, role_idx, k]
            u_lo += shadows[1, role_idx, k]
            u_hi += shadows[1, role_idx, k]
            above = u_lo - a_hi  # separation when the intruder band sits higher
            below = a_lo - u_hi
            if max(above, below) >= gap:
                continue
            if above >= below:
                shadows[1, role_idx, k] += gap - above
            else:
                shadows[1, role_idx, k] -= gap - below


def _pick_zone(
    rng: np.random.Generator,
    aps: Sequence[AccessPoint],
    env: EnvironmentConfig,
    strict_radius: float,
    propose,
) -> np.ndarray | None:
    """Draw zone candidates from ``propose``; prefer spots that keep the whole
    AP set in range, fall back to any spot that sees at least one AP."""
    fallback = None
    for _ in range(100):
        candidate = propose(rng)
        if not (0.0 <= candidate[0] <= env.area_m and 0.0 <= candidate[1] <= env.area_m):
            continue
        if _sees_all_aps(candidate, aps, strict_radius):
            return candidate
        if fallback is None and _sees_any_ap(candidate, aps, env.detection_radius_m):
            fallback = candidate
    return fallback


def location_geometry(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    campaign: CampaignConfig,
    seed: int,
    location_index: int,
    n_locations: int,
) -> LocationGeometry:
    """Derive one synthetic location's geometry from (seed, location_index).

    The environment's APs are partitioned round-robin across locations, so a
    run with L locations spreads the same ``n_aps`` identities over L rooms.
    """
    if n_locations < 1:
        raise ConfigurationError("n_locations must be >= 1")
    if n_locations > env.n_aps:
        raise ConfigurationError(
            f"cannot spread {env.n_aps} APs over {n_locations} locations"
        )
    rng = derived_rng(seed, _GEOMETRY_STREAM, location_index)
    indices = [i for i in range(env.n_aps) if i % n_locations == location_index]
    aps = place_access_points(env, rng, indices)

    strict_radius = env.detection_radius_m - campaign.zone_visibility_margin_m
    if strict_radius <= 0:
        strict_radius = env.detection_radius_m

    home = _pick_zone(
        rng, aps, env, strict_radius, lambda r: r.uniform(0.0, env.area_m, size=2)
    )
    if home is None:
        raise ConfigurationError("could not place a home spot that sees any AP")

    def propose_intruder(r: np.random.Generator) -> np.ndarray:
        radius = r.uniform(*campaign.intruder_offset_m)
        angle = r.uniform(0.0, 2.0 * math.pi)
        return home + radius * np.array([math.cos(angle), math.sin(angle)])

    intruder = _pick_zone(rng, aps, env, strict_radius, propose_intruder)
    if intruder is None:
        raise ConfigurationError("could not place an intruder zone that sees any AP")

    angles = rng.uniform(0.0, 2.0 * math.pi, size=2)
    bearings = [np.array([math.cos(a), math.sin(a)]) for a in angles]
    shadows = rng.normal(0.0, campaign.shadow_sigma_dbm, size=(2, 2, len(aps)))
    _enforce_band_gaps(
        loss, campaign, aps, home, intruder, bearings[0], bearings[1], shadows
    )
    return LocationGeometry(
        tag=f"loc-{location_index}",
        aps=aps,
        home=home,
        intruder_anchor=intruder,
        bearing_authentic=bearings[0],
        bearing_unauthorized=bearings[1],
        shadows=shadows,
    )


def generate_session(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    scenario: Scenario,
    rng: np.random.Generator,
    geometry: LocationGeometry | None = None,
    campaign: CampaignConfig | None = None,
    device_ids: tuple[str, str] = ("sim-mobile", "sim-login"),
    base_timestamp_ms: int | None = None,
) -> tuple[ScanSnapshot, ScanSnapshot, Label]:
    """Place one device pair and scan.

    Without a geometry this is a standalone draw: APs are placed fresh from
    the rng and the pair midpoint lands uniformly in the area with the
    scenario's separation at a uniform bearing. With a geometry, the pair
    jitters around the location's home or intruder spot and moves along the
    campaign bearing, with the zone's shadow offsets applied.

    Both snapshots share a timestamp within one second. Raises
    :class:`NoVisibleAp` when either device sees no AP.
    """
    separation = scenario.draw_separation(rng)
    if geometry is None:
        aps: Sequence[AccessPoint] = place_access_points(env, rng)
        anchor = rng.uniform(0.0, env.area_m, size=2)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        bearing = np.array([math.cos(angle), math.sin(angle)])
        shadows = None
        tag = None
    else:
        camp = campaign or CampaignConfig()
        if scenario.is_authentic:
            spot, bearing = geometry.home, geometry.bearing_authentic
        else:
            spot, bearing = geometry.intruder_anchor, geometry.bearing_unauthorized
        anchor = spot + rng.uniform(-camp.anchor_jitter_m, camp.anchor_jitter_m, size=2)
        aps = geometry.aps
        shadows = geometry.shadows[0 if scenario.is_authentic else 1]
        tag = geometry.tag

    positions = (anchor - 0.5 * separation * bearing, anchor + 0.5 * separation * bearing)

    visible: list[list[tuple[int, float]]] = []
    for pos in positions:
        seen = []
        for k, ap in enumerate(aps):
            d = math.hypot(pos[0] - ap.x, pos[1] - ap.y)
            if d <= env.detection_radius_m:
                seen.append((k, max(d, 1e-3)))
        visible.append(seen)
    if not visible[0] or not visible[1]:
        raise NoVisibleAp(
            f"a device saw no AP within {env.detection_radius_m} m"
        )

    if base_timestamp_ms is None:
        base_timestamp_ms = int(rng.integers(1_600_000_000_000, 1_900_000_000_000))
    login_delay_ms = int(rng.integers(0, 1001))

    snapshots = []
    for role_idx, role in enumerate((DeviceRole.MOBILE, DeviceRole.LOGIN)):
        observations = []
        for k, d in visible[role_idx]:
            ap = aps[k]
            extra = float(shadows[role_idx, k]) if shadows is not None else 0.0
            rssi = rssi_at_distance(loss, d, rng, extra_offset_dbm=extra)
            observations.append(
                BeaconObservation(ssid=ap.ssid, frequency=ap.frequency, rssi=rssi, bssid=ap.bssid)
            )
        snapshots.append(
            ScanSnapshot(
                device_id=device_ids[role_idx],
                role=role,
                timestamp=base_timestamp_ms + (login_delay_ms if role is DeviceRole.LOGIN else 0),
                observations=tuple(observations),
                location_tag=tag,
            )
        )
    return snapshots[0], snapshots[1], scenario.label


def _session_with_retries(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    scenario: Scenario,
    rng: np.random.Generator,
    geometry: LocationGeometry | None,
    campaign: CampaignConfig | None,
) -> tuple[ScanSnapshot, ScanSnapshot, Label]:
    for _ in range(101):  # initial try plus 100 retries with a fresh anchor
        try:
            return generate_session(env, loss, scenario, rng, geometry=geometry, campaign=campaign)
        except NoVisibleAp:
            continue
    raise ConfigurationError(
        "100 consecutive placements saw no AP; environment is too sparse"
    )


def _allocation(total: int, buckets: int) -> list[int]:
    base, extra = divmod(total, buckets)
    return [base + (1 if j < extra else 0) for j in range(buckets)]


def generate_dataset(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    n_sessions_per_class: int,
    locations: int,
    seed: int,
    campaign: CampaignConfig = CampaignConfig(),
) -> Dataset:
    """Generate labeled rows following the collection protocol.

    Sessions of each class are spread as evenly as possible over the
    locations (give at least one session per class per location by using
    ``n_sessions_per_class >= locations``). Each session flattens to one row
    per device per observed AP, carrying the session's label and the
    location's tag. Deterministic for fixed configs and seed.
    """
    if n_sessions_per_class < 1:
        raise ValueError("n_sessions_per_class must be >= 1")
    if locations < 1:
        raise ValueError("locations must be >= 1")
    geos = [location_geometry(env, loss, campaign, seed, j, locations) for j in range(locations)]
    per_location = _allocation(n_sessions_per_class, locations)

    scenarios = (Scenario.authentic(), Scenario.unauthorized())
    samples: list[LabeledSample] = []
    for j, geo in enumerate(geos):
        for class_idx, scenario in enumerate(scenarios):
            rng = derived_rng(seed, _SESSION_STREAM, j, class_idx)
            for _ in range(per_location[j]):
                mobile, login, label = _session_with_retries(
                    env, loss, scenario, rng, geo, campaign
                )
                for snap in (mobile, login):
                    for obs in snap.observations:
                        samples.append(
                            LabeledSample(
                                role=snap.role,
                                observation=replace(obs, bssid=None),
                                location_tag=geo.tag,
                                label=label,
                            )
                        )
    return Dataset(samples=tuple(samples), provenance=Provenance.SIMULATED)


def sessions_for_target_rows(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    target_rows: int,
    locations: int,
    seed: int,
    campaign: CampaignConfig = CampaignConfig(),
    probe_sessions_per_class: int = 30,
) -> int:
    """Estimate the per-class session count that yields roughly ``target_rows``
    flattened rows, by probing the same geometries with a separate stream."""
    if target_rows < 1:
        raise ValueError("target_rows must be >= 1")
    geos = [location_geometry(env, loss, campaign, seed, j, locations) for j in range(locations)]
    scenarios = (Scenario.authentic(), Scenario.unauthorized())
    rows = 0
    sessions = 0
    for j, geo in enumerate(geos):
        for class_idx, scenario in enumerate(scenarios):
            rng = derived_rng(seed, _PROBE_STREAM, j, class_idx)
            for _ in range(probe_sessions_per_class):
                mobile, login, _ = _session_with_retries(env, loss, scenario, rng, geo, campaign)
                rows += len(mobile.observations) + len(login.observations)
                sessions += 1
    mean_rows = rows / sessions
    return max(locations, int(math.floor(target_rows / (2.0 * mean_rows) + 0.5)))


def scenario_session(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    scenario: Scenario,
    env_seed: int,
    locations: int,
    location_index: int,
    session_seed: int,
    campaign: CampaignConfig = CampaignConfig(),
    device_ids: tuple[str, str] = ("sim-mobile", "sim-login"),
    base_timestamp_ms: int | None = None,
) -> tuple[ScanSnapshot, ScanSnapshot]:
    """One fresh session at a location whose geometry is reconstructed from
    ``env_seed`` (the seed a training dataset was generated with). Used to
    drive live authentication attempts against a model trained on that
    dataset; the session randomness comes from ``session_seed`` alone."""
    geo = location_geometry(env, loss, campaign, env_seed, location_index, locations)
    rng = derived_rng(session_seed, _ATTEMPT_STREAM)
    for _ in range(101):
        try:
            mobile, login, _ = generate_session(
                env,
                loss,
                scenario,
                rng,
                geometry=geo,
                campaign=campaign,
                device_ids=device_ids,
                base_timestamp_ms=base_timestamp_ms,
            )
            return mobile, login
        except NoVisibleAp:
            continue
    raise ConfigurationError("could not place an attempt session that sees any AP")


def simulation_metadata(
    env: EnvironmentConfig,
    loss: PathLossConfig,
    campaign: CampaignConfig,
    n_sessions_per_class: int,
    locations: int,
    seed: int,
    dataset: Dataset,
) -> dict:
    """Sidecar document describing how a simulated dataset was produced."""
    from dataclasses import asdict

    counts = dataset.label_counts()
    return {
        "generator": "proxauth.rf_simulator",
        "version": 1,
        "environment": asdict(env),
        "path_loss": asdict(loss),
        "campaign": asdict(campaign),
        "n_sessions_per_class": n_sessions_per_class,
        "locations": locations,
        "seed": seed,
        "rows": len(dataset),
        "label_counts": {label.value: n for label, n in counts.items()},
    }
