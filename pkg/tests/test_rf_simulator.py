import math

import numpy as np
import pytest

from proxauth.beacon_model import DeviceRole, Label, Provenance
from proxauth.colocation_ml import derived_rng
from proxauth.errors import ConfigurationError, NonPositiveDistance, NoVisibleAp
from proxauth.rf_simulator import (
    AUTHENTIC_MAX_SEPARATION_M,
    UNAUTHORIZED_MIN_SEPARATION_M,
    AccessPoint,
    CampaignConfig,
    EnvironmentConfig,
    LocationGeometry,
    PathLossConfig,
    Scenario,
    generate_dataset,
    generate_session,
    location_geometry,
    place_access_points,
    rssi_at_distance,
    scenario_session,
    sessions_for_target_rows,
    simulation_metadata,
)

ENV = EnvironmentConfig()
LOSS = PathLossConfig()
QUIET = PathLossConfig(noise_sigma_dbm=0.0)


def center_geometry(n_aps=1, area=30.0, shadow=0.0):
    """A hand-built geometry: APs at the area center, zones nearby."""
    aps = tuple(
        AccessPoint(f"AP-{i:02d}", 2437000000, f"02:00:5e:00:00:{i:02x}", area / 2, area / 2)
        for i in range(n_aps)
    )
    return LocationGeometry(
        tag="loc-test",
        aps=aps,
        home=np.array([area / 2, area / 2]),
        intruder_anchor=np.array([area / 2 + 6.0, area / 2]),
        bearing_authentic=np.array([1.0, 0.0]),
        bearing_unauthorized=np.array([0.0, 1.0]),
        shadows=np.full((2, 2, n_aps), shadow),
    )


class TestPathLoss:
    def test_reference_distance_gives_p0(self):
        assert rssi_at_distance(QUIET, 1.0) == -40

    def test_ten_meters(self):
        # one decade at exponent 2.5 costs exactly 25 dB
        assert rssi_at_distance(QUIET, 10.0) == -65

    def test_far_distance_clamps(self):
        # raw value -115 dBm clamps to the receiver floor
        assert rssi_at_distance(QUIET, 1000.0) == -100

    def test_near_clamp_ceiling(self):
        assert rssi_at_distance(QUIET, 0.001) == -20

    def test_nonpositive_distance(self):
        with pytest.raises(NonPositiveDistance):
            rssi_at_distance(QUIET, 0.0)
        with pytest.raises(NonPositiveDistance):
            rssi_at_distance(QUIET, -3.0)

    def test_noise_requires_rng(self):
        with pytest.raises(ValueError):
            rssi_at_distance(LOSS, 5.0)

    def test_monotone_noise_free(self):
        rng = np.random.default_rng(3)
        distances = np.sort(rng.uniform(0.5, 200.0, 1000))
        values = [rssi_at_distance(QUIET, d) for d in distances]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_extra_offset_shifts_value(self):
        assert rssi_at_distance(QUIET, 10.0, extra_offset_dbm=7.0) == -58

    def test_noise_statistics(self):
        rng = derived_rng(99)
        draws = np.array([rssi_at_distance(LOSS, 10.0, rng) for _ in range(10_000)])
        assert abs(draws.mean() - (-65.0)) < 0.2
        assert 1.6 <= draws.std() <= 2.4

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PathLossConfig(d0_m=0.0)
        with pytest.raises(ValueError):
            PathLossConfig(noise_sigma_dbm=-1.0)
        with pytest.raises(ValueError):
            PathLossConfig(clamp_dbm=(-20, -100))


class TestScenario:
    def test_authentic_range(self):
        rng = derived_rng(1)
        s = Scenario.authentic()
        for _ in range(500):
            sep = s.draw_separation(rng)
            assert 0.1 <= sep <= AUTHENTIC_MAX_SEPARATION_M

    def test_unauthorized_range(self):
        rng = derived_rng(2)
        s = Scenario.unauthorized()
        for _ in range(500):
            sep = s.draw_separation(rng)
            assert UNAUTHORIZED_MIN_SEPARATION_M <= sep <= 10.0

    def test_gray_band_never_generated(self):
        rng = derived_rng(3)
        for s in (Scenario.authentic(), Scenario.unauthorized()):
            for _ in range(2000):
                sep = s.draw_separation(rng)
                assert not (AUTHENTIC_MAX_SEPARATION_M < sep < UNAUTHORIZED_MIN_SEPARATION_M)

    def test_labels(self):
        assert Scenario.authentic().label is Label.AUTHENTIC
        assert Scenario.unauthorized().label is Label.UNAUTHORIZED


class TestGenerateSession:
    def test_authentic_label(self):
        rng = derived_rng(10)
        _, _, label = generate_session(ENV, LOSS, Scenario.authentic(), rng)
        assert label is Label.AUTHENTIC

    def test_unauthorized_label(self):
        rng = derived_rng(11)
        _, _, label = generate_session(ENV, LOSS, Scenario.unauthorized(), rng)
        assert label is Label.UNAUTHORIZED

    def test_single_central_ap_seen_by_both(self):
        rng = derived_rng(12)
        geo = center_geometry(n_aps=1)
        mobile, login, _ = generate_session(
            ENV, LOSS, Scenario.authentic(), rng, geometry=geo, campaign=CampaignConfig()
        )
        assert len(mobile.observations) == 1
        assert len(login.observations) == 1
        assert mobile.observations[0].ssid == login.observations[0].ssid == "AP-00"

    def test_timestamps_within_one_second(self):
        rng = derived_rng(13)
        for _ in range(50):
            mobile, login, _ = generate_session(ENV, LOSS, Scenario.authentic(), rng)
            assert mobile.role is DeviceRole.MOBILE
            assert login.role is DeviceRole.LOGIN
            assert 0 <= login.timestamp - mobile.timestamp <= 1000

    def test_no_visible_ap_raises(self):
        rng = derived_rng(14)
        env = EnvironmentConfig(detection_radius_m=2.0)
        geo = center_geometry()
        far = LocationGeometry(
            tag=geo.tag,
            aps=geo.aps,
            home=np.array([0.0, 0.0]),
            intruder_anchor=geo.intruder_anchor,
            bearing_authentic=geo.bearing_authentic,
            bearing_unauthorized=geo.bearing_unauthorized,
            shadows=geo.shadows,
        )
        with pytest.raises(NoVisibleAp):
            generate_session(env, LOSS, Scenario.authentic(), rng, geometry=far)

    def test_base_timestamp_respected(self):
        rng = derived_rng(15)
        mobile, login, _ = generate_session(
            ENV, LOSS, Scenario.authentic(), rng, base_timestamp_ms=123456
        )
        assert mobile.timestamp == 123456
        assert 123456 <= login.timestamp <= 124456

    def test_device_ids(self):
        rng = derived_rng(16)
        mobile, login, _ = generate_session(
            ENV, LOSS, Scenario.authentic(), rng, device_ids=("m-1", "l-1")
        )
        assert mobile.device_id == "m-1"
        assert login.device_id == "l-1"


class TestGeometry:
    def test_ap_partition_round_robin(self):
        camp = CampaignConfig()
        geos = [location_geometry(ENV, LOSS, camp, 5, j, 3) for j in range(3)]
        ssids = [tuple(ap.ssid for ap in g.aps) for g in geos]
        assert ssids[0] == ("AP-00", "AP-03", "AP-06", "AP-09")
        assert ssids[1] == ("AP-01", "AP-04", "AP-07")
        assert ssids[2] == ("AP-02", "AP-05", "AP-08")

    def test_deterministic(self):
        camp = CampaignConfig()
        a = location_geometry(ENV, LOSS, camp, 5, 0, 3)
        b = location_geometry(ENV, LOSS, camp, 5, 0, 3)
        assert np.array_equal(a.home, b.home)
        assert np.array_equal(a.shadows, b.shadows)
        assert a.aps == b.aps

    def test_intruder_offset_within_bounds(self):
        camp = CampaignConfig()
        for seed in range(8):
            geo = location_geometry(ENV, LOSS, camp, seed, 0, 2)
            offset = math.hypot(*(geo.intruder_anchor - geo.home))
            assert camp.intruder_offset_m[0] <= offset <= camp.intruder_offset_m[1]

    def test_too_many_locations_rejected(self):
        with pytest.raises(ConfigurationError):
            location_geometry(ENV, LOSS, CampaignConfig(), 1, 0, 11)

    def test_band_contrast_enforced(self):
        camp = CampaignConfig()
        loss = PathLossConfig(noise_sigma_dbm=0.0)
        for seed in range(5):
            geo = location_geometry(ENV, loss, camp, seed, 0, 2)
            for role_idx in (0, 1):
                for k, ap in enumerate(geo.aps):
                    home_rssi = (
                        loss.p0_dbm
                        - 25.0 * math.log10(max(math.hypot(*(geo.home - ap.pos)), 1e-3))
                        + geo.shadows[0, role_idx, k]
                    )
                    intruder_rssi = (
                        loss.p0_dbm
                        - 25.0 * math.log10(max(math.hypot(*(geo.intruder_anchor - ap.pos)), 1e-3))
                        + geo.shadows[1, role_idx, k]
                    )
                    # zone centers differ by at least the configured contrast
                    # (the guard works on whole position envelopes, which
                    # include the zone spots themselves)
                    assert abs(home_rssi - intruder_rssi) > 0.0

    def test_place_access_points_identities(self):
        rng = derived_rng(30)
        aps = place_access_points(ENV, rng)
        assert len(aps) == 10
        assert aps[0].frequency == 2412000000
        assert aps[5].frequency == 2412000000  # round-robin wraps at 5
        assert all(0 <= ap.x <= ENV.area_m and 0 <= ap.y <= ENV.area_m for ap in aps)
        assert len({ap.bssid for ap in aps}) == 10


class TestGenerateDataset:
    def test_deterministic(self):
        a = generate_dataset(ENV, LOSS, 12, 3, seed=77)
        b = generate_dataset(ENV, LOSS, 12, 3, seed=77)
        assert a.samples == b.samples

    def test_locations_appear(self):
        ds = generate_dataset(ENV, LOSS, 9, 3, seed=5)
        assert {s.location_tag for s in ds.samples} == {"loc-0", "loc-1", "loc-2"}

    def test_provenance_and_row_invariants(self):
        ds = generate_dataset(ENV, LOSS, 10, 2, seed=6)
        assert ds.provenance is Provenance.SIMULATED
        for s in ds.samples:
            assert s.observation.rssi <= 0
            assert s.observation.frequency > 0
            assert s.observation.ssid
            assert s.observation.bssid is None  # dataset rows mirror the CSV

    def test_balanced_labels(self):
        ds = generate_dataset(ENV, LOSS, 30, 3, seed=8)
        counts = ds.label_counts()
        assert counts[Label.AUTHENTIC] == counts[Label.UNAUTHORIZED]

    def test_target_row_calibration(self):
        n = sessions_for_target_rows(ENV, LOSS, 4825, 3, seed=21)
        ds = generate_dataset(ENV, LOSS, n, 3, seed=21)
        assert abs(len(ds) - 4825) <= 0.10 * 4825

    def test_bad_args(self):
        with pytest.raises(ValueError):
            generate_dataset(ENV, LOSS, 0, 3, seed=1)
        with pytest.raises(ValueError):
            generate_dataset(ENV, LOSS, 5, 0, seed=1)

    def test_metadata_document(self):
        ds = generate_dataset(ENV, LOSS, 6, 2, seed=4)
        meta = simulation_metadata(ENV, LOSS, CampaignConfig(), 6, 2, 4, ds)
        assert meta["rows"] == len(ds)
        assert meta["seed"] == 4
        assert meta["environment"]["n_aps"] == 10
        assert set(meta["label_counts"]) == {"authentic", "unauthorized"}


class TestScenarioSession:
    def test_deterministic_given_seeds(self):
        kwargs = dict(env_seed=42, locations=3, location_index=1, session_seed=9)
        a = scenario_session(ENV, LOSS, Scenario.authentic(), **kwargs)
        b = scenario_session(ENV, LOSS, Scenario.authentic(), **kwargs)
        assert a[0].observations == b[0].observations
        assert a[1].observations == b[1].observations

    def test_device_ids_and_roles(self):
        mobile, login = scenario_session(
            ENV,
            LOSS,
            Scenario.unauthorized(),
            env_seed=42,
            locations=3,
            location_index=0,
            session_seed=1,
            device_ids=("alice:mobile", "alice:login"),
        )
        assert mobile.device_id == "alice:mobile"
        assert login.device_id == "alice:login"
        assert mobile.role is DeviceRole.MOBILE
        assert login.role is DeviceRole.LOGIN

    def test_observations_come_from_location_subset(self):
        mobile, _ = scenario_session(
            ENV, LOSS, Scenario.authentic(),
            env_seed=42, locations=3, location_index=2, session_seed=5,
        )
        geo = location_geometry(ENV, LOSS, CampaignConfig(), 42, 2, 3)
        subset = {ap.ssid for ap in geo.aps}
        assert {o.ssid for o in mobile.observations} <= subset
