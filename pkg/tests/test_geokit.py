import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satlae.geokit import (OMEGA_EARTH, R_EARTH_KM, CartesianVec, FleetTrack, Frame,
                           FrameMismatchError, GeodeticPos, Instant, cartesian_to_geodetic,
                           elevation_deg, elevations_deg, fleet_centroid, formation_offsets,
                           geodetic_to_cartesian, geodetic_to_xyz, great_circle_km,
                           inertial_to_earth_fixed, lav_positions, lav_xyz, local_east_north,
                           slant_range_km)

R = R_EARTH_KM


class TestGeodetic:
    @pytest.mark.parametrize("lat,lon,alt,expected", [
        (0, 0, 0, (R, 0, 0)),
        (90, 0, 0, (0, 0, R)),
        (0, 90, 550, (0, R + 550, 0)),
        (0, 180, 0, (-R, 0, 0)),
        (-90, 45, 10, (0, 0, -(R + 10))),
    ])
    def test_cardinal_points(self, lat, lon, alt, expected):
        np.testing.assert_allclose(geodetic_to_xyz(lat, lon, alt), expected, atol=1e-9)

    def test_vectorized_matches_scalar(self):
        lats, lons = [10.0, -20.0, 51.48], [0.0, 100.0, -0.076]
        batch = geodetic_to_xyz(lats, lons, [1.0, 2.0, 3.0])
        for i in range(3):
            np.testing.assert_allclose(batch[i], geodetic_to_xyz(lats[i], lons[i], i + 1.0))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-89.9, 89.9), st.floats(-179.9, 180.0), st.floats(0, 2000))
    def test_round_trip(self, lat, lon, alt):
        back = cartesian_to_geodetic(geodetic_to_cartesian(GeodeticPos(lat, lon, alt)))
        assert back.lat == pytest.approx(lat, abs=1e-9)
        assert back.lon == pytest.approx(lon, abs=1e-9)
        assert back.alt == pytest.approx(alt, abs=1e-6)

    @pytest.mark.parametrize("lat,lon,alt", [(91, 0, 0), (0, -181, 0), (0, 0, -1)])
    def test_invalid_position(self, lat, lon, alt):
        with pytest.raises(ValueError):
            GeodeticPos(lat, lon, alt)


class TestFrames:
    def test_quarter_turn(self):
        t = (math.pi / 2) / OMEGA_EARTH
        v = inertial_to_earth_fixed(CartesianVec([7000.0, 0, 0], Frame.INERTIAL), Instant(t))
        np.testing.assert_allclose(v.xyz, [0, -7000.0, 0], atol=1e-9)
        assert v.frame is Frame.EARTH_FIXED

    def test_mixed_frames_rejected(self):
        a = CartesianVec([1.0, 0, 0], Frame.INERTIAL)
        b = CartesianVec([1.0, 0, 0], Frame.EARTH_FIXED)
        with pytest.raises(FrameMismatchError):
            a - b
        with pytest.raises(FrameMismatchError):
            inertial_to_earth_fixed(b, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1e4, 1e4), min_size=3, max_size=3), st.floats(0, 86400))
    def test_rotation_preserves_norm(self, xyz, t):
        v = CartesianVec(xyz, Frame.INERTIAL)
        assert inertial_to_earth_fixed(v, t).norm() == pytest.approx(v.norm(), rel=1e-12, abs=1e-9)


class TestElevation:
    def test_zenith(self):
        g = geodetic_to_xyz(51.0, 0.0, 0.0)
        assert elevation_deg(g, g * (R + 550) / R) == pytest.approx(90.0)

    def test_dot_product_oracle(self):
        g = geodetic_to_xyz(10.0, 20.0, 0.0)
        s = geodetic_to_xyz(14.0, 23.0, 550.0)
        ray = s - g
        expected = 90 - math.degrees(math.acos(ray @ g / (np.linalg.norm(ray) * np.linalg.norm(g))))
        assert elevation_deg(g, s) == pytest.approx(expected, abs=1e-10)
        assert elevations_deg(g, s[None, :])[0] == pytest.approx(expected, abs=1e-10)

    def test_below_horizon_negative(self):
        assert elevation_deg(geodetic_to_xyz(0, 0, 0), geodetic_to_xyz(0, 60, 550)) < 0

    def test_coincident_raises(self):
        g = geodetic_to_xyz(0, 0, 0)
        with pytest.raises(ValueError):
            elevation_deg(g, g)


class TestDistances:
    @pytest.mark.parametrize("theta", [0.5, 5.0, 20.0])
    def test_slant_range_law_of_cosines(self, theta):
        h = 550.0
        g, s = geodetic_to_xyz(0, 0, 0), geodetic_to_xyz(theta, 0, h)
        expected = math.sqrt(R**2 + (R + h) ** 2 - 2 * R * (R + h) * math.cos(math.radians(theta)))
        assert slant_range_km(g, s) == pytest.approx(expected, rel=1e-12)

    def test_great_circle_quarter(self):
        assert great_circle_km(GeodeticPos(0, 0), GeodeticPos(0, 90)) == pytest.approx(math.pi * R / 2)

    def test_east_north_orthonormal(self):
        e, n = local_east_north(51.48, -0.5)
        up = geodetic_to_xyz(51.48, -0.5, 0) / R
        m = np.stack([e, n, up])
        np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(np.cross(e, n), up, atol=1e-12)


class TestFleetTrack:
    track = FleetTrack(GeodeticPos(51.48, -0.076, 1.0), GeodeticPos(50.48, -1.076, 1.0), 0.03)

    def test_start(self):
        c = fleet_centroid(self.track, 0.0)
        assert (c.lat, c.lon, c.alt) == (51.48, -0.076, 1.0)

    def test_hour_displacement(self):
        # 0.03 km/s for an hour is 108 km along the ground
        c = fleet_centroid(self.track, 3600.0)
        assert great_circle_km(self.track.start, c) == pytest.approx(108.0, rel=0.01)

    def test_parks_at_end(self):
        c = fleet_centroid(self.track, 1e6)
        assert (c.lat, c.lon) == pytest.approx((50.48, -1.076))

    def test_formation(self):
        off = formation_offsets(4, 0.1)
        np.testing.assert_array_equal(off[0], [0, 0])
        np.testing.assert_allclose(np.hypot(off[1:, 0], off[1:, 1]), 0.1)

    def test_lavs_around_leader(self):
        ps = lav_positions(self.track, 100.0)
        c = fleet_centroid(self.track, 100.0)
        assert (ps[0].lat, ps[0].lon) == pytest.approx((c.lat, c.lon))
        xyz = lav_xyz(self.track, 100.0)
        assert xyz.shape == (4, 3)
        np.testing.assert_allclose(np.linalg.norm(xyz[1:] - xyz[0], axis=1), 0.1, rtol=1e-3)

    def test_single_lav(self):
        t = FleetTrack(self.track.start, self.track.end, 0.03, lav_count=1)
        assert len(lav_positions(t, 0.0)) == 1
