import numpy as np
import pytest

from satlae.config import Policy
from satlae.control import (InsufficientVisibilityError, beam_center, best_channel_satellite,
                            frame_start, nadir_beams, point_beams, report_count, schedule,
                            select_serving_set, service_run)
from satlae.geokit import GeodeticPos, geodetic_to_xyz


class TestBeamCenter:
    def test_mean(self):
        c = beam_center([GeodeticPos(50, 0, 1), GeodeticPos(52, -2, 1)])
        assert (c.lat, c.lon, c.alt) == (51.0, -1.0, 1.0)

    def test_antimeridian(self):
        c = beam_center([GeodeticPos(0, 179), GeodeticPos(0, -179)], wrap_safe=True)
        assert abs(c.lon) == pytest.approx(180.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            beam_center([])

    def test_pointing(self):
        sat = geodetic_to_xyz(0, 0, 550)
        np.testing.assert_allclose(point_beams(sat, GeodeticPos(0, 0, 0))[0], [-1, 0, 0], atol=1e-12)
        np.testing.assert_allclose(nadir_beams(sat)[0], [-1, 0, 0])


class TestSelection:
    sats = np.array([[3.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0], [-1.0, 0, 0], [1.0, 0, 0]])

    def test_nearest_with_ties(self):
        vis = np.array([True, True, True, True, True])
        s = select_serving_set(self.sats, np.zeros(3), 3, vis)
        assert s.sats == (1, 3, 4)

    def test_mask(self):
        vis = np.array([True, False, True, False, False])
        assert select_serving_set(self.sats, np.zeros(3), 2, vis).sats == (2, 0)

    def test_insufficient(self):
        with pytest.raises(InsufficientVisibilityError, match="slot 7"):
            select_serving_set(self.sats, np.zeros(3), 3, np.array([1, 0, 0, 0, 1], bool), slot=7)

    def test_best_channel(self):
        assert best_channel_satellite(np.array([1.0, 5.0, 5.0]), np.array([9, 4, 2])) == 2
        with pytest.raises(InsufficientVisibilityError):
            best_channel_satellite(np.array([]), np.array([], int))


class TestSchedule:
    @pytest.mark.parametrize("n,expected", [(1, 1800), (200, 9), (500, 4), (1000, 2), (1800, 1)])
    def test_report_count(self, n, expected):
        assert report_count(Policy(frame_slots=n), 1800) == expected

    def test_other_variants(self):
        assert report_count(Policy(variant="slot-level"), 1800) == 1800
        assert report_count(Policy(variant="earth-center"), 1800) == 1800
        assert report_count(Policy(variant="fixed-initial"), 1800) == 1

    @pytest.mark.parametrize("slot", [0, 199, 200, 1799])
    def test_frame_starts(self, slot):
        assert frame_start(Policy(frame_slots=200), slot) == slot // 200 * 200
        assert frame_start(Policy(frame_slots=1), slot) == frame_start(Policy(variant="slot-level"), slot)
        assert frame_start(Policy(frame_slots=1800), slot) == frame_start(Policy(variant="fixed-initial"), slot)

    def test_schedule_holds_center(self):
        seen = []

        def centroid_at(s):
            seen.append(s)
            return GeodeticPos(50 + s * 1e-4, 0)

        a = schedule(Policy(frame_slots=200), 250, centroid_at)
        assert a.frame_start == 200 and a.beam_center.lat == pytest.approx(50.02)
        assert not a.earth_center and a.position_report_count == 2
        assert schedule(Policy(variant="earth-center"), 5, centroid_at).earth_center


class TestServiceRun:
    def test_scripted_failure(self):
        sel = {0: "A", 150: "B"}
        meets = lambda t, e: not (e == "A" and t >= 150)  # noqa: E731
        m = service_run(lambda t: sel.get(t, "?"), meets, 300)
        assert (m.service_duration, m.handover_count, m.na_flag) == (150, 1, False)
        assert m.serving[149] == "A" and m.serving[150] == "B"

    def test_reselect_same_entity_not_counted(self):
        meets = lambda t, e: t not in (10, 11)  # noqa: E731
        m = service_run(lambda t: "A", meets, 50)
        assert (m.service_duration, m.handover_count) == (10, 0)

    def test_na_at_start(self):
        m = service_run(lambda t: "A", lambda t, e: False, 300)
        assert m.na_flag and m.service_duration == 0 and m.handover_count == 0

    def test_full_frame(self):
        m = service_run(lambda t: "A", lambda t, e: True, 300)
        assert (m.service_duration, m.handover_count) == (300, 0)

    def test_duration_bounded_by_frame(self):
        for fail_at in range(1, 40, 7):
            m = service_run(lambda t: t // fail_at, lambda t, e: t < (e + 1) * fail_at, 40)
            assert 0 < m.service_duration <= 40
            assert m.handover_count == (40 - 1) // fail_at
