import dataclasses
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satlae.config import Policy, ScenarioConfig
from satlae.scenario import (GLOBAL_KEYS, ScenarioError, default_values, dump_scenario, parse_scenario,
                             parse_scenario_text)


def field_diff(a, b):
    return {f.name for f in dataclasses.fields(a) if getattr(a, f.name) != getattr(b, f.name)}


class TestParse:
    def test_empty_is_default(self):
        cfg, defaulted = parse_scenario_text("")
        assert cfg == ScenarioConfig()
        assert set(GLOBAL_KEYS) <= set(defaulted)

    def test_defaults_logged(self, caplog):
        with caplog.at_level(logging.INFO, logger="satlae.scenario"):
            parse_scenario_text("sim.seed = 3\n")
        assert "shell.planes" in caplog.text

    def test_seed_only(self):
        cfg, defaulted = parse_scenario_text("sim.seed = 42  # comment\n")
        assert field_diff(cfg, ScenarioConfig()) == {"master_seed"}
        assert cfg.master_seed == 42
        assert "sim.seed" not in defaulted

    def test_file(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("policy.receiver = single-sat\nsim.slots = 5\n")
        cfg = parse_scenario(p)
        assert cfg.policy == Policy(receiver="single-sat") and cfg.horizon_slots == 5

    def test_fleet_keys(self):
        cfg, _ = parse_scenario_text("fleet.2.start = 51.0, -0.5\nfleet.2.k = 2\n")
        assert cfg.fleets[1].start.lat == 51.0 and cfg.fleets[1].lav_count == 2
        assert cfg.fleets[0] == ScenarioConfig().fleets[0]

    def test_three_fleets(self):
        text = ("sim.fleets = 3\nfleet.3.start = 51, 0\nfleet.3.end = 50, 0\nfleet.3.speed_kms = 0.02\n"
                "fleet.3.k = 2\nfleet.3.alt_km = 0.5\nfleet.3.formation_km = 0.05\n")
        assert len(parse_scenario_text(text)[0].fleets) == 3
        with pytest.raises(ScenarioError, match="fleet.3.start has no default"):
            parse_scenario_text("sim.fleets = 3\n")


class TestErrors:
    def test_range_error_names_key(self):
        with pytest.raises(ScenarioError) as e:
            parse_scenario_text("shell.altitude_km = -1\n")
        msg = str(e.value)
        assert "shell.altitude_km" in msg and "-1" in msg and "> 0" in msg

    @pytest.mark.parametrize("text,match", [
        ("shell.altitud_km = 550\n", "unknown key"),
        ("fleet.1.colour = red\n", "unknown key"),
        ("sim.seed = 1\nsim.seed = 2\n", "duplicate"),
        ("sim.seed\n", "expected 'key = value'"),
        ("sim.slots = 1.5\n", "sim.slots"),
        ("policy.variant = hourly\n", "policy.variant"),
        ("fleet.3.k = 2\n", "sim.fleets"),
        ("shell.phasing = 22\n", "phasing"),
    ])
    def test_rejected(self, text, match):
        with pytest.raises(ScenarioError, match=match):
            parse_scenario_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_scenario(tmp_path / "nope.txt")


class TestDump:
    def test_idempotent(self):
        text = dump_scenario(ScenarioConfig())
        cfg, defaulted = parse_scenario_text(text)
        assert cfg == ScenarioConfig() and defaulted == []
        assert dump_scenario(cfg) == text

    def test_lists_every_key(self):
        keys = [line.split(" = ")[0] for line in dump_scenario(ScenarioConfig()).splitlines()]
        assert set(keys) == set(default_values())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**63), st.floats(0, 100), st.floats(0.1, 5), st.integers(1, 4))
    def test_round_trip(self, seed, power, slot_s, sats):
        cfg = ScenarioConfig(master_seed=seed, power_w=power, slot_duration_s=slot_s,
                             policy=Policy(sats=sats))
        assert parse_scenario_text(dump_scenario(cfg))[0] == cfg

    def test_fingerprint(self):
        a = ScenarioConfig()
        assert a.fingerprint() == ScenarioConfig(workers=4).fingerprint()
        assert a.fingerprint() != a.with_(master_seed=1).fingerprint()
        assert len(a.fingerprint()) == 16
