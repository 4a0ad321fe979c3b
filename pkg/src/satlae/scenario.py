"""Flat ``key = value`` scenario files.

Keys are dotted (``shell.planes``, ``fleet.1.start`` ...). Unknown keys and
out-of-range values are errors; missing keys take the case-study defaults.
``dump_scenario`` emits every key so ``parse(dump(cfg)) == cfg``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .antenna import ArrayGeometry, BeamPattern
from .channel import LinkParams
from .config import RECEIVERS, TRANSMITTERS, VARIANTS, Policy, ScenarioConfig, default_fleets
from .constellation import ShellConfig
from .geokit import FleetTrack, GeodeticPos

log = logging.getLogger(__name__)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], Any]
    check: Callable[[Any], bool]
    allowed: str


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    if not re.fullmatch(r"[+-]?\d+", s.strip()):
        raise ValueError(f"not an integer: {s!r}")
    return int(s)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _latlon(s: str) -> tuple[float, float]:
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'lat, lon', got {s!r}")
    return float(parts[0]), float(parts[1])


def _choice(options):
    return _Key(str.strip, lambda v: v in options, "one of " + ", ".join(options))


_POS = _Key(_float, lambda v: v > 0 and math.isfinite(v), "> 0")
_NONNEG = _Key(_float, lambda v: v >= 0 and math.isfinite(v), ">= 0")
_POS_INT = _Key(_int, lambda v: v >= 1, "integer >= 1")
_ANY = _Key(_float, math.isfinite, "finite real")
_LATLON = _Key(_latlon, lambda v: -90 <= v[0] <= 90 and -180 < v[1] <= 180, "lat in [-90, 90], lon in (-180, 180]")

GLOBAL_KEYS: dict[str, _Key] = {
    "shell.planes": _POS_INT,
    "shell.sats_per_plane": _POS_INT,
    "shell.altitude_km": _POS,
    "shell.inclination_deg": _Key(_float, lambda v: 0 <= v <= 180, "[0, 180]"),
    "shell.phasing": _Key(_int, lambda v: v >= 0, "integer in [0, planes-1]"),
    "shell.phase_deg": _ANY,
    "array.rows": _POS_INT,
    "array.cols": _POS_INT,
    "array.spacing": _POS,
    "pattern.peak_dbi": _ANY,
    "pattern.hbw_deg": _POS,
    "pattern.sll_db": _POS,
    "link.freq_ghz": _POS,
    "link.noise_w": _POS,
    "link.rician_db": _Key(_float, lambda v: not math.isnan(v), "real (inf allowed)"),
    "link.tx_gain_dbi": _ANY,
    "link.los_phase": _choice(("propagation", "none")),
    "policy.variant": _choice(VARIANTS),
    "policy.frame_slots": _POS_INT,
    "policy.receiver": _choice(RECEIVERS),
    "policy.sats": _POS_INT,
    "policy.transmitter": _choice(TRANSMITTERS),
    "sim.fleets": _POS_INT,
    "sim.slots": _POS_INT,
    "sim.slot_s": _POS,
    "sim.min_elev_deg": _Key(_float, lambda v: -90 <= v <= 90, "[-90, 90]"),
    "sim.seed": _Key(_int, lambda v: 0 <= v < 2**64, "integer in [0, 2^64)"),
    "sim.power_w": _NONNEG,
    "sim.joint_visibility": _Key(_bool, lambda v: True, "boolean"),
    "sim.rate_metric": _choice(("per-fleet", "sum")),
    "service.frame_slots": _POS_INT,
    "service.start_slot": _Key(_int, lambda v: v >= 0, "integer >= 0"),
    "minpower.lo_w": _POS,
    "minpower.hi_w": _POS,
    "minpower.stride": _POS_INT,
}

FLEET_KEYS: dict[str, _Key] = {
    "start": _LATLON,
    "end": _LATLON,
    "speed_kms": _NONNEG,
    "k": _POS_INT,
    "alt_km": _NONNEG,
    "formation_km": _NONNEG,
}

_FLEET_RE = re.compile(r"fleet\.(\d+)\.([a-z_]+)$")


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {n}: expected 'key = value', got {raw!r}")
        k, v = line.split("=", 1)
        yield n, k.strip(), v.strip()


def _convert(key: str, spec: _Key, raw: str):
    try:
        val = spec.parse(raw)
    except ValueError as exc:
        raise ScenarioError(f"{key}: cannot parse {raw!r} ({exc}); allowed {spec.allowed}") from None
    if not spec.check(val):
        raise ScenarioError(f"{key} = {raw} is out of range; allowed {spec.allowed}")
    return val


def parse_scenario_text(text: str) -> tuple[ScenarioConfig, list[str]]:
    """Parse scenario text; returns the config and the keys that took defaults."""
    values: dict[str, Any] = {}
    for n, key, raw in _lines(text):
        if key in values:
            raise ScenarioError(f"line {n}: duplicate key {key}")
        m = _FLEET_RE.match(key)
        if m:
            if m.group(2) not in FLEET_KEYS or int(m.group(1)) < 1:
                raise ScenarioError(f"line {n}: unknown key {key}")
            values[key] = _convert(key, FLEET_KEYS[m.group(2)], raw)
        elif key in GLOBAL_KEYS:
            values[key] = _convert(key, GLOBAL_KEYS[key], raw)
        else:
            raise ScenarioError(f"line {n}: unknown key {key}")

    defaults = default_values()
    n_fleets = values.get("sim.fleets", defaults["sim.fleets"])
    for key in values:
        m = _FLEET_RE.match(key)
        if m and int(m.group(1)) > n_fleets:
            raise ScenarioError(f"{key} refers to fleet {m.group(1)} but sim.fleets = {n_fleets}")

    defaulted = [] if "sim.fleets" in values else ["sim.fleets"]

    def get(key):
        if key in values:
            return values[key]
        if key not in defaults:
            raise ScenarioError(f"{key} has no default and must be given")
        defaulted.append(key)
        return defaults[key]

    try:
        cfg = _build(get, n_fleets)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    if defaulted:
        log.info("scenario defaults used for %d keys: %s", len(defaulted), ", ".join(defaulted))
    return cfg, defaulted


def _build(get, n_fleets: int) -> ScenarioConfig:
    planes = get("shell.planes")
    phasing = get("shell.phasing")
    if phasing > planes - 1:
        raise ScenarioError(f"shell.phasing = {phasing} is out of range; allowed [0, {planes - 1}]")
    shell = ShellConfig(planes, get("shell.sats_per_plane"), get("shell.altitude_km"),
                        get("shell.inclination_deg"), phasing, get("shell.phase_deg"))
    fleets = []
    for i in range(1, n_fleets + 1):
        s, e = get(f"fleet.{i}.start"), get(f"fleet.{i}.end")
        alt = get(f"fleet.{i}.alt_km")
        fleets.append(FleetTrack(GeodeticPos(s[0], s[1], alt), GeodeticPos(e[0], e[1], alt),
                                 get(f"fleet.{i}.speed_kms"), get(f"fleet.{i}.k"),
                                 get(f"fleet.{i}.formation_km")))
    lo, hi = get("minpower.lo_w"), get("minpower.hi_w")
    if lo >= hi:
        raise ScenarioError(f"minpower.lo_w = {lo} must be below minpower.hi_w = {hi}")
    return ScenarioConfig(
        shell=shell,
        fleets=tuple(fleets),
        array=ArrayGeometry(get("array.rows"), get("array.cols"), get("array.spacing")),
        pattern=BeamPattern(get("pattern.peak_dbi"), get("pattern.hbw_deg"), get("pattern.sll_db")),
        link=LinkParams(get("link.freq_ghz"), get("link.noise_w"), get("link.rician_db"),
                        get("link.tx_gain_dbi"), get("link.los_phase")),
        policy=Policy(get("policy.variant"), get("policy.frame_slots"), get("policy.receiver"),
                      get("policy.sats"), get("policy.transmitter")),
        horizon_slots=get("sim.slots"),
        slot_duration_s=get("sim.slot_s"),
        min_elev_deg=get("sim.min_elev_deg"),
        master_seed=get("sim.seed"),
        power_w=get("sim.power_w"),
        joint_visibility=get("sim.joint_visibility"),
        rate_metric=get("sim.rate_metric"),
        service_frame_slots=get("service.frame_slots"),
        service_start_slot=get("service.start_slot"),
        min_power_lo_w=lo,
        min_power_hi_w=hi,
        min_power_stride=get("minpower.stride"),
    )


def config_values(cfg: ScenarioConfig) -> dict[str, Any]:
    """Flat key -> value view of a config, in canonical key order."""
    sh, ar, pa, li, po = cfg.shell, cfg.array, cfg.pattern, cfg.link, cfg.policy
    out: dict[str, Any] = {
        "shell.planes": sh.planes,
        "shell.sats_per_plane": sh.sats_per_plane,
        "shell.altitude_km": sh.altitude,
        "shell.inclination_deg": sh.inclination,
        "shell.phasing": sh.phasing_factor,
        "shell.phase_deg": sh.initial_phase,
        "array.rows": ar.rows,
        "array.cols": ar.cols,
        "array.spacing": ar.element_spacing,
        "pattern.peak_dbi": pa.peak_gain,
        "pattern.hbw_deg": pa.half_beamwidth,
        "pattern.sll_db": pa.sidelobe_suppression,
        "link.freq_ghz": li.carrier_freq,
        "link.noise_w": li.noise_power,
        "link.rician_db": li.rician_k,
        "link.tx_gain_dbi": li.tx_gain,
        "link.los_phase": li.los_phase,
        "policy.variant": po.variant,
        "policy.frame_slots": po.frame_slots,
        "policy.receiver": po.receiver,
        "policy.sats": po.sats,
        "policy.transmitter": po.transmitter,
        "sim.fleets": len(cfg.fleets),
        "sim.slots": cfg.horizon_slots,
        "sim.slot_s": cfg.slot_duration_s,
        "sim.min_elev_deg": cfg.min_elev_deg,
        "sim.seed": cfg.master_seed,
        "sim.power_w": cfg.power_w,
        "sim.joint_visibility": cfg.joint_visibility,
        "sim.rate_metric": cfg.rate_metric,
        "service.frame_slots": cfg.service_frame_slots,
        "service.start_slot": cfg.service_start_slot,
        "minpower.lo_w": cfg.min_power_lo_w,
        "minpower.hi_w": cfg.min_power_hi_w,
        "minpower.stride": cfg.min_power_stride,
    }
    for i, tr in enumerate(cfg.fleets, 1):
        out[f"fleet.{i}.start"] = (tr.start.lat, tr.start.lon)
        out[f"fleet.{i}.end"] = (tr.end.lat, tr.end.lon)
        out[f"fleet.{i}.speed_kms"] = tr.speed
        out[f"fleet.{i}.k"] = tr.lav_count
        out[f"fleet.{i}.alt_km"] = tr.start.alt
        out[f"fleet.{i}.formation_km"] = tr.formation_radius
    return out


def default_values() -> dict[str, Any]:
    return config_values(ScenarioConfig(fleets=default_fleets()))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_scenario(cfg: ScenarioConfig) -> str:
    """Normalized scenario text listing every key."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in config_values(cfg).items())


def parse_scenario(path: str | Path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario_text(text)[0]
