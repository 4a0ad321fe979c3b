"""Scenario orchestration: slot loop, policies, and the case-study experiments."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import control
from .antenna import ArrayGeometry
from .channel import RngStream, StackedChannel, assemble_channel, large_scale_gain
from .config import Policy, ScenarioConfig
from .constellation import Constellation, SatelliteState
from .control import InsufficientVisibilityError, ServiceMetrics
from .geokit import (CartesianVec, Frame, GeodeticPos, fleet_centroid, geodetic_to_xyz,
                     local_east_north, lav_positions, lav_xyz)
from .mimo import UnreachableTargetError, min_power_for_rate, slot_rates

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlotMetrics:
    slot: int
    serving: tuple[str, ...]
    sinr: tuple[float, ...]
    rate: tuple[float, ...]
    sum_rate: float
    beam_center: GeodeticPos
    handover: bool


@dataclass
class ExperimentResult:
    kind: str
    columns: tuple[str, ...]
    rows: list[tuple]
    fingerprint: str
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Snapshot:
    """World state at one slot."""

    slot: int
    t: float
    sat_xyz: np.ndarray
    sat_vel: np.ndarray
    lavs: tuple[np.ndarray, ...]  # per fleet, (K, 3)
    centroids: tuple[np.ndarray, ...]  # per fleet leader/centroid xyz
    visible: np.ndarray  # joint (or any-fleet) visibility mask


class Simulator:
    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.constellation = Constellation(cfg.shell)
        self.rng = RngStream(cfg.master_seed)

    # -- geometry -----------------------------------------------------------

    def snapshot(self, slot: int) -> Snapshot:
        cfg = self.cfg
        t = slot * cfg.slot_duration_s
        pos, vel = self.constellation.positions(t)
        lavs, cents = [], []
        for tr in cfg.fleets:
            lavs.append(lav_xyz(tr, t))
            c = fleet_centroid(tr, t)
            cents.append(geodetic_to_xyz(c.lat, c.lon, c.alt))
        masks = [_visible(c, pos, cfg.min_elev_deg) for c in cents]
        vis = np.logical_and.reduce(masks) if cfg.joint_visibility else np.logical_or.reduce(masks)
        return Snapshot(slot, t, pos, vel, tuple(lavs), tuple(cents), vis)

    def centroid_at(self, slot: int) -> GeodeticPos:
        t = slot * self.cfg.slot_duration_s
        pts = [p for tr in self.cfg.fleets for p in lav_positions(tr, t)]
        return control.beam_center(pts)

    # -- per-slot decisions --------------------------------------------------

    def boresights(self, snap: Snapshot, idx: Sequence[int], sched: control.FrameSchedule) -> np.ndarray:
        xyz = snap.sat_xyz[list(idx)]
        if sched.earth_center:
            return control.nadir_beams(xyz)
        return control.point_beams(xyz, sched.beam_center)

    def select(self, policy: Policy, snap: Snapshot, sched: control.FrameSchedule) -> tuple[int, ...]:
        """Serving entity for the policy's receiver architecture."""
        center = sched.beam_center if not sched.earth_center else self.centroid_at(snap.slot)
        cxyz = geodetic_to_xyz(center.lat, center.lon, center.alt)
        if policy.receiver == "colocated-sat":
            cand = np.flatnonzero(snap.visible)
            if cand.size == 0:
                raise InsufficientVisibilityError("no visible satellite", snap.slot)
            bs = self.boresights(snap, cand, sched)
            all_lavs = np.vstack(snap.lavs)
            gains = np.array([
                large_scale_gain(self._state(snap, i, b), all_lavs, self.cfg.pattern, self.cfg.link).sum()
                for i, b in zip(cand, bs)
            ])
            return (control.best_channel_satellite(gains, cand),)
        m = 1 if policy.receiver == "single-sat" else policy.sats
        return control.select_serving_set(snap.sat_xyz, cxyz, m, snap.visible, snap.slot).sats

    def _state(self, snap: Snapshot, i: int, boresight: np.ndarray) -> SatelliteState:
        return SatelliteState(self.constellation.ids[i], CartesianVec(snap.sat_xyz[i], Frame.EARTH_FIXED),
                              snap.sat_vel[i], boresight)

    def rx_geometry(self, policy: Policy) -> ArrayGeometry:
        if policy.receiver == "colocated-sat":
            return self.cfg.array.widened(policy.sats)
        return self.cfg.array

    def channels(self, policy: Policy, snap: Snapshot, idx: Sequence[int],
                 sched: control.FrameSchedule) -> list[StackedChannel]:
        """One stacked channel per fleet for the given serving satellites."""
        idx = list(idx)
        bs = self.boresights(snap, idx, sched)
        states = [self._state(snap, i, b) for i, b in zip(idx, bs)]
        geom = self.rx_geometry(policy)
        out = []
        for f, (tr, lx) in enumerate(zip(self.cfg.fleets, snap.lavs)):
            if policy.transmitter == "single-lav":
                lx = lx[:1]
            elif policy.transmitter == "colocated-lav":
                lx = colocated_array(lx[0], tr.lav_count, self.cfg.link.wavelength_km)
            out.append(assemble_channel(f, states, lx, geom, self.cfg.pattern, self.cfg.link,
                                        self.rng, snap.slot))
        return out

    def slot_channels(self, policy: Policy, slot: int, snap: Snapshot | None = None):
        snap = snap if snap is not None else self.snapshot(slot)
        sched = control.schedule(policy, slot, self.centroid_at)
        idx = self.select(policy, snap, sched)
        return idx, sched, self.channels(policy, snap, idx, sched)

    def entity_rates(self, policy: Policy, slot: int, entity: tuple[int, ...],
                     sched: control.FrameSchedule, power: float) -> tuple[float, ...]:
        """Per-fleet rates of a held serving entity; members below the gate drop out."""
        snap = self.snapshot(slot)
        alive = [i for i in entity if snap.visible[i]]
        if not alive:
            return tuple(0.0 for _ in self.cfg.fleets)
        chans = self.channels(policy, snap, alive, sched)
        return slot_rates(chans, [power] * len(chans), self.cfg.link.noise_power).rate


def _visible(ground_xyz, sat_xyz, min_elev):
    from .constellation import visible_mask

    return visible_mask(ground_xyz, sat_xyz, min_elev)


def colocated_array(leader_xyz: np.ndarray, n: int, wavelength_km: float) -> np.ndarray:
    """Element positions of the leader's n-antenna half-wavelength array (east axis)."""
    x, y, z = leader_xyz
    lat = math.degrees(math.atan2(z, math.hypot(x, y)))
    lon = math.degrees(math.atan2(y, x))
    east = local_east_north(lat, lon)[0]
    return leader_xyz + np.outer(np.arange(n) * 0.5 * wavelength_km, east)


# -- slot pipeline --------------------------------------------------------------

def _eval_slots(cfg: ScenarioConfig, policies: Sequence[Policy], powers: Sequence[float],
                slots: Sequence[int]):
    """Rates for every (slot, policy, power); pure so it can run in a worker."""
    sim = Simulator(cfg)
    out = []
    for s in slots:
        snap = sim.snapshot(s)
        per_policy = []
        for pol in policies:
            idx, sched, chans = sim.slot_channels(pol, s, snap)
            ids = tuple(str(sim.constellation.ids[i]) for i in idx)
            pts = [slot_rates(chans, [p] * len(chans), cfg.link.noise_power) for p in powers]
            per_policy.append((ids, sched.beam_center, pts))
        out.append(per_policy)
    return out


def _chunks(seq: Sequence[int], n: int) -> list[list[int]]:
    size = math.ceil(len(seq) / n)
    return [list(seq[i:i + size]) for i in range(0, len(seq), size)]


def evaluate(cfg: ScenarioConfig, policies: Sequence[Policy], powers: Sequence[float],
             slots: Sequence[int] | None = None):
    """Per-slot results ``[slot][policy] -> (ids, center, [RatePoint per power])``.

    Work is split over ``cfg.workers`` processes; results are reassembled in
    slot order, so output does not depend on the worker count.
    """
    slots = list(range(cfg.horizon_slots)) if slots is None else list(slots)
    if cfg.workers <= 1 or len(slots) < 2:
        return _eval_slots(cfg, policies, powers, slots)
    parts = _chunks(slots, cfg.workers)
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        futs = [ex.submit(_eval_slots, cfg, policies, powers, p) for p in parts]
        return [row for f in futs for row in f.result()]


def run(cfg: ScenarioConfig) -> list[SlotMetrics]:
    """Slot-by-slot metrics for ``cfg.policy`` at ``cfg.power_w``."""
    res = evaluate(cfg, [cfg.policy], [cfg.power_w])
    out, prev = [], None
    for s, ((ids, center, (pt,)),) in enumerate(res):
        out.append(SlotMetrics(s, ids, pt.sinr, pt.rate, pt.sum_rate, center,
                               prev is not None and ids != prev))
        prev = ids
    return out


# -- experiments ------------------------------------------------------------------

def sweep_policies(cfg: ScenarioConfig) -> list[Policy]:
    """Receiver/beam variants compared in the power sweep."""
    base = cfg.policy
    return [
        base.with_(receiver="dist-sat"),
        base.with_(receiver="colocated-sat"),
        base.with_(receiver="single-sat"),
        base.with_(receiver="dist-sat", variant="earth-center"),
    ]


def power_sweep(cfg: ScenarioConfig, powers: Sequence[float],
                policies: Sequence[Policy] | None = None) -> ExperimentResult:
    if not powers:
        raise ValueError("powers must be non-empty")
    policies = list(policies or sweep_policies(cfg))
    res = evaluate(cfg, policies, powers)
    fp = cfg.fingerprint()
    rows = []
    for j, pol in enumerate(policies):
        for i, p in enumerate(powers):
            pts = [slot[j][2][i] for slot in res]
            rows.append((pol.label, float(p), _mean(x.sum_rate for x in pts),
                         *(_mean(x.rate[f] for x in pts) for f in range(len(cfg.fleets))), fp))
    fleet_cols = tuple(f"mean_rate_fleet{f + 1}" for f in range(len(cfg.fleets)))
    return ExperimentResult("PowerSweep", ("policy", "power_w", "mean_sum_rate", *fleet_cols, "fingerprint"),
                            rows, fp)


def _mean(xs) -> float:
    xs = list(xs)
    return float(math.fsum(xs) / len(xs))


def min_power_policies(cfg: ScenarioConfig) -> list[Policy]:
    return [cfg.policy.with_(transmitter=t) for t in ("dist-lav", "colocated-lav", "single-lav")]


def min_power_experiment(cfg: ScenarioConfig, targets: Sequence[float],
                         policies: Sequence[Policy] | None = None) -> ExperimentResult:
    """Minimum common per-fleet power meeting each target's time-averaged rate.

    Channels are drawn once on every ``min_power_stride``-th slot and reused
    for all bisection probes.
    """
    policies = list(policies or min_power_policies(cfg))
    fp = cfg.fingerprint()
    cols = ("transmitter", "policy", "target_bps_hz", "min_power_w", "reachable", "fingerprint")
    if not targets:
        return ExperimentResult("MinPower", cols, [], fp)
    slots = list(range(0, cfg.horizon_slots, cfg.min_power_stride))
    sim = Simulator(cfg)
    rows = []
    for pol in policies:
        chans = [sim.slot_channels(pol, s)[2] for s in slots]
        noise = cfg.link.noise_power

        def rate_fn(p, chans=chans):
            per = [slot_rates(c, [p] * len(c), noise).rate for c in chans]
            return [math.fsum(r[f] for r in per) / len(per) for f in range(len(cfg.fleets))]

        for tgt in targets:
            try:
                pw = min_power_for_rate(rate_fn, tgt, cfg.rate_metric,
                                        (cfg.min_power_lo_w, cfg.min_power_hi_w))
                rows.append((pol.transmitter, pol.label, float(tgt), pw, True, fp))
            except UnreachableTargetError:
                rows.append((pol.transmitter, pol.label, float(tgt), math.nan, False, fp))
    return ExperimentResult("MinPower", cols, rows, fp)


def service_policies(cfg: ScenarioConfig) -> list[Policy]:
    base = cfg.policy.with_(variant="two-timescale", frame_slots=cfg.service_frame_slots)
    return [base.with_(receiver=r) for r in ("dist-sat", "colocated-sat", "single-sat")]


def service_metrics(cfg: ScenarioConfig, policy: Policy, target: float,
                    sim: Simulator | None = None, cache: dict | None = None) -> ServiceMetrics:
    """Service duration/handovers of one receiver architecture over one frame."""
    sim = sim or Simulator(cfg)
    start = cfg.service_start_slot
    cache = {} if cache is None else cache
    sched = control.schedule(policy, start, sim.centroid_at)

    def select(t):
        snap = sim.snapshot(start + t)
        return sim.select(policy, snap, sched)

    def rates(t, entity):
        key = (policy, t, entity)
        if key not in cache:
            cache[key] = sim.entity_rates(policy, start + t, entity, sched, cfg.power_w)
        return cache[key]

    def meets(t, entity):
        r = rates(t, entity)
        val = min(r) if cfg.rate_metric == "per-fleet" else sum(r)
        return val >= target

    return control.service_run(select, meets, cfg.service_frame_slots)


def service_experiment(cfg: ScenarioConfig, targets: Sequence[float],
                       policies: Sequence[Policy] | None = None) -> ExperimentResult:
    policies = list(policies or service_policies(cfg))
    fp = cfg.fingerprint()
    sim = Simulator(cfg)
    cache: dict = {}
    rows = []
    for tgt in targets:
        for pol in policies:
            m = service_metrics(cfg, pol, tgt, sim, cache)
            rows.append((pol.receiver, pol.label, float(tgt),
                         m.service_duration, m.handover_count, m.na_flag, fp))
    cols = ("receiver", "policy", "target_bps_hz", "service_duration_slots", "handovers", "na_flag",
            "fingerprint")
    return ExperimentResult("Service", cols, rows, fp)


def timescale_policies(cfg: ScenarioConfig, frame_lengths: Sequence[int]) -> list[Policy]:
    base = cfg.policy.with_(receiver="dist-sat")
    out = [base.with_(variant="slot-level"), base.with_(variant="fixed-initial"),
           base.with_(variant="earth-center")]
    out += [base.with_(variant="two-timescale", frame_slots=int(n)) for n in frame_lengths]
    return out


def timescale_experiment(cfg: ScenarioConfig, frame_lengths: Sequence[int]) -> ExperimentResult:
    """Per-slot sum-rate traces for each beam-control scheme.

    Rows are (scheme, slot, sum_rate); ``extra`` carries per-scheme horizon
    averages and position-report counts.
    """
    policies = timescale_policies(cfg, frame_lengths)
    res = evaluate(cfg, policies, [cfg.power_w])
    fp = cfg.fingerprint()
    rows, summary = [], []
    for j, pol in enumerate(policies):
        trace = [slot[j][2][0].sum_rate for slot in res]
        name = scheme_name(pol)
        rows += [(name, s, r, fp) for s, r in enumerate(trace)]
        summary.append((name, _mean(trace), control.report_count(pol, cfg.horizon_slots), fp))
    return ExperimentResult("TimescaleCompare", ("scheme", "slot", "sum_rate", "fingerprint"), rows, fp,
                            {"summary_columns": ("scheme", "mean_sum_rate", "position_reports", "fingerprint"),
                             "summary": summary})


def scheme_name(pol: Policy) -> str:
    return f"N={pol.frame_slots}" if pol.variant == "two-timescale" else pol.variant
