"""Beam control, serving-set selection, two-timescale scheduling, handover fold."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .config import Policy
from .geokit import GeodeticPos, cartesian_to_geodetic, CartesianVec, Frame, geodetic_to_xyz


class InsufficientVisibilityError(RuntimeError):
    def __init__(self, msg: str, slot: int | None = None):
        super().__init__(msg if slot is None else f"slot {slot}: {msg}")
        self.slot = slot


@dataclass(frozen=True)
class FrameSchedule:
    frame_start: int
    beam_center: GeodeticPos
    earth_center: bool
    position_report_count: int


@dataclass(frozen=True)
class ServingSet:
    sats: tuple[int, ...]  # constellation indices, ascending slant range
    slot: int


@dataclass(frozen=True)
class ServiceMetrics:
    service_duration: int
    handover_count: int
    na_flag: bool
    serving: tuple[tuple[int, ...], ...] = ()  # entity per slot, for accounting checks


def beam_center(positions: Sequence[GeodeticPos], wrap_safe: bool = False) -> GeodeticPos:
    """Centroid of all LAV positions.

    Plain component-wise mean by default. ``wrap_safe`` averages unit vectors
    instead, which is correct across the antimeridian.
    """
    if not positions:
        raise ValueError("beam_center needs at least one LAV position")
    n = len(positions)
    alt = sum(p.alt for p in positions) / n
    if not wrap_safe:
        return GeodeticPos(sum(p.lat for p in positions) / n, sum(p.lon for p in positions) / n, alt)
    xyz = geodetic_to_xyz([p.lat for p in positions], [p.lon for p in positions], np.zeros(n)).mean(axis=0)
    g = cartesian_to_geodetic(CartesianVec(xyz, Frame.EARTH_FIXED))
    return GeodeticPos(g.lat, g.lon, alt)


def point_beams(sat_xyz: np.ndarray, center: GeodeticPos | np.ndarray) -> np.ndarray:
    """Unit boresights from each satellite (rows) toward ``center``."""
    c = center if isinstance(center, np.ndarray) else geodetic_to_xyz(center.lat, center.lon, center.alt)
    d = c - np.atleast_2d(sat_xyz)
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def nadir_beams(sat_xyz: np.ndarray) -> np.ndarray:
    p = np.atleast_2d(sat_xyz)
    return -p / np.linalg.norm(p, axis=1, keepdims=True)


def select_serving_set(sat_xyz: np.ndarray, center_xyz: np.ndarray, m: int,
                       visible: np.ndarray, slot: int = 0) -> ServingSet:
    """The ``m`` visible satellites nearest ``center_xyz``; ties go to the lower index.

    ``visible`` is a boolean mask over the constellation (already combining
    the per-fleet elevation gates).
    """
    idx = np.flatnonzero(visible)
    if idx.size < m:
        raise InsufficientVisibilityError(f"{idx.size} visible satellites, need {m}", slot)
    rng = np.linalg.norm(sat_xyz[idx] - center_xyz, axis=1)
    order = np.lexsort((idx, rng))
    return ServingSet(tuple(int(i) for i in idx[order[:m]]), slot)


def best_channel_satellite(gains: np.ndarray, candidates: np.ndarray) -> int:
    """Candidate with the largest total large-scale gain; ties go to the lower index.

    ``gains[i]`` is the summed deterministic gain over all LAVs for
    candidate ``candidates[i]``.
    """
    if len(candidates) == 0:
        raise InsufficientVisibilityError("no visible satellite")
    order = np.lexsort((np.asarray(candidates), -np.asarray(gains)))
    return int(candidates[order[0]])


def frame_start(policy: Policy, slot: int) -> int:
    if policy.variant == "two-timescale":
        return (slot // policy.frame_slots) * policy.frame_slots
    if policy.variant == "fixed-initial":
        return 0
    return slot


def report_count(policy: Policy, slots: int) -> int:
    """Position reports needed over ``slots`` slots."""
    if policy.variant == "two-timescale":
        return math.ceil(slots / policy.frame_slots)
    if policy.variant == "fixed-initial":
        return 1
    return slots


def schedule(policy: Policy, slot: int, centroid_at: Callable[[int], GeodeticPos]) -> FrameSchedule:
    """Frame-level decision in force at ``slot``.

    ``centroid_at(s)`` returns the all-LAV centroid reported at slot ``s``.
    Boresights are derived per slot by steering toward ``beam_center``
    (or nadir when ``earth_center``), since satellites move within a frame.
    """
    start = frame_start(policy, slot)
    return FrameSchedule(start, centroid_at(start), policy.variant == "earth-center",
                         report_count(policy, slot + 1))


def service_run(select: Callable[[int], Hashable], meets: Callable[[int, Hashable], bool],
                frame_slots: int = 300) -> ServiceMetrics:
    """Service duration and handovers over one frame.

    ``select(t)`` picks a serving entity at slot ``t`` (relative to the frame
    start) and ``meets(t, e)`` says whether entity ``e`` sustains the target
    at slot ``t``. The initial entity serves until its first failure; at
    every failure a fresh selection is made and a handover is counted if
    the entity identity changes.
    """
    current = select(0)
    if not meets(0, current):
        return ServiceMetrics(0, 0, True, (current,))
    duration, handovers = 1, 0
    streak = True
    history = [current]
    for t in range(1, frame_slots):
        if meets(t, current):
            if streak:
                duration += 1
        else:
            streak = False
            fresh = select(t)
            if fresh != current:
                handovers += 1
                current = fresh
        history.append(current)
    return ServiceMetrics(duration, handovers, False, tuple(history))
