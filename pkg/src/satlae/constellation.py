"""Walker-delta shell generation and circular two-body propagation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geokit import OMEGA_EARTH, R_EARTH_KM, CartesianVec, Frame, Instant, elevations_deg

MU_EARTH = 398600.4418  # km^3/s^2


@dataclass(frozen=True)
class ShellConfig:
    planes: int = 22
    sats_per_plane: int = 72
    altitude: float = 550.0
    inclination: float = 53.0
    phasing_factor: int = 1
    initial_phase: float = 0.0  # deg, added to every argument of latitude

    def __post_init__(self):
        if self.planes < 1 or self.sats_per_plane < 1:
            raise ValueError("planes and sats_per_plane must be positive")
        if self.altitude <= 0:
            raise ValueError("altitude must be > 0 km")
        if not 0 <= self.inclination <= 180:
            raise ValueError("inclination must lie in [0, 180] deg")
        if not 0 <= self.phasing_factor <= max(self.planes - 1, 0):
            raise ValueError("phasing_factor must lie in [0, planes-1]")

    @property
    def semi_major_axis(self) -> float:
        return R_EARTH_KM + self.altitude

    @property
    def size(self) -> int:
        return self.planes * self.sats_per_plane

    @property
    def period_s(self) -> float:
        return 2 * math.pi * math.sqrt(self.semi_major_axis**3 / MU_EARTH)


@dataclass(frozen=True, order=True)
class SatelliteId:
    plane: int
    slot: int

    def __str__(self):
        return f"P{self.plane:02d}S{self.slot:02d}"


@dataclass(frozen=True)
class OrbitalElements:
    id: SatelliteId
    raan_deg: float
    anomaly_deg: float  # argument of latitude at t = 0
    inclination_deg: float
    semi_major_axis: float


@dataclass(frozen=True, eq=False)
class SatelliteState:
    id: SatelliteId
    position: CartesianVec
    velocity: np.ndarray
    boresight: np.ndarray

    def with_boresight(self, boresight) -> "SatelliteState":
        b = np.asarray(boresight, dtype=float)
        return SatelliteState(self.id, self.position, self.velocity, b / np.linalg.norm(b))


def build_shell(cfg: ShellConfig) -> list[OrbitalElements]:
    """Walker-delta elements, plane-major order."""
    P, S, F = cfg.planes, cfg.sats_per_plane, cfg.phasing_factor
    out = []
    for p in range(P):
        for s in range(S):
            anomaly = (360.0 * s / S + 360.0 * F * p / (P * S) + cfg.initial_phase) % 360.0
            out.append(OrbitalElements(SatelliteId(p, s), 360.0 * p / P, anomaly,
                                       cfg.inclination, cfg.semi_major_axis))
    return out


def _inertial_pv(raan, inc, u, a):
    """Vectorized inertial position/velocity for circular orbits (radians)."""
    v = math.sqrt(MU_EARTH / a) if np.isscalar(a) else np.sqrt(MU_EARTH / a)
    cO, sO = np.cos(raan), np.sin(raan)
    ci, si = np.cos(inc), np.sin(inc)
    cu, su = np.cos(u), np.sin(u)
    pos = np.stack([cO * cu - sO * su * ci, sO * cu + cO * su * ci, su * si], axis=-1)
    # d(pos)/du, unit length for a circular orbit
    tan = np.stack([-cO * su - sO * cu * ci, -sO * su + cO * cu * ci, cu * si], axis=-1)
    a = np.asarray(a)[..., None] if not np.isscalar(a) else a
    v = np.asarray(v)[..., None] if not np.isscalar(v) else v
    return a * pos, v * tan


def propagate_inertial(el: OrbitalElements, t: float) -> tuple[np.ndarray, np.ndarray]:
    n = math.sqrt(MU_EARTH / el.semi_major_axis**3)
    u = math.radians(el.anomaly_deg) + n * t
    return _inertial_pv(math.radians(el.raan_deg), math.radians(el.inclination_deg), u,
                        el.semi_major_axis)


def propagate(el: OrbitalElements, t: Instant | float) -> SatelliteState:
    """Earth-fixed state of one satellite at ``t``; boresight starts at nadir.

    Velocity is the inertial velocity expressed in Earth-fixed axes (no
    Earth-rotation correction), so its magnitude is the circular speed.
    """
    seconds = t.t if isinstance(t, Instant) else float(t)
    if seconds < 0:
        raise ValueError("t must be >= 0")
    r_i, v_i = propagate_inertial(el, seconds)
    rot = _earth_rotation(seconds)
    r = rot @ r_i
    return SatelliteState(el.id, CartesianVec(r, Frame.EARTH_FIXED), rot @ v_i, -r / np.linalg.norm(r))


def _earth_rotation(seconds: float) -> np.ndarray:
    th = -OMEGA_EARTH * seconds
    c, s = math.cos(th), math.sin(th)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class Constellation:
    """A propagated shell, held as arrays for fast per-slot queries."""

    def __init__(self, cfg: ShellConfig):
        self.cfg = cfg
        self.elements = build_shell(cfg)
        self.ids = [e.id for e in self.elements]
        self._raan = np.radians([e.raan_deg for e in self.elements])
        self._u0 = np.radians([e.anomaly_deg for e in self.elements])
        self._inc = math.radians(cfg.inclination)
        self._a = cfg.semi_major_axis
        self._n = math.sqrt(MU_EARTH / self._a**3)

    def __len__(self):
        return len(self.elements)

    def index_of(self, sid: SatelliteId) -> int:
        return sid.plane * self.cfg.sats_per_plane + sid.slot

    def positions(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Earth-fixed (positions, velocities), each shaped (P*S, 3)."""
        r_i, v_i = _inertial_pv(self._raan, self._inc, self._u0 + self._n * t, self._a)
        rot = _earth_rotation(t)
        return r_i @ rot.T, v_i @ rot.T

    def state(self, idx: int, t: float) -> SatelliteState:
        return propagate(self.elements[idx], t)

    def states(self, t: float) -> list[SatelliteState]:
        pos, vel = self.positions(t)
        nadir = -pos / np.linalg.norm(pos, axis=1, keepdims=True)
        return [SatelliteState(sid, CartesianVec(p, Frame.EARTH_FIXED), v, b)
                for sid, p, v, b in zip(self.ids, pos, vel, nadir)]


def visible_sats(ground, states, min_elev: float) -> set[SatelliteId]:
    """Ids of satellites at elevation >= ``min_elev`` from ``ground``."""
    g = ground.xyz if isinstance(ground, CartesianVec) else np.asarray(ground, dtype=float)
    if not states:
        return set()
    pos = np.array([s.position.xyz for s in states])
    el = elevations_deg(g, pos)
    return {s.id for s, e in zip(states, el) if e >= min_elev}


def visible_mask(ground_xyz: np.ndarray, sat_xyz: np.ndarray, min_elev: float) -> np.ndarray:
    return elevations_deg(ground_xyz, sat_xyz) >= min_elev
