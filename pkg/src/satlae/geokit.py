"""Spherical-Earth geometry, frame handling, and LAV fleet kinematics.

Everything here works on a spherical Earth of radius ``R_EARTH_KM``.
Distances are in km, angles in degrees unless a name says ``_rad``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

R_EARTH_KM = 6371.0
OMEGA_EARTH = 7.2921159e-5  # rad/s


class Frame(str, Enum):
    EARTH_FIXED = "EarthFixed"
    INERTIAL = "Inertial"


class FrameMismatchError(ValueError):
    """Raised when vectors tagged with different frames are combined."""


@dataclass(frozen=True)
class Instant:
    """Seconds since the scenario epoch."""

    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"Instant must be >= 0, got {self.t}")

    @classmethod
    def from_slot(cls, slot: int, slot_duration: float) -> "Instant":
        if slot_duration <= 0:
            raise ValueError("slot_duration must be > 0")
        return cls(slot * slot_duration)


@dataclass(frozen=True)
class GeodeticPos:
    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat out of range [-90, 90]: {self.lat}")
        if not -180.0 < self.lon <= 180.0:
            raise ValueError(f"lon out of range (-180, 180]: {self.lon}")
        if self.alt < 0:
            raise ValueError(f"alt must be >= 0 km: {self.alt}")


@dataclass(frozen=True, eq=False)
class CartesianVec:
    """A 3-vector in km carrying its reference frame."""

    xyz: np.ndarray
    frame: Frame = Frame.EARTH_FIXED

    def __post_init__(self):
        arr = np.asarray(self.xyz, dtype=float).reshape(3)
        object.__setattr__(self, "xyz", arr)

    def _check(self, other: "CartesianVec"):
        if self.frame is not other.frame:
            raise FrameMismatchError(f"cannot combine {self.frame.value} with {other.frame.value}")

    def __sub__(self, other: "CartesianVec") -> "CartesianVec":
        self._check(other)
        return CartesianVec(self.xyz - other.xyz, self.frame)

    def __add__(self, other: "CartesianVec") -> "CartesianVec":
        self._check(other)
        return CartesianVec(self.xyz + other.xyz, self.frame)

    def __eq__(self, other):
        if not isinstance(other, CartesianVec):
            return NotImplemented
        return self.frame is other.frame and bool(np.array_equal(self.xyz, other.xyz))

    def norm(self) -> float:
        return float(np.linalg.norm(self.xyz))

    def __repr__(self):
        x, y, z = self.xyz
        return f"CartesianVec({x:.6f}, {y:.6f}, {z:.6f}, {self.frame.value})"


@dataclass(frozen=True)
class FleetTrack:
    start: GeodeticPos
    end: GeodeticPos
    speed: float
    lav_count: int = 4
    formation_radius: float = 0.1

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        if self.lav_count < 1:
            raise ValueError("lav_count must be >= 1")
        if self.formation_radius < 0:
            raise ValueError("formation_radius must be >= 0")


def _as_xyz(v) -> np.ndarray:
    return v.xyz if isinstance(v, CartesianVec) else np.asarray(v, dtype=float)


def geodetic_to_xyz(lat, lon, alt):
    """Vectorized geodetic -> Earth-fixed Cartesian; returns array (..., 3)."""
    lat = np.radians(lat)
    lon = np.radians(lon)
    r = R_EARTH_KM + np.asarray(alt, dtype=float)
    cl = np.cos(lat)
    return np.stack([r * cl * np.cos(lon), r * cl * np.sin(lon), r * np.sin(lat)], axis=-1)


def geodetic_to_cartesian(p: GeodeticPos) -> CartesianVec:
    return CartesianVec(geodetic_to_xyz(p.lat, p.lon, p.alt), Frame.EARTH_FIXED)


def cartesian_to_geodetic(v: CartesianVec) -> GeodeticPos:
    if v.frame is not Frame.EARTH_FIXED:
        raise FrameMismatchError("geodetic conversion needs an EarthFixed vector")
    x, y, z = v.xyz
    r = math.sqrt(x * x + y * y + z * z)
    lat = math.degrees(math.atan2(z, math.hypot(x, y)))
    lon = math.degrees(math.atan2(y, x))
    if lon <= -180.0:
        lon += 360.0
    return GeodeticPos(lat, lon, max(r - R_EARTH_KM, 0.0))


def rotation_z(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def inertial_to_earth_fixed(v: CartesianVec, t: Instant | float) -> CartesianVec:
    """Rotate an inertial vector into the Earth-fixed frame at time ``t``."""
    if v.frame is not Frame.INERTIAL:
        raise FrameMismatchError("inertial_to_earth_fixed expects an Inertial vector")
    seconds = t.t if isinstance(t, Instant) else float(t)
    return CartesianVec(rotation_z(-OMEGA_EARTH * seconds) @ v.xyz, Frame.EARTH_FIXED)


def elevation_deg(ground, sat) -> float:
    """Elevation of ``sat`` above the local horizontal plane at ``ground``."""
    if isinstance(ground, CartesianVec) and isinstance(sat, CartesianVec):
        ground._check(sat)
    g, s = _as_xyz(ground), _as_xyz(sat)
    gn = np.linalg.norm(g)
    if gn == 0:
        raise ValueError("ground vector has zero norm")
    ray = s - g
    rn = np.linalg.norm(ray)
    if rn == 0:
        raise ValueError("satellite coincides with ground point")
    sin_el = float(np.dot(ray, g) / (rn * gn))
    return math.degrees(math.asin(min(1.0, max(-1.0, sin_el))))


def elevations_deg(ground_xyz: np.ndarray, sats_xyz: np.ndarray) -> np.ndarray:
    """Elevation from one ground point to many satellites (rows of ``sats_xyz``)."""
    ray = sats_xyz - ground_xyz
    up = ground_xyz / np.linalg.norm(ground_xyz)
    sin_el = (ray @ up) / np.linalg.norm(ray, axis=-1)
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


def slant_range_km(a, b) -> float:
    if isinstance(a, CartesianVec) and isinstance(b, CartesianVec):
        a._check(b)
    return float(np.linalg.norm(_as_xyz(a) - _as_xyz(b)))


def great_circle_km(p: GeodeticPos, q: GeodeticPos) -> float:
    """Haversine distance on the mean sphere (altitude ignored)."""
    p1, p2 = math.radians(p.lat), math.radians(q.lat)
    dphi = p2 - p1
    dlmb = math.radians(q.lon - p.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlmb / 2) ** 2
    return 2 * R_EARTH_KM * math.asin(min(1.0, math.sqrt(h)))


def local_east_north(lat: float, lon: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit east and north vectors (Earth-fixed) at a geodetic point."""
    la, lo = math.radians(lat), math.radians(lon)
    east = np.array([-math.sin(lo), math.cos(lo), 0.0])
    north = np.array([-math.sin(la) * math.cos(lo), -math.sin(la) * math.sin(lo), math.cos(la)])
    return east, north


def _track_rate(track: FleetTrack) -> tuple[float, float, float]:
    """Ground speed mapped to (dlat/ds, dlon/ds) per km of travel along the segment."""
    dlat = track.end.lat - track.start.lat
    dlon = track.end.lon - track.start.lon
    mid_lat = math.radians(0.5 * (track.start.lat + track.end.lat))
    km_per_deg = math.pi * R_EARTH_KM / 180.0
    length = math.hypot(dlat * km_per_deg, dlon * km_per_deg * math.cos(mid_lat))
    return dlat, dlon, length


def fleet_centroid(track: FleetTrack, t: Instant | float) -> GeodeticPos:
    """Centroid (= leader) position of a fleet at time ``t``.

    The centroid moves linearly in (lat, lon) from ``start`` toward ``end``
    at ``track.speed`` km/s of ground distance and parks at ``end`` once it
    arrives.
    """
    seconds = t.t if isinstance(t, Instant) else float(t)
    dlat, dlon, length = _track_rate(track)
    if length == 0 or track.speed == 0:
        frac = 0.0
    else:
        frac = min(1.0, track.speed * seconds / length)
    return GeodeticPos(track.start.lat + frac * dlat, track.start.lon + frac * dlon, track.start.alt)


def formation_offsets(k: int, radius: float) -> np.ndarray:
    """(east, north) km offsets: leader at origin, followers on a circle."""
    offsets = np.zeros((k, 2))
    if k > 1:
        ang = 2 * np.pi * np.arange(k - 1) / (k - 1)
        offsets[1:, 0] = radius * np.cos(ang)
        offsets[1:, 1] = radius * np.sin(ang)
    return offsets


def lav_positions(track: FleetTrack, t: Instant | float) -> list[GeodeticPos]:
    """Positions of the K LAVs of a fleet; index 0 is the leader at the centroid."""
    c = fleet_centroid(track, t)
    offsets = formation_offsets(track.lav_count, track.formation_radius)
    r = R_EARTH_KM + c.alt
    out = []
    for de, dn in offsets:
        lat = c.lat + math.degrees(dn / r)
        lon = c.lon + math.degrees(de / (r * math.cos(math.radians(c.lat))))
        out.append(GeodeticPos(lat, lon, c.alt))
    return out


def lav_xyz(track: FleetTrack, t: Instant | float) -> np.ndarray:
    """Earth-fixed positions of a fleet's LAVs as a (K, 3) array."""
    ps = lav_positions(track, t)
    return geodetic_to_xyz([p.lat for p in ps], [p.lon for p in ps], [p.alt for p in ps])
