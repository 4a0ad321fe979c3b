"""Satellite element pattern, planar-array steering vectors, beam geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def aperture_peak_gain_dbi(half_beamwidth_deg: float) -> float:
    """Peak gain from the 29000/HPBW^2 aperture rule, HPBW = 2 * half-beamwidth."""
    return 10 * math.log10(29000.0 / (2 * half_beamwidth_deg) ** 2)


@dataclass(frozen=True)
class BeamPattern:
    peak_gain: float = 37.5
    half_beamwidth: float = 1.14
    sidelobe_suppression: float = 25.0

    def __post_init__(self):
        if self.half_beamwidth <= 0:
            raise ValueError("half_beamwidth must be > 0 deg")
        if self.sidelobe_suppression <= 0:
            raise ValueError("sidelobe_suppression must be > 0 dB")


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int = 4
    cols: int = 4
    element_spacing: float = 0.5  # wavelengths

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.element_spacing <= 0:
            raise ValueError("element_spacing must be > 0")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def widened(self, factor: int) -> "ArrayGeometry":
        """Same rows, ``factor`` times the columns (co-located aperture of ``factor`` arrays)."""
        return ArrayGeometry(self.rows, self.cols * factor, self.element_spacing)


def element_gain_db(psi, pattern: BeamPattern):
    """Gain in dBi at off-boresight angle ``psi`` (deg); parabolic mainlobe, flat floor."""
    psi = np.asarray(psi, dtype=float)
    roll = np.minimum(3.0 * (psi / pattern.half_beamwidth) ** 2, pattern.sidelobe_suppression)
    out = pattern.peak_gain - roll
    return float(out) if out.ndim == 0 else out


def off_boresight_deg(sat_pos, boresight, target):
    """Angle(s) between ``boresight`` and the ray from ``sat_pos`` to ``target``.

    ``target`` may be a single point or an (n, 3) array.
    """
    s = getattr(sat_pos, "xyz", sat_pos)
    t = getattr(target, "xyz", target)
    ray = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
    n = np.linalg.norm(ray, axis=-1)
    if np.any(n == 0):
        raise ValueError("target coincides with satellite position")
    b = np.asarray(boresight, dtype=float)
    b = b / np.linalg.norm(b)
    # atan2 form stays accurate near 0 and 180 deg
    cross = np.linalg.norm(np.cross(ray, b), axis=-1)
    ang = np.degrees(np.arctan2(cross, ray @ b))
    return float(ang) if np.ndim(ang) == 0 else ang


def local_frame(boresight, velocity) -> np.ndarray:
    """Rows (x, y, z) of the satellite-local frame.

    z is the boresight, x the part of the velocity orthogonal to it.
    Falls back to any orthogonal axis if velocity is parallel to boresight.
    """
    z = np.asarray(boresight, dtype=float)
    z = z / np.linalg.norm(z)
    v = np.asarray(velocity, dtype=float)
    x = v - (v @ z) * z
    if np.linalg.norm(x) < 1e-12 * max(np.linalg.norm(v), 1.0):
        helper = np.array([1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        x = helper - (helper @ z) * z
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    return np.stack([x, y, z])


def steering_vector(geom: ArrayGeometry, direction) -> np.ndarray:
    """Planar-array response for a unit direction in the satellite-local frame.

    Element (m, n) sits at row m, column n; the phase is
    2*pi*spacing*(m*u + n*v) with (u, v) the x/y direction cosines.
    """
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d, axis=-1, keepdims=True)
    d = d / norm
    u, v = d[..., 0], d[..., 1]
    m = np.repeat(np.arange(geom.rows), geom.cols)
    n = np.tile(np.arange(geom.cols), geom.rows)
    phase = 2 * np.pi * geom.element_spacing * (np.multiply.outer(u, m) + np.multiply.outer(v, n))
    return np.exp(1j * phase)
