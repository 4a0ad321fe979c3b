"""Scenario configuration and policy descriptors."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from .antenna import ArrayGeometry, BeamPattern
from .channel import LinkParams
from .constellation import ShellConfig
from .geokit import FleetTrack, GeodeticPos

VARIANTS = ("two-timescale", "slot-level", "fixed-initial", "earth-center")
RECEIVERS = ("dist-sat", "single-sat", "colocated-sat")
TRANSMITTERS = ("dist-lav", "single-lav", "colocated-lav")


@dataclass(frozen=True)
class Policy:
    """Beam-control variant plus receiver/transmitter architecture.

    ``frame_slots`` is only read by the two-timescale variant;
    ``sats`` is M for the distributed and co-located receivers.
    """

    variant: str = "two-timescale"
    frame_slots: int = 200
    receiver: str = "dist-sat"
    sats: int = 3
    transmitter: str = "dist-lav"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown policy variant {self.variant!r}; allowed {VARIANTS}")
        if self.receiver not in RECEIVERS:
            raise ValueError(f"unknown receiver {self.receiver!r}; allowed {RECEIVERS}")
        if self.transmitter not in TRANSMITTERS:
            raise ValueError(f"unknown transmitter {self.transmitter!r}; allowed {TRANSMITTERS}")
        if self.frame_slots < 1:
            raise ValueError("frame_slots must be >= 1")
        if self.sats < 1:
            raise ValueError("sats (M) must be >= 1")

    @property
    def label(self) -> str:
        beam = f"N={self.frame_slots}" if self.variant == "two-timescale" else self.variant
        rx = self.receiver if self.receiver == "single-sat" else f"{self.receiver}(M={self.sats})"
        return f"{rx}/{self.transmitter}/{beam}"

    def with_(self, **kw) -> "Policy":
        return replace(self, **kw)


def default_fleets(k: int = 4, formation_km: float = 0.1) -> tuple[FleetTrack, ...]:
    return (
        FleetTrack(GeodeticPos(51.48, -0.076, 1.0), GeodeticPos(50.48, -1.076, 1.0), 0.03, k, formation_km),
        FleetTrack(GeodeticPos(51.48, -1.076, 1.0), GeodeticPos(50.48, -0.076, 1.0), 0.03, k, formation_km),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    shell: ShellConfig = field(default_factory=ShellConfig)
    fleets: tuple[FleetTrack, ...] = field(default_factory=default_fleets)
    array: ArrayGeometry = field(default_factory=ArrayGeometry)
    pattern: BeamPattern = field(default_factory=BeamPattern)
    link: LinkParams = field(default_factory=LinkParams)
    policy: Policy = field(default_factory=Policy)
    horizon_slots: int = 1800
    slot_duration_s: float = 2.0
    min_elev_deg: float = 30.0
    master_seed: int = 0
    power_w: float = 20.0
    joint_visibility: bool = True
    service_frame_slots: int = 300
    service_start_slot: int = 0
    rate_metric: str = "per-fleet"
    min_power_lo_w: float = 1e-3
    min_power_hi_w: float = 1e5
    min_power_stride: int = 30
    workers: int = 1

    def __post_init__(self):
        if self.horizon_slots < 1:
            raise ValueError("horizon_slots must be >= 1")
        if self.slot_duration_s <= 0:
            raise ValueError("slot_duration_s must be > 0")
        if not self.fleets:
            raise ValueError("at least one fleet is required")
        if self.power_w < 0:
            raise ValueError("power_w must be >= 0")
        if self.rate_metric not in ("per-fleet", "sum"):
            raise ValueError("rate_metric must be 'per-fleet' or 'sum'")
        if self.service_frame_slots < 1 or self.min_power_stride < 1:
            raise ValueError("service_frame_slots and min_power_stride must be >= 1")
        if not 0 < self.min_power_lo_w < self.min_power_hi_w:
            raise ValueError("min-power bracket must satisfy 0 < lo < hi")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def with_(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)

    def fingerprint(self) -> str:
        """Short hash of everything that affects results (worker count excluded)."""
        from .scenario import dump_scenario

        text = dump_scenario(self.with_(workers=1))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
