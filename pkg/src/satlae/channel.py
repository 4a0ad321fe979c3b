"""Link budget, Rician block fading, and stacked per-fleet channel matrices."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import ArrayGeometry, BeamPattern, element_gain_db, local_frame, off_boresight_deg, steering_vector
from .constellation import SatelliteId, SatelliteState

C_KM_GHZ = 299_792.458e-9  # speed of light, km * GHz
BOLTZMANN = 1.380649e-23
KAPPA_MIN, KAPPA_MAX = 1e-12, 1e12


def thermal_noise_w(temperature_k: float = 290.0, bandwidth_hz: float = 10e6) -> float:
    return BOLTZMANN * temperature_k * bandwidth_hz


@dataclass(frozen=True)
class LinkParams:
    carrier_freq: float = 20.0  # GHz
    noise_power: float = 4.0e-14  # W
    rician_k: float = 10.0  # dB
    tx_gain: float = 0.0  # dBi
    los_phase: str = "propagation"  # "propagation" | "none"

    def __post_init__(self):
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be > 0 GHz")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be > 0 W")
        if self.los_phase not in ("propagation", "none"):
            raise ValueError("los_phase must be 'propagation' or 'none'")

    @property
    def wavelength_km(self) -> float:
        return C_KM_GHZ / self.carrier_freq


@dataclass(frozen=True)
class RngStream:
    """Label-addressed random stream.

    Streams are derived with ``SeedSequence(master_seed, spawn_key=labels)`` so
    each (slot, satellite, fleet, lav) draw is independent of evaluation order.
    """

    master_seed: int
    labels: tuple[int, ...] = ()

    def child(self, *labels: int) -> "RngStream":
        return RngStream(self.master_seed, self.labels + tuple(int(x) for x in labels))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed & (2**64 - 1), spawn_key=self.labels)
        return np.random.default_rng(seq)


def fspl_db(d_km, f_ghz):
    """Free-space path loss 20*log10(4*pi*d*f/c)."""
    d = np.asarray(d_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0 km")
    if f_ghz <= 0:
        raise ValueError("frequency must be > 0 GHz")
    out = 20 * np.log10(4 * np.pi * d * f_ghz / C_KM_GHZ)
    return float(out) if out.ndim == 0 else out


def _kappa(k_db: float) -> float:
    if k_db == math.inf:
        return KAPPA_MAX
    if k_db == -math.inf:
        return KAPPA_MIN
    return min(max(10 ** (k_db / 10), KAPPA_MIN), KAPPA_MAX)


def complex_gaussian(gen: np.random.Generator, n: int) -> np.ndarray:
    """Unit-variance circularly-symmetric complex normal samples."""
    z = gen.standard_normal((n, 2))
    return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2)


def rician_fading(rng: RngStream | np.random.Generator, k_db: float, los: np.ndarray) -> np.ndarray:
    """LOS plus unit-variance scatter, mixed by the K-factor."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    los = np.asarray(los, dtype=complex)
    kappa = _kappa(k_db)
    w = complex_gaussian(gen, los.size).reshape(los.shape)
    return math.sqrt(kappa / (kappa + 1)) * los + math.sqrt(1 / (kappa + 1)) * w


@dataclass(frozen=True)
class ChannelBlock:
    sat: SatelliteId
    fleet: int
    coefficients: np.ndarray  # (Ns, K)


@dataclass(frozen=True, eq=False)
class StackedChannel:
    fleet: int
    sats: tuple[SatelliteId, ...]
    H: np.ndarray  # (M*Ns, K)
    blocks: tuple[ChannelBlock, ...] = field(default=(), repr=False)

    @property
    def shape(self):
        return self.H.shape


def large_scale_gain(sat: SatelliteState, lav_xyz: np.ndarray, pattern: BeamPattern,
                     link: LinkParams) -> np.ndarray:
    """Linear gain (tx gain x element gain / FSPL) from each LAV to one satellite."""
    sat_xyz = sat.position.xyz
    lav_xyz = np.atleast_2d(lav_xyz)
    rays = sat_xyz - lav_xyz
    d = np.linalg.norm(rays, axis=1)
    psi = np.atleast_1d(off_boresight_deg(sat_xyz, sat.boresight, lav_xyz))
    g_db = np.atleast_1d(element_gain_db(psi, pattern))
    below = np.einsum("ij,ij->i", rays, lav_xyz) < 0  # satellite under the LAV's horizon
    g_db = np.where(below, pattern.peak_gain - pattern.sidelobe_suppression, g_db)
    return 10 ** ((link.tx_gain + g_db - fspl_db(d, link.carrier_freq)) / 10)


def propagation_phase(d_km: np.ndarray, link: LinkParams) -> np.ndarray:
    """exp(-j*2*pi*d/lambda); the fractional cycle count keeps the argument small."""
    cycles = np.asarray(d_km, dtype=float) / link.wavelength_km
    return np.exp(-2j * np.pi * (cycles - np.floor(cycles)))


def assemble_channel(fleet: int, serving: list[SatelliteState], lav_xyz: np.ndarray,
                     geom: ArrayGeometry, pattern: BeamPattern, link: LinkParams,
                     rng: RngStream, slot: int) -> StackedChannel:
    """Stack the Ns x K blocks of every serving satellite for one fleet.

    Column u of a block is the channel from transmit antenna ``lav_xyz[u]``
    (a LAV, or one element of a co-located LAV array). ``rng`` is the
    run-level stream; per-link streams are its children labelled
    (slot, plane, sat slot, fleet, lav).
    """
    if not serving:
        raise ValueError("empty serving set")
    lav_xyz = np.atleast_2d(np.asarray(lav_xyz, dtype=float))
    K = lav_xyz.shape[0]
    blocks = []
    for sat in serving:
        g = large_scale_gain(sat, lav_xyz, pattern, link)
        frame = local_frame(sat.boresight, sat.velocity)
        rays = lav_xyz - sat.position.xyz
        dist = np.linalg.norm(rays, axis=1)
        los = steering_vector(geom, (rays / dist[:, None]) @ frame.T)  # (K, Ns)
        if link.los_phase == "propagation":
            los = los * propagation_phase(dist, link)[:, None]
        cols = []
        for u in range(K):
            stream = rng.child(slot, sat.id.plane, sat.id.slot, fleet, u)
            cols.append(math.sqrt(g[u]) * rician_fading(stream, link.rician_k, los[u]))
        blocks.append(ChannelBlock(sat.id, fleet, np.stack(cols, axis=1)))
    H = np.vstack([b.coefficients for b in blocks])
    return StackedChannel(fleet, tuple(s.id for s in serving), H, tuple(blocks))


def write_channel_dump(path, records) -> None:
    """Debug dump; ``records`` yields (slot, StackedChannel) pairs."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slot", "fleet", "sat", "lav", "element", "re", "im"])
        for slot, ch in records:
            for blk in ch.blocks:
                ns, k = blk.coefficients.shape
                for u in range(k):
                    for e in range(ns):
                        z = blk.coefficients[e, u]
                        w.writerow([slot, ch.fleet, str(blk.sat), u, e, f"{z.real:.9g}", f"{z.imag:.9g}"])
