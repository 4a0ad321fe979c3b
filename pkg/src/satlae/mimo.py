"""MRT precoding, MMSE combining, SINR/rate evaluation and min-power search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg


class DegenerateChannelError(ValueError):
    pass


class UnreachableTargetError(ValueError):
    """The target rate is not met even at the top of the power bracket."""


@dataclass(frozen=True, eq=False)
class Precoder:
    fleet: int
    w: np.ndarray
    power_budget: float


@dataclass(frozen=True, eq=False)
class Combiner:
    fleet: int
    u: np.ndarray


@dataclass(frozen=True)
class RatePoint:
    sinr: tuple[float, ...]
    rate: tuple[float, ...]

    @property
    def sum_rate(self) -> float:
        return float(sum(self.rate))

    @classmethod
    def from_sinr(cls, sinr: Sequence[float]) -> "RatePoint":
        s = tuple(float(x) for x in sinr)
        return cls(s, tuple(math.log2(1.0 + x) for x in s))


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    return v * np.exp(-1j * np.angle(v[nz[0]]))


def _as_matrix(H) -> np.ndarray:
    return np.asarray(getattr(H, "H", H), dtype=complex)


def mrt_precoder(H, power: float, fleet: int = 0) -> Precoder:
    """Dominant right singular vector of ``H`` scaled to ``power``.

    The first nonzero entry is made real-positive so the result is unique.
    """
    M = _as_matrix(H)
    if power < 0:
        raise ValueError("power must be >= 0")
    if not np.any(M):
        raise DegenerateChannelError("degenerate channel")
    _, _, vh = np.linalg.svd(M, full_matrices=False)
    v1 = _normalize_phase(vh[0].conj())
    v1 = v1 / np.linalg.norm(v1)
    return Precoder(fleet, math.sqrt(power) * v1, power)


def _interference_noise(h_list: Sequence[np.ndarray], k: int, noise: float) -> np.ndarray:
    n = h_list[k].shape[0]
    R = noise * np.eye(n, dtype=complex)
    for j, h in enumerate(h_list):
        if j != k:
            R += np.outer(h, h.conj())
    return R


def _solve_hpd(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        cf = scipy.linalg.cho_factor(R, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        load = 1e-15 * np.trace(R).real / R.shape[0]
        cf = scipy.linalg.cho_factor(R + load * np.eye(R.shape[0]), lower=True, check_finite=False)
    return scipy.linalg.cho_solve(cf, b, check_finite=False)


def effective_vectors(targets) -> list[np.ndarray]:
    """h_j = H_j w_j for a list of (H_j, w_j) pairs."""
    hs = []
    for H, w in targets:
        wv = np.asarray(getattr(w, "w", w), dtype=complex).reshape(-1)
        hs.append(_as_matrix(H) @ wv)
    dims = {h.shape[0] for h in hs}
    if len(dims) != 1:
        raise ValueError(f"effective channel dimension mismatch: {sorted(dims)}")
    return hs


def mmse_combiner(targets, k: int, noise: float) -> Combiner:
    """u_k = (sum_{j != k} h_j h_j^H + noise I)^-1 h_k."""
    if noise <= 0:
        raise ValueError("noise must be > 0")
    hs = effective_vectors(targets)
    R = _interference_noise(hs, k, noise)
    return Combiner(k, _solve_hpd(R, hs[k]))


def sinr(k: int, targets, u, noise: float) -> float:
    hs = effective_vectors(targets)
    uv = np.asarray(getattr(u, "u", u), dtype=complex)
    nu = float(np.vdot(uv, uv).real)
    if nu == 0:
        raise ValueError("zero-norm combiner")
    sig = abs(np.vdot(uv, hs[k])) ** 2
    interf = sum(abs(np.vdot(uv, h)) ** 2 for j, h in enumerate(hs) if j != k)
    return float(sig / (interf + noise * nu))


def mmse_sinr_closed_form(k: int, targets, noise: float) -> float:
    """h_k^H (sum_{j != k} h_j h_j^H + noise I)^-1 h_k."""
    hs = effective_vectors(targets)
    R = _interference_noise(hs, k, noise)
    return float(np.vdot(hs[k], _solve_hpd(R, hs[k])).real)


def slot_rates(channels, powers: Sequence[float], noise: float) -> RatePoint:
    """MRT per fleet, MMSE per fleet, then SINR and log2(1 + SINR).

    A fleet with zero power contributes neither signal nor interference and
    gets rate 0.
    """
    mats = [_as_matrix(H) for H in channels]
    if len(mats) != len(powers):
        raise ValueError("need one power per fleet")
    targets = []
    for i, (H, p) in enumerate(zip(mats, powers)):
        if p > 0:
            targets.append((H, mrt_precoder(H, p, i)))
        else:
            targets.append((H, np.zeros(H.shape[1], dtype=complex)))
    hs = effective_vectors(targets)
    out = []
    for k, p in enumerate(powers):
        if p <= 0:
            out.append(0.0)
            continue
        R = _interference_noise(hs, k, noise)
        u = _solve_hpd(R, hs[k])
        out.append(sinr(k, targets, u, noise))
    return RatePoint.from_sinr(out)


def min_power_for_rate(rate_fn: Callable[[float], Sequence[float]], target: float,
                       metric: str = "per-fleet", bracket: tuple[float, float] = (1e-4, 1e6),
                       tol_db: float = 0.01) -> float:
    """Smallest common power P meeting ``target`` by bisection on log10(P).

    ``rate_fn(P)`` returns per-fleet rates and must reuse one fading
    realization for every probe. ``metric`` is ``'per-fleet'`` (every fleet
    meets the target) or ``'sum'``.
    """
    if metric not in ("per-fleet", "sum"):
        raise ValueError("metric must be 'per-fleet' or 'sum'")
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def ok(p: float) -> bool:
        r = rate_fn(p)
        return (min(r) if metric == "per-fleet" else sum(r)) >= target

    if target <= 0 or ok(lo):
        return lo
    if not ok(hi):
        raise UnreachableTargetError(f"target {target} bps/Hz unreachable at {hi} W")
    a, b = math.log10(lo), math.log10(hi)
    while (b - a) * 10 > tol_db:
        mid = 0.5 * (a + b)
        if ok(10**mid):
            b = mid
        else:
            a = mid
    return 10**b
