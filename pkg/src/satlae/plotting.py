"""Matplotlib figures rendered next to the CSV tables."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

from .engine import ExperimentResult  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.4,
    "lines.markersize": 4,
    "svg.hashsalt": "satlae",
}


def figure_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".png")


def _series(result: ExperimentResult, key: str, x: str, y: str):
    cols = result.columns
    ki, xi, yi = cols.index(key), cols.index(x), cols.index(y)
    out = defaultdict(lambda: ([], []))
    for row in result.rows:
        xs, ys = out[row[ki]]
        xs.append(row[xi])
        ys.append(row[yi])
    return out


def _draw(ax, result: ExperimentResult) -> None:
    kind = result.kind
    if kind == "Run":
        slots = [r[0] for r in result.rows]
        ax.plot(slots, [r[result.columns.index("sum_rate")] for r in result.rows])
        ax.set(xlabel="slot", ylabel="sum rate [bps/Hz]")
        return
    if kind == "PowerSweep":
        for name, (xs, ys) in _series(result, "policy", "power_w", "mean_sum_rate").items():
            ax.plot(xs, ys, marker="o", label=name)
        ax.set(xlabel="transmit power per fleet [W]", ylabel="mean sum rate [bps/Hz]")
    elif kind == "MinPower":
        for name, (xs, ys) in _series(result, "transmitter", "target_bps_hz", "min_power_w").items():
            pts = [(x, y) for x, y in zip(xs, ys) if not math.isnan(y)]
            if pts:
                ax.semilogy(*zip(*pts), marker="o", label=name)
        ax.set(xlabel="target rate [bps/Hz]", ylabel="minimum power [W]")
    elif kind == "Service":
        ser = _series(result, "receiver", "target_bps_hz", "service_duration_slots")
        width = 0.8 / max(len(ser), 1)
        for i, (name, (xs, ys)) in enumerate(ser.items()):
            ax.bar([j + i * width for j in range(len(xs))], ys, width, label=name)
            ax.set_xticks([j + 0.4 - width / 2 for j in range(len(xs))], [f"{x:g}" for x in xs])
        ax.set(xlabel="target rate [bps/Hz]", ylabel="service duration [slots]")
    elif kind == "TimescaleCompare":
        for name, (xs, ys) in _series(result, "scheme", "slot", "sum_rate").items():
            ax.plot(xs, ys, label=name)
        ax.set(xlabel="slot", ylabel="sum rate [bps/Hz]")
    else:
        raise ValueError(f"no figure for result kind {kind!r}")
    ax.legend()


def render(result: ExperimentResult, path: str | Path) -> Path:
    """Render ``result`` to a PNG at ``path`` and return the path."""
    p = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            _draw(ax, result)
            fig.tight_layout()
            fig.savefig(p, metadata={"Software": None})
        finally:
            plt.close(fig)
    return p
