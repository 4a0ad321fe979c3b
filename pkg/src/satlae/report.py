"""CSV serialization of experiment tables."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

from .engine import ExperimentResult, SlotMetrics

# Golden headers; column order is part of the output contract.
RUN_BASE_COLUMNS = ("slot", "serving")
RUN_TAIL_COLUMNS = ("sum_rate", "beam_lat", "beam_lon", "handover", "fingerprint")


def format_value(v) -> str:
    """Floats to 9 significant digits; bools lowercase; everything else via str."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.9g}"
    return str(v)


def render_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(columns, rows))
    return p


def run_columns(n_fleets: int) -> tuple[str, ...]:
    sinr = tuple(f"sinr_fleet{f + 1}" for f in range(n_fleets))
    rate = tuple(f"rate_fleet{f + 1}" for f in range(n_fleets))
    return RUN_BASE_COLUMNS + sinr + rate + RUN_TAIL_COLUMNS


def run_table(metrics: Sequence[SlotMetrics], n_fleets: int, fingerprint: str) -> ExperimentResult:
    rows = [
        (m.slot, ";".join(m.serving), *m.sinr, *m.rate, m.sum_rate,
         m.beam_center.lat, m.beam_center.lon, m.handover, fingerprint)
        for m in metrics
    ]
    return ExperimentResult("Run", run_columns(n_fleets), rows, fingerprint)


def summary_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_summary{p.suffix or '.csv'}")


def write_result(path: str | Path, result: ExperimentResult) -> list[Path]:
    """Write the main table, plus the summary table when the result carries one."""
    out = [write_csv(path, result.columns, result.rows)]
    if "summary" in result.extra:
        out.append(write_csv(summary_path(path), result.extra["summary_columns"], result.extra["summary"]))
    return out
