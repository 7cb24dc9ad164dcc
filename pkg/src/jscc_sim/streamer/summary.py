"""Decode-gap statistics and CSV export of pipeline runs"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np

from jscc_sim.core.artifacts import write_csv
from jscc_sim.core.errors import EmptyReportError, InvalidArgumentError
from jscc_sim.streamer.pipeline import PipelineReport


@dataclass
class PipelineSummary:
    n_frames: int
    max_gap: float
    mean_gap: float
    p95_gap: float
    fraction_within_interval: float
    peak_occupancy: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def summarize_report(report: PipelineReport, frame_interval: float, skip: int = 0) -> PipelineSummary:
    """
    Gap statistics of a pipeline run

    Args:
        report: Pipeline output
        frame_interval: Source frame interval in seconds
        skip: Leading gaps to drop as start-up transient

    Raises:
        EmptyReportError: the report has no frames
    """
    if not report.events:
        raise EmptyReportError("pipeline report has no frames")
    if frame_interval <= 0:
        raise InvalidArgumentError(f"frame_interval must be positive, got {frame_interval}")
    gaps = report.gaps[skip:]
    peak = max((count for _, count in report.occupancy), default=0)
    if gaps.size == 0:
        return PipelineSummary(len(report.events), 0.0, 0.0, 0.0, 1.0, peak)
    # Tolerate float rounding of gaps that equal the interval
    within = gaps <= frame_interval * (1.0 + 1e-9)
    return PipelineSummary(
        n_frames=len(report.events),
        max_gap=float(np.max(gaps)),
        mean_gap=float(np.mean(gaps)),
        p95_gap=float(np.percentile(gaps, 95)),
        fraction_within_interval=float(np.mean(within)),
        peak_occupancy=int(peak),
    )


def report_to_csv(report: PipelineReport, path: Union[str, Path], config_hash: str, seed: int,
                  extra_columns: Optional[Mapping[str, Sequence[Any]]] = None) -> Path:
    """
    One row per frame with all timestamps and the gap to the previous frame

    Args:
        extra_columns: Per-frame values appended after the states column, one
            entry per event; None entries are written blank
    """
    extra = dict(extra_columns or {})
    for name, values in extra.items():
        if len(values) != len(report.events):
            raise InvalidArgumentError(f"column {name!r} has {len(values)} values for {len(report.events)} frames")
    gaps = report.gaps
    rows = []
    for position, event in enumerate(report.events):
        gap = float(gaps[position - 1]) if position > 0 else ""
        rows.append((
            event.frame_index,
            float(event.arrival_time),
            float(event.encode_start),
            float(event.encode_end),
            float(event.enqueue_time),
            float(event.transmit_start),
            float(event.transmit_end),
            float(event.decode_start),
            float(event.decode_end),
            gap,
            "|".join(event.states),
            *("" if values[position] is None else values[position] for values in extra.values()),
        ))
    columns = ("frame", "arrival", "encode_start", "encode_end", "enqueue", "transmit_start",
               "transmit_end", "decode_start", "decode_end", "gap", "states", *extra)
    return write_csv(path, columns, rows, config_hash, seed)
