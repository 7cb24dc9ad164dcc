"""Dual-worker real-time streaming pipeline"""

from jscc_sim.streamer.pipeline import (
    DISCRETE_EVENT,
    WALL_CLOCK,
    FrameEvent,
    PipelineConfig,
    PipelineReport,
    StageTime,
    run_pipeline,
)
from jscc_sim.streamer.summary import PipelineSummary, report_to_csv, summarize_report

__all__ = [
    "DISCRETE_EVENT",
    "WALL_CLOCK",
    "FrameEvent",
    "PipelineConfig",
    "PipelineReport",
    "PipelineSummary",
    "StageTime",
    "report_to_csv",
    "run_pipeline",
    "summarize_report",
]
