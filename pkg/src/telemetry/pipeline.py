#!/usr/bin/env python3
from __future__ import annotations

import logging
from typing import Any, Sequence

from .config import TelemetrySink


class TelemetryPipeline:
    """Fan-out pipeline that emits events to all sinks with isolation."""

    def __init__(self, sinks: Sequence[TelemetrySink]):
        self.sinks = list(sinks)
        self.logger = logging.getLogger("mvga.telemetry.pipeline")

    def publish(self, event: Any) -> None:
        """Emit event to all configured sinks, isolating failures."""
        for sink in self.sinks:
            try:
                sink.emit(event)
            except Exception as e:
                self.logger.warning(f"Telemetry sink {sink.__class__.__name__} failed: {e}")


def publish(pipeline: TelemetryPipeline | None, event: Any) -> None:
    """Publish when a pipeline is configured; library calls pass None by default."""
    if pipeline is not None:
        pipeline.publish(event)


def build_default_pipeline(*extra: TelemetrySink) -> TelemetryPipeline:
    """Logger sink (when MVGA_TELEMETRY is on) plus any extra sinks."""
    from ..config.config import runtime_config
    from .sinks.logger import LoggerSink

    sinks: list[TelemetrySink] = []
    if runtime_config.settings().telemetry:
        sinks.append(LoggerSink())
    sinks.extend(extra)
    return TelemetryPipeline(sinks)
