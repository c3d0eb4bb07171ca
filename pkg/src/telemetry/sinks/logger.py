#!/usr/bin/env python3
from __future__ import annotations

import json
import logging
from dataclasses import asdict, is_dataclass
from typing import Any

from ...config.config import runtime_config
from ..config import TelemetrySink


def configured_level() -> int:
    """Numeric level for MVGA_LOG_LEVEL, WARNING when the name is unknown."""
    level = logging.getLevelName(runtime_config.settings().log_level)
    return level if isinstance(level, int) else logging.WARNING


class LoggerSink(TelemetrySink):
    """Structured logger sink writing one compact JSON line per event.

    Records are emitted at ``level``; whether they show is decided by the
    logger's effective level, so MVGA_LOG_LEVEL (applied to the root logger
    by the CLI) filters telemetry like any other record.
    """

    def __init__(self, name: str = "mvga.telemetry", level: int = logging.INFO):
        self.logger = logging.getLogger(name)
        self.level = level
        if not self.logger.handlers and not logging.getLogger().handlers:
            # Host hasn't configured logging yet
            self.logger.addHandler(logging.StreamHandler())
            if self.logger.level == logging.NOTSET:
                self.logger.setLevel(configured_level())

    def emit(self, event: Any) -> None:
        """Log the serialized event at the sink's level."""
        if not self.logger.isEnabledFor(self.level):
            return
        try:
            payload = asdict(event) if is_dataclass(event) else dict(event)
            if "duration_s" in payload and isinstance(payload["duration_s"], float):
                payload["duration_s"] = round(payload["duration_s"], 4)
            ordered = {"event": type(event).__name__}
            ordered.update(payload)
            self.logger.log(self.level, json.dumps(ordered, separators=(",", ":"), default=str))
        except Exception as e:
            self.logger.log(self.level, f"Failed to serialize event: {event}; error: {e}")
