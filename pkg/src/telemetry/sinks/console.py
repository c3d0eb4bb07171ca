#!/usr/bin/env python3
from __future__ import annotations

from typing import Any

from ..config import TelemetrySink


class ConsoleSink(TelemetrySink):
    """Simple console output sink; useful when running examples by hand."""

    def emit(self, event: Any) -> None:
        print(event)
