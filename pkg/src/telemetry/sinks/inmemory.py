#!/usr/bin/env python3
from __future__ import annotations

from typing import Any

from ..config import TelemetrySink


class InMemorySink(TelemetrySink):
    """In-memory sink for test assertions and metrics collection."""

    def __init__(self):
        self.events: list[Any] = []

    def emit(self, event: Any) -> None:
        self.events.append(event)

    def clear(self) -> None:
        self.events.clear()

    def get_events(self) -> list[Any]:
        return self.events.copy()

    def of_type(self, event_type: type) -> list[Any]:
        return [e for e in self.events if isinstance(e, event_type)]
