#!/usr/bin/env python3
from __future__ import annotations

from typing import Protocol


class TelemetrySink(Protocol):
    def emit(self, event: object) -> None: ...
