#!/usr/bin/env python3
"""
Runtime settings for mvga.

Settings come from the process environment, optionally seeded from .env
files, and are read through typed accessors. ``runtime_config.settings()``
returns a validated snapshot of the MVGA_* variables.
"""

from __future__ import annotations

import logging
import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterator

logger = logging.getLogger("mvga.config")

TRUTHY = {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class Settings:
    """Snapshot of the numeric and output settings."""

    threads: int = 1
    breakdown_tol: float = 1e-13
    solve_tol: float = 1e-8
    hex_floats: bool = False
    log_level: str = "WARNING"
    telemetry: bool = True

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise ValueError(f"MVGA_THREADS must be >= 1, got {self.threads}")
        if not 0 <= self.breakdown_tol < 1:
            raise ValueError(f"MVGA_BREAKDOWN_TOL must lie in [0, 1), got {self.breakdown_tol}")
        if self.solve_tol <= 0:
            raise ValueError(f"MVGA_SOLVE_TOL must be positive, got {self.solve_tol}")


class RuntimeConfig:
    """Environment-backed configuration with .env loading and typed accessors."""

    def __init__(self, overrides: dict[str, str] | None = None):
        """Initialize configuration object.

        Args:
            overrides: Optional dictionary of override values for testing.
        """
        self._loaded = False
        self._load_lock = threading.Lock()
        self._overrides = MappingProxyType(overrides) if overrides else None

    def ensure_loaded(self) -> None:
        """Load .env files into environment if not already loaded.

        Idempotent; respects the SKIP_DOTENV environment variable.
        """
        if self._loaded:
            return

        with self._load_lock:
            if self._loaded:
                return

            if os.getenv("SKIP_DOTENV"):
                self._loaded = True
                return

            self._load_dotenv_files()
            self._loaded = True

    def _load_dotenv_files(self) -> None:
        def load_file(path: Path) -> None:
            if not path.is_file():
                return
            try:
                for raw_line in path.read_text().splitlines():
                    line = raw_line.strip()
                    if not line or line.startswith("#") or "=" not in line:
                        continue
                    key, value = line.split("=", 1)
                    key = key.strip()
                    value = value.strip().strip("'\"")
                    if key and key not in os.environ:
                        os.environ[key] = value
            except Exception as exc:
                logger.warning("failed to load %s: %s", path, exc)

        # Project root first, then the working directory
        project_dir = Path(__file__).resolve().parent.parent.parent
        seen: set[Path] = set()
        for candidate in (project_dir / ".env", Path.cwd() / ".env"):
            if candidate not in seen:
                seen.add(candidate)
                load_file(candidate)

    def _get_value(self, key: str) -> str | None:
        if self._overrides and key in self._overrides:
            return self._overrides[key]
        return os.getenv(key)

    def get_int(self, key: str, default: int | None = None) -> int | None:
        """Get integer configuration value.

        Raises:
            ValueError: If value cannot be converted to integer.
        """
        value = self._get_value(key)
        if value is None:
            return default
        return int(value)

    def get_float(self, key: str, default: float | None = None) -> float | None:
        """Get float configuration value.

        Raises:
            ValueError: If value cannot be converted to float.
        """
        value = self._get_value(key)
        if value is None:
            return default
        return float(value)

    def get_bool(self, key: str, default: bool = False) -> bool:
        """Get boolean configuration value.

        Recognizes 1, true, yes, on (case-insensitive) as True; everything
        else, including the empty string, is False.
        """
        value = self._get_value(key)
        if value is None:
            return default
        return value.strip().lower() in TRUTHY

    def settings(self) -> Settings:
        """Read the MVGA_* variables into a validated Settings snapshot."""
        defaults = Settings()
        return Settings(
            threads=self.get_int("MVGA_THREADS", defaults.threads),
            breakdown_tol=self.get_float("MVGA_BREAKDOWN_TOL", defaults.breakdown_tol),
            solve_tol=self.get_float("MVGA_SOLVE_TOL", defaults.solve_tol),
            hex_floats=self.get_bool("MVGA_HEX_FLOATS", defaults.hex_floats),
            log_level=(self._get_value("MVGA_LOG_LEVEL") or defaults.log_level).upper(),
            telemetry=self.get_bool("MVGA_TELEMETRY", defaults.telemetry),
        )

    @contextmanager
    def override(self, overrides: dict[str, str]) -> Iterator[None]:
        """Temporarily override configuration values (and the environment)."""
        original_overrides = self._overrides
        original_env = {}

        try:
            for key, value in overrides.items():
                if key in os.environ:
                    original_env[key] = os.environ[key]
                os.environ[key] = value

            merged = dict(original_overrides) if original_overrides else {}
            merged.update(overrides)
            self._overrides = MappingProxyType(merged)

            yield

        finally:
            self._overrides = original_overrides
            for key in overrides:
                if key in original_env:
                    os.environ[key] = original_env[key]
                else:
                    os.environ.pop(key, None)


# Singleton instance for runtime use
runtime_config = RuntimeConfig()
