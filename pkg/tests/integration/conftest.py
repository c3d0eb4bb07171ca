#!/usr/bin/env python3
"""Pytest configuration for integration tests."""

from __future__ import annotations

import pytest

from src.config.config import runtime_config


def pytest_collection_modifyitems(config, items):
    """Mark full-scale example runs as slow."""
    for item in items:
        if "examples" in str(item.fspath) and "test_" in item.name:
            item.add_marker(pytest.mark.slow)


@pytest.fixture(scope="session", autouse=True)
def load_test_environment():
    """Load environment variables for all tests."""
    runtime_config.ensure_loaded()


@pytest.fixture(autouse=True)
def quiet_telemetry(monkeypatch):
    """Keep JSON telemetry out of the captured logs."""
    monkeypatch.setenv("MVGA_TELEMETRY", "0")
