"""Tests for config.config RuntimeConfig module."""
