"""Tests for config.parsing module."""
