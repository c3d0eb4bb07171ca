"""Tests for config.models module."""
