"""Structured run events fanned out to pluggable sinks."""

from .pipeline import TelemetryPipeline, build_default_pipeline

__all__ = ["TelemetryPipeline", "build_default_pipeline"]
