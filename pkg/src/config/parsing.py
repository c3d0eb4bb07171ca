#!/usr/bin/env python3
"""
Parsing of alpha specifications and problem JSON files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .models import AlphaSpec, DomainSpec, ProblemSpec

CONST_PREFIX = "const:"


def parse_alpha_spec(spec: str | float | int) -> AlphaSpec:
    """Parse an alpha specification.

    Format: ``<float>`` | ``const:<float>`` | ``<registered name>``
    """
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return AlphaSpec(constant=float(spec))
    text = str(spec).strip()
    if not text:
        raise ValueError("Alpha specification cannot be empty")
    if text.startswith(CONST_PREFIX):
        value = text[len(CONST_PREFIX):]
        try:
            return AlphaSpec(constant=float(value))
        except ValueError:
            raise ValueError(f"Invalid alpha constant: {value!r}") from None
    try:
        return AlphaSpec(constant=float(text))
    except ValueError:
        return AlphaSpec(name=text)


def parse_domain_spec(payload: Mapping[str, Any]) -> DomainSpec:
    required_fields = ["kind", "interior", "boundary"]
    missing = [name for name in required_fields if name not in payload]
    if missing:
        raise ValueError(f"Missing required fields in domain spec: {missing}")

    boundary = payload["boundary"]
    if isinstance(boundary, list):
        boundary = tuple(int(b) for b in boundary)
    vertices = payload.get("vertices")
    return DomainSpec(
        kind=str(payload["kind"]),
        interior=int(payload["interior"]),
        boundary=boundary if isinstance(boundary, tuple) else int(boundary),
        vertices=tuple((float(x), float(y)) for x, y in vertices) if vertices else None,
        jitter=float(payload.get("jitter", 0.0)),
    )


def _resolve(base_dir: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else base_dir / path


def parse_problem_spec(payload: Mapping[str, Any], base_dir: Path | None = None) -> ProblemSpec:
    """Build a ProblemSpec from a decoded problem JSON object.

    Relative node and value paths are resolved against ``base_dir``.
    """
    if not isinstance(payload, Mapping):
        raise ValueError("Problem spec must be a JSON object")
    required_fields = ["app", "degree"]
    missing = [name for name in required_fields if name not in payload]
    if missing:
        raise ValueError(f"Missing required fields in problem spec: {missing}")

    base_dir = base_dir or Path.cwd()
    domain = payload.get("domain")
    order = payload.get("order")
    seed = payload.get("seed")
    return ProblemSpec(
        app=str(payload["app"]),
        degree=int(payload["degree"]),
        order=None if order is None else int(order),
        domain=parse_domain_spec(domain) if domain is not None else None,
        nodes_path=_resolve(base_dir, payload.get("nodes")),
        values_path=_resolve(base_dir, payload.get("values")),
        function=payload.get("function"),
        alpha=parse_alpha_spec(payload.get("alpha", 0.0)),
        neumann_curve=int(payload.get("neumann_curve", 0)),
        seed=None if seed is None else int(seed),
    )


def load_problem_spec(path: Path) -> ProblemSpec:
    """Read and parse a problem JSON file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Problem file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    return parse_problem_spec(payload, base_dir=path.parent)
