#!/usr/bin/env python3
"""Unit tests for alpha strings and problem JSON parsing."""

from __future__ import annotations

import json

import pytest

from src.config.models import AlphaSpec
from src.config.parsing import load_problem_spec, parse_alpha_spec, parse_domain_spec, parse_problem_spec


class TestParseAlphaSpec:
    """Test alpha specification strings."""

    @pytest.mark.parametrize("raw,expected", [
        ("-0.1", AlphaSpec(constant=-0.1)),
        ("const:2.5", AlphaSpec(constant=2.5)),
        (" const:0 ", AlphaSpec(constant=0.0)),
        (3, AlphaSpec(constant=3.0)),
        ("neg_gaussian", AlphaSpec(name="neg_gaussian")),
    ])
    def test_valid(self, raw, expected):
        """Numbers, const: prefixes and names are accepted."""
        assert parse_alpha_spec(raw) == expected

    def test_empty(self):
        """Empty strings are rejected."""
        with pytest.raises(ValueError, match="empty"):
            parse_alpha_spec("  ")

    def test_bad_constant(self):
        """A const: prefix needs a number."""
        with pytest.raises(ValueError, match="Invalid alpha constant"):
            parse_alpha_spec("const:abc")

    def test_unknown_name(self):
        """Unknown names are rejected by AlphaSpec."""
        with pytest.raises(ValueError, match="Unknown alpha function"):
            parse_alpha_spec("wobble")


class TestParseProblemSpec:
    """Test problem JSON payloads."""

    def test_generated_domain(self):
        """A domain payload produces a DomainSpec."""
        spec = parse_problem_spec({
            "app": "poisson_mixed",
            "degree": 22,
            "domain": {"kind": "ellipse_minus_disk", "interior": 504, "boundary": [96, 30]},
            "function": "sin_xy",
            "alpha": "neg_gaussian",
            "seed": 7,
        })
        assert spec.domain.boundary == (96, 30)
        assert spec.alpha == AlphaSpec(name="neg_gaussian")
        assert spec.order == 2
        assert spec.seed == 7

    def test_relative_paths_resolved(self, tmp_path):
        """Node and value paths are resolved against the base directory."""
        spec = parse_problem_spec(
            {"app": "interpolation", "degree": 4, "nodes": "n.csv", "values": "v.csv"}, base_dir=tmp_path
        )
        assert spec.nodes_path == tmp_path / "n.csv"
        assert spec.values_path == tmp_path / "v.csv"

    def test_missing_fields(self):
        """app and degree are required."""
        with pytest.raises(ValueError, match="Missing required fields"):
            parse_problem_spec({"app": "hermite"})

    def test_not_an_object(self):
        """The payload must be a JSON object."""
        with pytest.raises(ValueError, match="JSON object"):
            parse_problem_spec([1, 2])

    def test_polygon_vertices(self):
        """Polygon vertices become float pairs."""
        dom = parse_domain_spec({"kind": "polygon", "interior": 50, "boundary": 20,
                                 "vertices": [[0, 0], [1, 0], [0, 1]]})
        assert dom.vertices == ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))

    def test_domain_missing_fields(self):
        """Domains need kind, interior and boundary."""
        with pytest.raises(ValueError, match="domain spec"):
            parse_domain_spec({"kind": "disk"})


class TestLoadProblemSpec:
    """Test reading problem files."""

    def test_load(self, tmp_path):
        """A problem file is read and parsed."""
        path = tmp_path / "problem.json"
        path.write_text(json.dumps({
            "app": "hermite",
            "degree": 10,
            "domain": {"kind": "disk", "interior": 120, "boundary": 42},
            "function": "sin_xy",
        }))
        spec = load_problem_spec(path)
        assert spec.app == "hermite"
        assert spec.order == 1

    def test_missing_file(self, tmp_path):
        """Missing files raise FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_problem_spec(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        """Broken JSON raises ValueError."""
        path = tmp_path / "problem.json"
        path.write_text("{")
        with pytest.raises(ValueError, match="not valid JSON"):
            load_problem_spec(path)
