#!/usr/bin/env python3
"""Unit tests for model files and CSV output."""

from __future__ import annotations

import json

import numpy as np
import pytest

from src.basis.grevlex import grevlex_basis
from src.basis.stacked import NodeSet, StackedLayout
from src.collocation.gram import selection_map
from src.errors import ModelFormatError
from src.fitting.arnoldi import fit
from src.fitting.evaluation import eval_poly
from src.fitting.serialization import (
    decode_scalar,
    encode_scalar,
    format_number,
    model_to_dict,
    output_csv,
    parse_number,
    read_matrix_csv,
    read_model,
    write_csv,
    write_model,
)


@pytest.fixture
def model(rng):
    nodes = NodeSet(rng.uniform(-1, 1, size=(25, 2)))
    cmap = selection_map(StackedLayout.for_nodes(nodes, 0), [("f", range(nodes.m))])
    fitted = fit(nodes, grevlex_basis(2, 4), cmap)
    return fitted.with_coeffs(rng.standard_normal(fitted.t))


class TestScalars:
    """Test scalar encoding."""

    def test_hex_is_exact(self):
        """Hex strings decode to the same bits."""
        value = 0.1 + 0.2
        assert decode_scalar(encode_scalar(value, hex_floats=True)) == value

    def test_complex_pair(self):
        """Complex scalars become [re, im] pairs."""
        assert encode_scalar(1.5 - 2j) == [1.5, -2.0]
        assert decode_scalar([1.5, -2.0]) == 1.5 - 2j

    @pytest.mark.parametrize("text,expected", [("0x1.8p+0", 1.5), ("-2.5", -2.5), ("1+2j", 1 + 2j)])
    def test_parse_number(self, text, expected):
        """Decimal, hex and complex cells are recognized."""
        assert parse_number(text) == expected

    @pytest.mark.parametrize("value", [1.5 - 2.25j, -3e-5 + 7e-9j, 0.1j, -1e300 - 1e-300j])
    def test_complex_hex_cell(self, value):
        """Complex hex cells split at the sign before the imaginary part."""
        assert parse_number(format_number(value, hex_floats=True)) == value


class TestModelFile:
    """Test model JSON round trips."""

    @pytest.mark.parametrize("hex_floats", [True, False])
    def test_round_trip_bit_exact(self, model, tmp_path, hex_floats):
        """R~, nodes and coefficients survive a write/read cycle unchanged."""
        path = write_model(model, tmp_path / "model.json", hex_floats=hex_floats)
        loaded = read_model(path)
        assert loaded.t == model.t
        assert loaded.order == model.order
        np.testing.assert_array_equal(loaded.rtilde, model.rtilde)
        np.testing.assert_array_equal(loaded.nodes.coords, model.nodes.coords)
        np.testing.assert_array_equal(loaded.coeffs, model.coeffs)
        assert loaded.q is None

    def test_loaded_model_evaluates_identically(self, model, tmp_path, rng):
        """Evaluation from a reloaded model is bitwise equal."""
        new = NodeSet(rng.uniform(-1, 1, size=(6, 2)))
        loaded = read_model(write_model(model, tmp_path / "m.json", hex_floats=True))
        np.testing.assert_array_equal(
            eval_poly(loaded, new, 2, workers=1).stacked(), eval_poly(model, new, 2, workers=1).stacked()
        )

    def test_parent_table_is_one_based(self, model):
        """The stored table starts with element 2 generated from 1 by x1."""
        payload = model_to_dict(model)
        assert payload["parent_s"][0] == 1
        assert payload["parent_u"][:2] == [1, 2]
        assert len(payload["parent_s"]) == model.t - 1

    def test_complex_model(self, tmp_path):
        """Complex nodes and R~ round trip."""
        nodes = NodeSet(np.exp(2j * np.pi * np.arange(5) / 5))
        cmap = selection_map(StackedLayout.for_nodes(nodes, 0), [("f", range(5))])
        fitted = fit(nodes, grevlex_basis(1, 4), cmap)
        loaded = read_model(write_model(fitted, tmp_path / "c.json", hex_floats=True))
        np.testing.assert_array_equal(loaded.rtilde, fitted.rtilde)
        np.testing.assert_array_equal(loaded.nodes.coords, fitted.nodes.coords)

    def test_wrong_parent_table(self, model, tmp_path):
        """A tampered parent table is rejected."""
        payload = model_to_dict(model)
        payload["parent_u"][-1] = 1 if payload["parent_u"][-1] != 1 else 2
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ModelFormatError):
            read_model(path)

    def test_missing_key(self, model, tmp_path):
        """Missing fields raise ModelFormatError."""
        payload = model_to_dict(model)
        del payload["Rtilde"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ModelFormatError):
            read_model(path)

    def test_invalid_json(self, tmp_path):
        """Non-JSON files raise ModelFormatError."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ModelFormatError):
            read_model(path)


class TestCsv:
    """Test CSV reading and writing."""

    def test_output_header(self, model):
        """Evaluation CSV lists coordinates, p and the partial blocks."""
        out = eval_poly(model, NodeSet(np.array([[0.0, 0.5]])), 2)
        lines = output_csv(out).splitlines()
        assert lines[0] == "x1,x2,p,d1,d2,d11,d12,d22"
        assert len(lines) == 2

    def test_hex_output_reads_back(self, model, tmp_path):
        """Hex CSV cells parse back to the same values."""
        out = eval_poly(model, NodeSet(np.array([[0.1, 0.5], [-0.3, 0.2]])), 1)
        path = tmp_path / "eval.csv"
        path.write_text(output_csv(out, hex_floats=True))
        np.testing.assert_array_equal(read_matrix_csv(path), out.table())

    def test_complex_hex_output_reads_back(self, rng, tmp_path):
        """Complex hex CSV cells parse back to the same values."""
        nodes = NodeSet(rng.uniform(-1, 1, size=(20, 2)) + 1j * rng.uniform(-1, 1, size=(20, 2)))
        cmap = selection_map(StackedLayout.for_nodes(nodes, 0), [("f", range(nodes.m))])
        fitted = fit(nodes, grevlex_basis(2, 3), cmap)
        fitted = fitted.with_coeffs(rng.standard_normal(fitted.t) + 1j * rng.standard_normal(fitted.t))
        out = eval_poly(fitted, NodeSet(np.array([[0.1 + 0.2j, -0.5j], [0.3, 0.25 - 0.1j]])), 1)
        path = tmp_path / "eval.csv"
        path.write_text(output_csv(out, hex_floats=True))
        np.testing.assert_array_equal(read_matrix_csv(path), out.table())

    def test_read_skips_header_and_comments(self, tmp_path):
        """A header row and '#' lines are ignored."""
        path = tmp_path / "nodes.csv"
        path.write_text("x1,x2\n# comment\n0.5,1\n-1,2\n")
        np.testing.assert_array_equal(read_matrix_csv(path), [[0.5, 1.0], [-1.0, 2.0]])

    def test_ragged_rows(self, tmp_path):
        """Rows of differing widths are rejected."""
        path = tmp_path / "nodes.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError):
            read_matrix_csv(path)

    def test_non_numeric_body(self, tmp_path):
        """Non-numeric cells after the first row are rejected."""
        path = tmp_path / "nodes.csv"
        path.write_text("1,2\nfoo,3\n")
        with pytest.raises(ValueError, match="non-numeric"):
            read_matrix_csv(path)

    def test_empty_file(self, tmp_path):
        """A file without numbers is rejected."""
        path = tmp_path / "nodes.csv"
        path.write_text("x1\n")
        with pytest.raises(ValueError):
            read_matrix_csv(path)

    def test_write_csv(self, tmp_path):
        """write_csv writes a header and one line per row."""
        path = write_csv(tmp_path / "sub" / "t.csv", ["n", "err"], np.array([[6, 1e-3], [10, 1e-6]]))
        assert path.read_text().splitlines() == ["n,err", "6.0,0.001", "10.0,1e-06"]
