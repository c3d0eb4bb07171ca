#!/usr/bin/env python3
"""End-to-end runs of the mvga command."""

from __future__ import annotations

import json

import numpy as np
import pytest

from src.basis.stacked import NodeSet
from src.fitting.evaluation import eval_poly
from src.fitting.serialization import read_matrix_csv, read_model
from src.main import run


@pytest.mark.slow
def test_reproduce_then_eval(tmp_path, capsys):
    """A reproduced model reloads from hex and evaluates to the printed accuracy."""
    out = tmp_path / "hermite"
    assert run(["reproduce", "--example", "hermite_sin", "--hex-floats", "--out", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["max_error"] <= 1e-5
    assert json.loads((out / "metrics.json").read_text()) == printed

    errors = read_matrix_csv(out / "errors.csv")
    model = read_model(out / "model.json")
    refined = NodeSet(errors[:, :2])
    np.testing.assert_allclose(eval_poly(model, refined, 0).fun, errors[:, 2], atol=1e-14)

    nodes_csv = tmp_path / "nodes.csv"
    nodes_csv.write_text("x1,x2\n" + "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in errors[:5, :2]) + "\n")
    assert run(["eval", "--model", str(out / "model.json"), "--nodes", str(nodes_csv),
                "--order", "2", "--out", str(tmp_path / "eval")]) == 0
    table = read_matrix_csv(tmp_path / "eval" / "eval.csv")
    assert table.shape == (5, 2 + 6)
    np.testing.assert_allclose(table[:, 2], errors[:5, 2], atol=1e-14)


def test_basis_summary(capsys):
    """The basis command reports the parent table for a small basis."""
    assert run(["basis", "--dim", "2", "--degree", "2"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["indices"] == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
