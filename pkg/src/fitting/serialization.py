#!/usr/bin/env python3
"""
Model files (JSON) and evaluation CSVs.

Scalars are written either as shortest round-trip decimals or, in hex mode,
as ``float.hex`` strings; complex scalars are ``[re, im]`` pairs. Both modes
read back bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path
from typing import Any

import numpy as np

from ..basis.grevlex import grevlex_basis
from ..basis.stacked import DerivOrder, NodeSet
from ..collocation.gram import CollocationMap
from ..errors import ModelFormatError
from ..utils import atomic_write_text
from .arnoldi import FitModel
from .evaluation import StackedOutput

FORMAT_VERSION = 1


def encode_scalar(value: Any, hex_floats: bool = False) -> Any:
    if isinstance(value, (complex, np.complexfloating)) and not isinstance(value, (float, np.floating)):
        return [encode_scalar(float(value.real), hex_floats), encode_scalar(float(value.imag), hex_floats)]
    value = float(value)
    return value.hex() if hex_floats else value


def decode_scalar(value: Any) -> complex | float:
    if isinstance(value, list):
        return complex(decode_scalar(value[0]), decode_scalar(value[1]))
    if isinstance(value, str):
        return float.fromhex(value)
    return float(value)


def model_to_dict(model: FitModel, hex_floats: bool = False) -> dict:
    parent_s, parent_u = model.basis.truncated(model.t).parent_table()
    complex_values = np.iscomplexobj(model.rtilde) or np.iscomplexobj(model.nodes.coords)
    payload: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "d": model.d,
        "n": model.n,
        "order": int(model.order),
        "g": model.g,
        "t": model.t,
        "breakdown": model.breakdown,
        "hex_floats": hex_floats,
        "complex": bool(complex_values),
        "parent_s": parent_s,
        "parent_u": parent_u,
        "Rtilde": _encode_matrix(model.rtilde, hex_floats),
        "map": model.cmap.to_dict(),
        "nodes": _encode_matrix(model.nodes.coords, hex_floats),
        "coeffs": None if model.coeffs is None else [encode_scalar(c, hex_floats) for c in model.coeffs],
    }
    return payload


def _encode_matrix(arr: np.ndarray, hex_floats: bool) -> list:
    return [[encode_scalar(v, hex_floats) for v in row] for row in np.asarray(arr)]


def _decode_matrix(raw: list, complex_values: bool) -> np.ndarray:
    dtype = np.complex128 if complex_values else np.float64
    rows = [[decode_scalar(v) for v in row] for row in raw]
    return np.array(rows, dtype=dtype)


def model_from_dict(payload: dict) -> FitModel:
    try:
        d, n, t = int(payload["d"]), int(payload["n"]), int(payload["t"])
        order = DerivOrder.coerce(payload["order"])
        complex_values = bool(payload.get("complex", False))
        full = grevlex_basis(d, n)
        if not 1 <= t <= full.g:
            raise ValueError(f"t={t} outside 1..{full.g}")
        if list(full.truncated(t).parent_table()) != [list(payload["parent_s"]), list(payload["parent_u"])]:
            raise ValueError("parent table does not match the graded ordering")
        rtilde = _decode_matrix(payload["Rtilde"], complex_values).reshape(t, t)
        nodes = NodeSet(_decode_matrix(payload["nodes"], complex_values).reshape(-1, d))
        cmap = CollocationMap.from_dict(payload["map"])
        coeffs = payload.get("coeffs")
        coeff_arr = None
        if coeffs is not None:
            coeff_arr = np.array([decode_scalar(c) for c in coeffs],
                                 dtype=np.complex128 if complex_values else np.float64)
        return FitModel(
            basis=full,
            nodes=nodes,
            order=order,
            cmap=cmap,
            t=t,
            rtilde=rtilde,
            q=None,
            coeffs=coeff_arr,
            breakdown=payload.get("breakdown"),
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"Malformed model file: {exc}") from exc


def write_model(model: FitModel, path: Path, hex_floats: bool = False) -> Path:
    """Write the model JSON atomically (Q is never stored)."""
    text = json.dumps(model_to_dict(model, hex_floats), indent=1)
    return atomic_write_text(Path(path), text + "\n")


def read_model(path: Path) -> FitModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path} is not valid JSON: {exc}") from exc
    return model_from_dict(payload)


def format_number(value: Any, hex_floats: bool = False) -> str:
    if isinstance(value, (complex, np.complexfloating)) and not isinstance(value, (float, np.floating)):
        return f"{format_number(value.real, hex_floats)}{'+' if value.imag >= 0 else '-'}{format_number(abs(value.imag), hex_floats)}j"
    value = float(value)
    return value.hex() if hex_floats else repr(value)


_HEX_PART = r"(?:0x[0-9a-f]+(?:\.[0-9a-f]*)?(?:p[+-]?\d+)?|inf|nan)"
_HEX_COMPLEX = re.compile(rf"([+-]?{_HEX_PART})([+-]{_HEX_PART})j", re.IGNORECASE)


def parse_number(text: str) -> float | complex:
    text = text.strip()
    # exponent signs (p+3) are not the real/imaginary separator
    match = _HEX_COMPLEX.fullmatch(text)
    if match:
        return complex(float.fromhex(match[1]), float.fromhex(match[2]))
    if "x" in text.lower() and "j" not in text:
        return float.fromhex(text)
    if text.endswith("j"):
        return complex(text)
    return float(text)


def output_csv(output: StackedOutput, hex_floats: bool = False) -> str:
    """One row per node: x_1..x_d followed by the stacked blocks."""
    d = output.nodes.d
    header = [f"x{j + 1}" for j in range(d)] + ["p" if name == "f" else name for name in output.columns()]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in output.table():
        writer.writerow([format_number(v, hex_floats) for v in row])
    return buffer.getvalue()


def write_csv(path: Path, header: list[str], rows: np.ndarray, hex_floats: bool = False) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in np.atleast_2d(rows):
        writer.writerow([format_number(v, hex_floats) for v in row])
    return atomic_write_text(Path(path), buffer.getvalue())


def read_matrix_csv(path: Path) -> np.ndarray:
    """Read a numeric CSV (optional header row, '#' comments) into a 2-D array."""
    rows: list[list[float | complex]] = []
    with Path(path).open(newline="", encoding="utf-8") as handle:
        for lineno, record in enumerate(csv.reader(handle)):
            if not record or record[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([parse_number(cell) for cell in record])
            except ValueError:
                if lineno == 0 and not rows:
                    continue
                raise ValueError(f"{path}:{lineno + 1}: non-numeric entry in {record}") from None
    if not rows:
        raise ValueError(f"{path} contains no numeric rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path} has rows of differing widths {sorted(widths)}")
    return np.array(rows)
