"""Deterministic CSV and binary-grid writers shared by the CLI.

Floats are rendered with Python's shortest round-trip representation so
identical runs produce byte-identical files.  Every CSV carries a header row
whose column names embed the units; writers validate the header against the
declared schema before anything is written.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    pass


SCHEMAS = {
    "dispersion": ["k_over_kp", "omega_over_omegap", "branch"],
    "stability_grid": ["d_nm", "lambda_nm", "gamma_total_J_per_m2_per_A2"],
    "stability_contour": ["lambda_nm", "d_critical_nm"],
    "diffract": ["sweep_var", "order_m", "re", "im", "intensity"],
    "diffract_oracle": ["sweep_var", "order_m", "re", "im", "intensity",
                        "intensity_effective"],
    "field": ["x_over_period", "z_times_g", "intensity"],
    "cerenkov": ["sweep_var", "power_W_per_m_per_rad_s"],
    "casimir_du": ["d_nm", "delta_u_expanded_J_per_m2",
                   "delta_u_full_J_per_m2", "closed_form_J_per_m2"],
}


def fmt(value) -> str:
    """Shortest round-trip decimal form of a float (ints pass through)."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    return repr(v)


def write_csv(path, schema_name: str, rows, extra_columns=()) -> None:
    """Write rows under the named schema; extra columns (e.g. an anomaly
    flag) may extend it on the right."""
    header = SCHEMAS.get(schema_name)
    if header is None:
        raise SchemaError(f"unknown schema '{schema_name}'")
    header = list(header) + list(extra_columns)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(
                f"row width {len(row)} != header width {len(header)} "
                f"for schema '{schema_name}'")
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Header list and string-valued rows of a CSV written by write_csv."""
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = [line.split(",") for line in text[1:]]
    return header, rows


BIN_MAGIC = b"DGF1"


def write_binary_grid(path, grid: np.ndarray) -> None:
    """Compact field-snapshot format: 16-byte header (magic 'DGF1', u32 nx,
    u32 nz, u32 reserved, little-endian) followed by the float64 payload in
    C order with shape (nz, nx)."""
    g = np.asarray(grid, dtype="<f8")
    nz, nx = g.shape
    with open(path, "wb") as fh:
        fh.write(BIN_MAGIC)
        fh.write(struct.pack("<III", nx, nz, 0))
        fh.write(g.tobytes(order="C"))


def read_binary_grid(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != BIN_MAGIC:
        raise SchemaError("bad magic; not a DGF1 grid")
    nx, nz, _ = struct.unpack("<III", raw[4:16])
    payload = np.frombuffer(raw[16:], dtype="<f8")
    if payload.size != nx * nz:
        raise SchemaError("payload size mismatch")
    return payload.reshape(nz, nx).copy()
