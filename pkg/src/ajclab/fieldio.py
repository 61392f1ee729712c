"""Binary field-file serialization.

Layout: one ASCII header line ``AJC1 <kind> <n>\\n`` with
kind in {scalar, oneform, twoform, threeform, endo}, followed immediately
by the node values as 64-bit IEEE-754 little-endian floats,
components-major (component index slowest) with x4 the fastest axis.
Endomorphism components are the 16 matrix entries in row-major order.
The file must end exactly after the payload.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .torusfield import (
    EndoField,
    GridSpec,
    OneFormField,
    ScalarField,
    ThreeFormField,
    TwoFormField,
)

MAGIC = "AJC1"

_KIND_TO_CLS = {
    "scalar": ScalarField,
    "oneform": OneFormField,
    "twoform": TwoFormField,
    "threeform": ThreeFormField,
    "endo": EndoField,
}


class FieldFormatError(ValueError):
    """Raised for malformed or mismatching field files."""


def serialize_field(field, path) -> None:
    """Write a field to ``path`` in the documented binary format."""
    path = Path(path)
    n = field.grid.n
    ncomp = int(np.prod(field.NCOMP)) if field.NCOMP else 1
    # components-major: move the flattened component axis to the front
    payload = field.values.reshape(field.grid.shape + (ncomp,))
    payload = np.moveaxis(payload, -1, 0)
    with open(path, "wb") as fh:
        fh.write(f"{MAGIC} {field.KIND} {n}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(payload, dtype="<f8").tobytes())


def deserialize_field(path, expect_grid: GridSpec | None = None):
    """Read a field file back; optionally enforce the expected grid."""
    path = Path(path)
    raw = path.read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise FieldFormatError(f"{path}: missing header line")
    try:
        header = raw[:nl].decode("ascii")
    except UnicodeDecodeError as exc:
        raise FieldFormatError(f"{path}: header is not ASCII") from exc
    parts = header.split()
    if len(parts) != 3:
        raise FieldFormatError(f"{path}: malformed header {header!r}")
    magic, kind, n_str = parts
    if magic != MAGIC:
        raise FieldFormatError(f"{path}: bad magic/version {magic!r}, expected {MAGIC!r}")
    cls = _KIND_TO_CLS.get(kind)
    if cls is None:
        raise FieldFormatError(f"{path}: unknown field kind {kind!r}")
    try:
        n = int(n_str)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: bad grid size {n_str!r}") from exc
    try:
        grid = GridSpec(n)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}") from exc
    if expect_grid is not None and grid != expect_grid:
        raise FieldFormatError(f"{path}: grid n={n}, expected n={expect_grid.n}")
    ncomp = int(np.prod(cls.NCOMP)) if cls.NCOMP else 1
    body = raw[nl + 1 :]
    expected_bytes = 8 * ncomp * grid.node_count
    if len(body) != expected_bytes:
        raise FieldFormatError(
            f"{path}: payload has {len(body)} bytes, expected {expected_bytes}"
        )
    flat = np.frombuffer(body, dtype="<f8").reshape((ncomp,) + grid.shape)
    values = np.moveaxis(flat, 0, -1).reshape(grid.shape + cls.NCOMP)
    return cls(grid, values)
