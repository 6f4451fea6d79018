"""Binary snapshot format for fields and the basis container.

Field snapshot ("VKB1"), bit-exact:

    bytes 0..3   magic "VKB1"
    bytes 4..7   header length L, little-endian uint32
    bytes 8..8+L UTF-8 JSON header:
                 {"domain": {...}, "n": int, "h": [hx,hy,hz],
                  "inside_count": int, "value_kind": "biquat"|"scalar"}
    then         IEEE-754 little-endian float64 (re, im) pairs,
                 component-major (all cells of c0, then c1, c2, c3),
                 cells in row-major order of the full grid restricted to
                 inside cells.

A basis container is a ZIP archive holding one snapshot per member
(member_0000.vkb, ...) plus manifest.json (coefficient descriptor,
exterior points, gram residual, tolerances).  Zip entries carry a fixed
timestamp so identical bases serialize to identical bytes.
"""

from __future__ import annotations

import json
import struct
import zipfile
from io import BytesIO
from pathlib import Path

import numpy as np

from .bergman import OrthonormalBasis
from .grid import BiquatField, DomainGrid, DomainSpec, build_grid

MAGIC = b"VKB1"
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)

__all__ = [
    "field_to_bytes",
    "field_from_bytes",
    "save_field",
    "load_field",
    "save_basis",
    "load_basis",
]


def field_to_bytes(field: BiquatField) -> bytes:
    grid = field.grid
    header = {
        "domain": grid.spec.to_json(),
        "n": grid.n,
        "h": list(grid.h),
        "inside_count": grid.ncells,
        "value_kind": "biquat",
    }
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    data = np.empty((4, grid.ncells, 2), dtype="<f8")
    comp_major = field.values.T  # (4, N)
    data[:, :, 0] = comp_major.real
    data[:, :, 1] = comp_major.imag
    return MAGIC + struct.pack("<I", len(hb)) + hb + data.tobytes()


def field_from_bytes(raw: bytes, grid: DomainGrid | None = None) -> BiquatField:
    if raw[:4] != MAGIC:
        raise ValueError("not a VKB1 snapshot")
    (hlen,) = struct.unpack("<I", raw[4:8])
    header = json.loads(raw[8 : 8 + hlen].decode("utf-8"))
    if grid is None:
        grid = build_grid(DomainSpec.from_json(header["domain"]), header["n"])
    if grid.ncells != header["inside_count"]:
        raise ValueError("snapshot does not match the grid (inside-cell count)")
    body = np.frombuffer(raw, dtype="<f8", offset=8 + hlen)
    data = body.reshape(4, grid.ncells, 2)
    values = (data[:, :, 0] + 1j * data[:, :, 1]).T.copy()
    return BiquatField(grid, values)


def save_field(field: BiquatField, path) -> None:
    Path(path).write_bytes(field_to_bytes(field))


def load_field(path, grid: DomainGrid | None = None) -> BiquatField:
    return field_from_bytes(Path(path).read_bytes(), grid)


def save_basis(basis: OrthonormalBasis, path) -> None:
    manifest = {
        "member_count": len(basis.members),
        "gram_residual": basis.gram_residual,
        "dropped": basis.dropped,
        "source": basis.source,
    }
    buf = BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        info = zipfile.ZipInfo("manifest.json", date_time=_ZIP_DATE)
        zf.writestr(info, json.dumps(manifest, sort_keys=True, indent=1))
        for i, member in enumerate(basis.members):
            info = zipfile.ZipInfo(f"member_{i:04d}.vkb", date_time=_ZIP_DATE)
            zf.writestr(info, field_to_bytes(member))
    Path(path).write_bytes(buf.getvalue())


def load_basis(path, grid: DomainGrid | None = None) -> OrthonormalBasis:
    with zipfile.ZipFile(path) as zf:
        manifest = json.loads(zf.read("manifest.json").decode("utf-8"))
        members = []
        for i in range(manifest["member_count"]):
            raw = zf.read(f"member_{i:04d}.vkb")
            f = field_from_bytes(raw, grid)
            if grid is None:
                grid = f.grid
            members.append(f)
    return OrthonormalBasis(
        members=members,
        gram_residual=manifest["gram_residual"],
        source=manifest.get("source", {}),
        dropped=manifest.get("dropped", []),
    )
