"""Output writers: CSV time series, JSON, VTK legacy ASCII and binary dumps.

Binary dumps pair a JSON header with a flat payload of little-endian
complex128 values:

* matrix dump ``<stem>.json`` + ``<stem>.bin``: header keys ``dims``
  (rows, columns), ``s`` (``[re, im]``), ``mesh_hash``, ``dtype`` and
  ``byte_order``; the payload is the matrix in row-major order.
* solution dump ``<stem>.json`` + ``<stem>.bin``: header key ``blocks``
  lists, per Laplace parameter, ``s``, ``offset`` and ``count`` (in complex
  values) of the coefficient vector ``(U^-, Lambda, Phi)`` and the block
  sizes under ``sizes``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

DTYPE = "<c16"


def write_json(path, obj) -> None:
    """Write ``obj`` with sorted keys so identical inputs give identical files."""
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_time_series(path, times, columns: dict) -> None:
    """CSV with a ``t`` column followed by one column per entry of ``columns``.

    Values are written with 17 significant digits.
    """
    names = list(columns)
    data = [np.asarray(columns[n], dtype=float).reshape(len(times)) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + names)
        for k, t in enumerate(times):
            w.writerow([f"{t:.17g}"] + [f"{d[k]:.17g}" for d in data])


def read_time_series(path) -> tuple[np.ndarray, dict]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    return body[:, 0], {n: body[:, k + 1] for k, n in enumerate(head[1:])}


def probe_columns(probes: np.ndarray) -> dict:
    """Columns ``p<k>_u<i>`` for traces of shape (n_steps, n_probes, 3)."""
    return {f"p{k}_u{'xyz'[i]}": probes[:, k, i]
            for k in range(probes.shape[1]) for i in range(3)}


def write_vtk(path, vertices, cells, point_data: dict | None = None,
              title: str = "elastocq") -> None:
    """Unstructured grid in VTK legacy ASCII format.

    ``cells`` holds triangles (n, 3) or tetrahedra (n, 4).  ``point_data``
    maps names to (n_points,) scalars or (n_points, 3) vectors; complex
    arrays are split into ``<name>_re`` and ``<name>_im``.
    """
    vertices = np.asarray(vertices, dtype=float)
    cells = np.asarray(cells, dtype=np.int64)
    kind = {3: 5, 4: 10}[cells.shape[1]]
    lines = ["# vtk DataFile Version 3.0", title[:255], "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {len(vertices)} double"]
    lines += [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in vertices]
    lines.append(f"CELLS {len(cells)} {cells.size + len(cells)}")
    lines += [" ".join([str(cells.shape[1])] + [str(i) for i in c]) for c in cells]
    lines.append(f"CELL_TYPES {len(cells)}")
    lines += [str(kind)] * len(cells)
    fields = {}
    for name, arr in (point_data or {}).items():
        arr = np.asarray(arr)
        if np.iscomplexobj(arr):
            fields[f"{name}_re"], fields[f"{name}_im"] = arr.real, arr.imag
        else:
            fields[name] = arr
    if fields:
        lines.append(f"POINT_DATA {len(vertices)}")
    for name, arr in fields.items():
        arr = np.asarray(arr, dtype=float).reshape(len(vertices), -1)
        if arr.shape[1] == 3:
            lines.append(f"VECTORS {name} double")
            lines += [f"{a:.17g} {b:.17g} {c:.17g}" for a, b, c in arr]
        elif arr.shape[1] == 1:
            lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
            lines += [f"{a:.17g}" for a in arr[:, 0]]
        else:
            raise ValueError(f"point field {name!r} must be scalar or 3-vector")
    Path(path).write_text("\n".join(lines) + "\n")


def _pair(s) -> list:
    s = complex(s)
    return [s.real, s.imag]


def dump_matrix(stem, matrix, s, mesh_hash: str, extra: dict | None = None) -> tuple[Path, Path]:
    """Write ``<stem>.bin`` (row-major complex128, little-endian) and ``<stem>.json``."""
    stem = Path(stem)
    A = np.ascontiguousarray(np.asarray(matrix, dtype=DTYPE))
    binp, head = stem.with_suffix(".bin"), stem.with_suffix(".json")
    A.tofile(binp)
    header = {"dims": list(A.shape), "s": _pair(s), "mesh_hash": mesh_hash, "dtype": "complex128",
              "byte_order": "little", "order": "row-major", "payload": binp.name}
    header.update(extra or {})
    write_json(head, header)
    return head, binp


def load_matrix(stem) -> tuple[np.ndarray, dict]:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    data = np.fromfile(stem.with_suffix(".bin"), dtype=DTYPE)
    return data.reshape(header["dims"]), header


def dump_solutions(stem, solutions: dict, sizes, mesh_hash: str,
                   extra: dict | None = None) -> tuple[Path, Path]:
    """Write coefficient vectors keyed by Laplace parameter.

    ``solutions`` maps ``s`` to the stacked vector ``(U^-, Lambda, Phi)``.
    """
    stem = Path(stem)
    binp, head = stem.with_suffix(".bin"), stem.with_suffix(".json")
    blocks, offset = [], 0
    with open(binp, "wb") as fh:
        for s, vec in solutions.items():
            v = np.ascontiguousarray(np.asarray(vec, dtype=DTYPE).ravel())
            fh.write(v.tobytes())
            blocks.append({"s": _pair(s), "offset": offset, "count": int(v.size)})
            offset += v.size
    header = {"blocks": blocks, "sizes": [int(n) for n in sizes], "mesh_hash": mesh_hash,
              "dtype": "complex128", "byte_order": "little", "payload": binp.name}
    header.update(extra or {})
    write_json(head, header)
    return head, binp


def load_solutions(stem) -> tuple[dict, dict]:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    data = np.fromfile(stem.with_suffix(".bin"), dtype=DTYPE)
    out = {complex(*b["s"]): data[b["offset"]:b["offset"] + b["count"]] for b in header["blocks"]}
    return out, header


__all__ = [
    "write_json", "write_time_series", "read_time_series", "probe_columns", "write_vtk",
    "dump_matrix", "load_matrix", "dump_solutions", "load_solutions",
]
