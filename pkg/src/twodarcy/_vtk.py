"""Minimal legacy-VTK (ASCII, version 3.0) unstructured-grid writer."""

from __future__ import annotations

import os

import numpy as np

VTK_TRIANGLE = 5


def _write_values(fp, values):
    for v in np.asarray(values, dtype=float).ravel():
        fp.write(f"{v:.9e}\n")


def write_unstructured_grid(
    path,
    points,
    cells,
    *,
    title="twodarcy output",
    cell_scalars=None,
    cell_vectors=None,
    point_scalars=None,
):
    """Write triangles with optional scalar/vector data attached to cells or points.

    ``cell_scalars``/``point_scalars`` map names to (n,) arrays and
    ``cell_vectors`` maps names to (n, 2) arrays (padded with z = 0).
    Output is byte-deterministic for identical inputs.
    """
    points = np.asarray(points, dtype=float)
    cells = np.asarray(cells, dtype=np.int64)
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="ascii") as fp:
        fp.write("# vtk DataFile Version 3.0\n")
        fp.write(f"{title}\n")
        fp.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        fp.write(f"POINTS {len(points)} double\n")
        for x, y in points:
            fp.write(f"{x:.9e} {y:.9e} 0.0\n")
        fp.write(f"CELLS {len(cells)} {4 * len(cells)}\n")
        for a, b, c in cells:
            fp.write(f"3 {a} {b} {c}\n")
        fp.write(f"CELL_TYPES {len(cells)}\n")
        for _ in range(len(cells)):
            fp.write(f"{VTK_TRIANGLE}\n")
        if cell_scalars or cell_vectors:
            fp.write(f"CELL_DATA {len(cells)}\n")
            for name, data in (cell_scalars or {}).items():
                fp.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                _write_values(fp, data)
            for name, data in (cell_vectors or {}).items():
                fp.write(f"VECTORS {name} double\n")
                for vx, vy in np.asarray(data, dtype=float):
                    fp.write(f"{vx:.9e} {vy:.9e} 0.0\n")
        if point_scalars:
            fp.write(f"POINT_DATA {len(points)}\n")
            for name, data in point_scalars.items():
                fp.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                _write_values(fp, data)
