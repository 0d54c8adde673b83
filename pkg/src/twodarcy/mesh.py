"""Consistent Cartesian triangulations of the four-quadrant bipartite domain.

The domain is the square (-1, 1)^2 split by the coordinate axes into four
unit quadrants.  Quadrants Q1 = (0,1)^2 and Q3 = (-1,0)^2 form region 1,
Q2 = (-1,0)x(0,1) and Q4 = (0,1)x(-1,0) form region 2, and the interface is
the cross (-1,1) x {0} union {0} x (-1,1).  A level-k mesh cuts the square
into (2k)^2 cells of side 1/k, each split along its lower-left to
upper-right diagonal.

Every interface edge stores the unit normal of its region-1 neighbour, i.e.
the normal pointing from region 1 into region 2.  Edges are stored with the
lower vertex index first; the global edge normal (tangent rotated by -90
degrees) fixes the flux orientation used by the vector basis downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numpy as np

from ._vtk import write_unstructured_grid

__all__ = [
    "EdgeKind",
    "BipartiteMesh",
    "ConsistencyReport",
    "build_cartesian_mesh",
    "refine",
    "validate_consistency",
    "write_mesh_vtk",
]


class EdgeKind(IntEnum):
    INTERIOR_1 = 0
    INTERIOR_2 = 1
    INTERFACE = 2
    BOUNDARY_1 = 3
    BOUNDARY_2 = 4


@dataclass
class BipartiteMesh:
    """Triangulation of the two-region domain with tagged connectivity.

    Treat instances as immutable once built; all derived geometry is cached.
    ``edge_tris`` uses -1 for the missing neighbour of boundary edges, and
    ``tri_edges[t, i]`` is the edge opposite local vertex i of triangle t.
    """

    level_inv: int
    vertices: np.ndarray        # (nv, 2) float
    triangles: np.ndarray       # (nt, 3) int, counterclockwise
    tri_region: np.ndarray      # (nt,) int, 1 or 2
    tri_quadrant: np.ndarray    # (nt,) int, 1..4 (component id)
    edges: np.ndarray           # (ne, 2) int, low index first
    edge_tris: np.ndarray       # (ne, 2) int
    edge_kind: np.ndarray       # (ne,) int8, EdgeKind values
    tri_edges: np.ndarray       # (nt, 3) int
    tri_edge_signs: np.ndarray  # (nt, 3) int8, +-1 vs the global edge normal
    interface_edges: np.ndarray    # (ni,) edge ids
    interface_normals: np.ndarray  # (ni, 2) region-1 outer normals
    interface_tri1: np.ndarray     # (ni,) region-1 neighbour
    interface_tri2: np.ndarray     # (ni,) region-2 neighbour

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def h(self) -> float:
        return 1.0 / self.level_inv

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        return self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edge_vectors[:, 0], self.edge_vectors[:, 1])

    @cached_property
    def edge_midpoints(self) -> np.ndarray:
        return 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])

    @cached_property
    def edge_normals(self) -> np.ndarray:
        """Unit normals of all edges: the lo->hi tangent rotated by -90 degrees."""
        t = self.edge_vectors / self.edge_lengths[:, None]
        return np.column_stack([t[:, 1], -t[:, 0]])


def _connectivity(triangles: np.ndarray):
    """Edge table, edge->triangle adjacency and triangle->edge map."""
    nt = len(triangles)
    edge_ids: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int]] = []
    edge_tris: list[list[int]] = []
    tri_edges = np.empty((nt, 3), dtype=np.int64)
    for t in range(nt):
        v = triangles[t]
        for i in range(3):
            a, b = int(v[(i + 1) % 3]), int(v[(i + 2) % 3])
            key = (a, b) if a < b else (b, a)
            e = edge_ids.get(key)
            if e is None:
                e = len(edges)
                edge_ids[key] = e
                edges.append(key)
                edge_tris.append([t, -1])
            else:
                edge_tris[e][1] = t
            tri_edges[t, i] = e
    return (
        np.asarray(edges, dtype=np.int64),
        np.asarray(edge_tris, dtype=np.int64),
        tri_edges,
    )


def _finish_mesh(level_inv, vertices, triangles, tri_region, tri_quadrant):
    edges, edge_tris, tri_edges = _connectivity(triangles)
    ne = len(edges)

    region_of = tri_region[edge_tris[:, 0]]
    other = edge_tris[:, 1]
    kind = np.where(region_of == 1, EdgeKind.INTERIOR_1, EdgeKind.INTERIOR_2).astype(np.int8)
    on_boundary = other < 0
    kind[on_boundary & (region_of == 1)] = EdgeKind.BOUNDARY_1
    kind[on_boundary & (region_of == 2)] = EdgeKind.BOUNDARY_2
    mixed = ~on_boundary & (tri_region[edge_tris[:, 0]] != tri_region[np.where(other < 0, 0, other)])
    kind[mixed] = EdgeKind.INTERFACE

    mesh = BipartiteMesh(
        level_inv=level_inv,
        vertices=vertices,
        triangles=triangles,
        tri_region=tri_region,
        tri_quadrant=tri_quadrant,
        edges=edges,
        edge_tris=edge_tris,
        edge_kind=kind,
        tri_edges=tri_edges,
        tri_edge_signs=np.zeros((len(triangles), 3), dtype=np.int8),
        interface_edges=np.flatnonzero(kind == EdgeKind.INTERFACE),
        interface_normals=np.zeros((0, 2)),
        interface_tri1=np.zeros(0, dtype=np.int64),
        interface_tri2=np.zeros(0, dtype=np.int64),
    )

    # Orientation sign of each triangle's edges against the global normal.
    n_e = mesh.edge_normals[tri_edges]                       # (nt, 3, 2)
    mids = mesh.edge_midpoints[tri_edges]                    # (nt, 3, 2)
    out = np.einsum("tid,tid->ti", n_e, mids - mesh.centroids[:, None, :])
    mesh.tri_edge_signs = np.where(out > 0, 1, -1).astype(np.int8)

    iface = mesh.interface_edges
    t0 = edge_tris[iface, 0]
    t1 = edge_tris[iface, 1]
    first_is_1 = tri_region[t0] == 1
    tri1 = np.where(first_is_1, t0, t1)
    tri2 = np.where(first_is_1, t1, t0)
    # Region-1 outer normal: global edge normal flipped to point at the
    # region-2 neighbour's centroid.
    n = mesh.edge_normals[iface]
    towards_2 = np.einsum("id,id->i", n, mesh.centroids[tri2] - mesh.edge_midpoints[iface])
    n = np.where(towards_2[:, None] > 0, n, -n)
    mesh.interface_normals = n
    mesh.interface_tri1 = tri1
    mesh.interface_tri2 = tri2
    return mesh


def build_cartesian_mesh(level_inv: int) -> BipartiteMesh:
    """Uniform mesh of (2k)^2 square cells of side 1/k, split into triangles.

    Cells are split along the lower-left to upper-right diagonal; cells in
    quadrants Q1 and Q3 are tagged region 1, the others region 2.  Vertex
    coordinates are (i - k)/k so the axes and the outer boundary are hit
    exactly for any k.
    """
    if not isinstance(level_inv, (int, np.integer)) or level_inv < 1:
        raise ValueError("level_inv must be a positive integer")
    k = int(level_inv)
    n = 2 * k + 1
    coords = (np.arange(n) - k) / float(k)
    X, Y = np.meshgrid(coords, coords, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    ci, cj = np.meshgrid(np.arange(2 * k), np.arange(2 * k), indexing="xy")
    ci = ci.ravel()
    cj = cj.ravel()
    v00 = cj * n + ci
    v10 = v00 + 1
    v01 = v00 + n
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * len(v00), 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    right = ci >= k
    top = cj >= k
    quadrant_cell = np.select(
        [right & top, ~right & top, ~right & ~top, right & ~top], [1, 2, 3, 4]
    )
    tri_quadrant = np.repeat(quadrant_cell, 2).astype(np.int8)
    tri_region = np.where(np.isin(tri_quadrant, (1, 3)), 1, 2).astype(np.int8)

    return _finish_mesh(k, vertices, triangles, tri_region, tri_quadrant)


def refine(m: BipartiteMesh) -> BipartiteMesh:
    """Halve the mesh size; every child triangle lies inside its parent."""
    return build_cartesian_mesh(2 * m.level_inv)


@dataclass
class ConsistencyReport:
    ok: bool
    violations: list = field(default_factory=list)  # (triangle id, reason)


# Strictly interior barycentric sample points, including near-vertex ones so
# thin overlaps with the wrong region are caught.
_SAMPLES = np.array(
    [[1 / 3, 1 / 3, 1 / 3]]
    + [np.roll([0.6, 0.2, 0.2], i) for i in range(3)]
    + [np.roll([0.9, 0.05, 0.05], i) for i in range(3)]
)


def validate_consistency(m: BipartiteMesh, tol: float = 1e-12) -> ConsistencyReport:
    """Check that every triangle lies wholly inside the region it is tagged with.

    A triangle violates consistency when its centroid's region disagrees
    with its tag or when interior sample points fall on both sides of the
    interface cross.
    """
    pts = np.einsum("si,tid->tsd", _SAMPLES, m.vertices[m.triangles])
    prod = pts[:, :, 0] * pts[:, :, 1]
    region = np.where(prod > tol, 1, np.where(prod < -tol, 2, 0))  # 0: on the cross
    violations = []
    for t in range(m.n_triangles):
        r = region[t][region[t] != 0]
        if r.size == 0:
            violations.append((t, "degenerate sampling on the interface"))
            continue
        if np.any(r != r[0]):
            violations.append((t, "straddles the interface"))
        elif r[0] != m.tri_region[t]:
            violations.append((t, "region tag mismatch"))
    return ConsistencyReport(ok=not violations, violations=violations)


def write_mesh_vtk(m: BipartiteMesh, path) -> None:
    """Dump the mesh as a legacy-VTK unstructured grid with region cell data."""
    write_unstructured_grid(
        path,
        m.vertices,
        m.triangles,
        title=f"bipartite mesh level {m.level_inv}",
        cell_scalars={"region": m.tri_region.astype(float)},
    )
