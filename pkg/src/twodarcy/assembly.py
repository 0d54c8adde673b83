"""Sparse assembly of the saddle-point operators and load functionals.

The global system acts on [u1, p2, phi, p1] as

    [[A, -B^T], [B, C]] [x; y] = [F1; F2]

where A couples the region-1 flux with the region-2 pressure trace on the
interface, B carries the divergence and gradient pairings, and C is the
weighted potential stiffness.  Signs follow the expanded weak statements of
the two equations, with the interface convention that the normal points
from region 1 into region 2: the (p2-row, u1-column) coupling enters with a
minus sign and its transpose with a plus sign.

Bilinear blocks use a degree-2 rule (exact for the piecewise-polynomial
integrands with region-constant coefficients).  Volume sources are
integrated with the one-point centroid rule, the verification convention
for lowest-order elements on structured grids: it makes the discrete flux
divergence equal the centroid-sampled source exactly, so the cell-sampled
divergence error vanishes.  Interface line integrals and gravity-type
forcing use the 6-point Gauss and degree-10 rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .mesh import BipartiteMesh
from .quadrature import segment_rule, triangle_rule
from .spaces import DofLayout, hat_gradients

__all__ = [
    "AdmissibilityError",
    "CoefficientSet",
    "SaddleSystem",
    "assemble_A",
    "assemble_B",
    "assemble_C",
    "assemble_rhs",
    "assemble_system",
    "write_matrix_market",
]

BLOCK_RULE = triangle_rule(2)
TRACE_RULE = segment_rule(2)
LOAD_RULE = triangle_rule(10)
LINE_RULE = segment_rule(11)  # 6-point Gauss


class AdmissibilityError(ValueError):
    """A coefficient set violates the positivity requirements."""


@dataclass(frozen=True)
class CoefficientSet:
    """Flow resistance ``a(x, y, region)`` and interface storage ``beta(x, y)``.

    ``a`` must be strictly positive; ``beta`` nonnegative with a positive
    line integral over the interface.
    """

    a: Callable
    beta: Callable

    @staticmethod
    def region_constants(a1: float, a2: float, beta: float = 1.0) -> "CoefficientSet":
        def a(x, y, region):
            return np.full_like(np.asarray(x, dtype=float), a1 if region == 1 else a2)

        def b(x, y):
            return np.full_like(np.asarray(x, dtype=float), beta)

        return CoefficientSet(a=a, beta=b)

    def validate(self, m: BipartiteMesh) -> None:
        pts = np.einsum("qi,tid->tqd", BLOCK_RULE.points, m.vertices[m.triangles])
        for region in (1, 2):
            sel = m.tri_region == region
            a_vals = self.a(pts[sel, :, 0], pts[sel, :, 1], region)
            if np.any(~np.isfinite(a_vals)) or np.any(a_vals <= 0.0):
                raise AdmissibilityError("flow resistance a must be positive and finite")
        total = 0.0
        for e in m.interface_edges:
            seg = m.vertices[m.edges[e]]
            x = seg[0] + np.outer(LINE_RULE.points, seg[1] - seg[0])
            b_vals = np.asarray(self.beta(x[:, 0], x[:, 1]), dtype=float)
            if np.any(b_vals < 0.0):
                raise AdmissibilityError("interface storage beta must be nonnegative")
            total += m.edge_lengths[e] * float(LINE_RULE.weights @ b_vals)
        if total <= 0.0:
            raise AdmissibilityError("interface storage beta must have a positive line integral")


# ---------------------------------------------------------------------------
# Elementary matrices (also reused by the well-posedness diagnostics).


def _region_points(m, tris, rule):
    coords = m.vertices[m.triangles[tris]]
    return coords, np.einsum("qi,tid->tqd", rule.points, coords)


def rt0_mass(m: BipartiteMesh, layout: DofLayout, a: Callable | None = None) -> sp.csr_matrix:
    """a-weighted mass matrix of the flux basis over region 1."""
    tris = layout.p1_triangles
    coords, pts = _region_points(m, tris, BLOCK_RULE)
    areas = m.areas[tris]
    signs = m.tri_edge_signs[tris]
    aq = np.ones(pts.shape[:2]) if a is None else np.asarray(a(pts[..., 0], pts[..., 1], 1), dtype=float)
    phi = (signs[:, :, None, None] / (2.0 * areas)[:, None, None, None]) * (
        pts[:, None, :, :] - coords[:, :, None, :]
    )
    local = 2.0 * areas[:, None, None] * np.einsum(
        "q,tq,tiqd,tjqd->tij", BLOCK_RULE.weights, aq, phi, phi
    )
    dofs = layout.edge_to_u1[m.tri_edges[tris]]
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(layout.n_u1, layout.n_u1)).tocsr()


def rt0_divdiv(m: BipartiteMesh, layout: DofLayout) -> sp.csr_matrix:
    """Divergence-divergence matrix of the flux basis (H_div norm part)."""
    tris = layout.p1_triangles
    signs = m.tri_edge_signs[tris].astype(float)
    local = np.einsum("ti,tj->tij", signs, signs) / m.areas[tris][:, None, None]
    dofs = layout.edge_to_u1[m.tri_edges[tris]]
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(layout.n_u1, layout.n_u1)).tocsr()


_P1_MASS_REF = (np.full((3, 3), 1.0) + np.eye(3)) / 12.0


def p1_mass_omega2(m: BipartiteMesh, layout: DofLayout) -> sp.csr_matrix:
    """Plain nodal mass matrix over region 2."""
    tris = layout.u2_triangles
    local = m.areas[tris][:, None, None] * _P1_MASS_REF[None, :, :]
    dofs = layout.vert_to_p2[m.triangles[tris]]
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(layout.n_p2, layout.n_p2)).tocsr()


def p1_stiffness_omega2(
    m: BipartiteMesh,
    layout: DofLayout,
    a: Callable | None = None,
    rows_phi: bool = False,
    cols_phi: bool = False,
) -> sp.csr_matrix:
    """(a-weighted) nodal stiffness over region 2, optionally on potential dofs."""
    tris = layout.u2_triangles
    areas = m.areas[tris]
    grads = hat_gradients(m)[tris]
    if a is None:
        weight = areas
    else:
        _, pts = _region_points(m, tris, BLOCK_RULE)
        aq = np.asarray(a(pts[..., 0], pts[..., 1], 2), dtype=float)
        weight = 2.0 * areas * (aq @ BLOCK_RULE.weights)
    local = weight[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    verts = m.triangles[tris]
    rmap = layout.vert_to_phi if rows_phi else layout.vert_to_p2
    cmap = layout.vert_to_phi if cols_phi else layout.vert_to_p2
    rows = np.repeat(rmap[verts], 3, axis=1).ravel()
    cols = np.tile(cmap[verts], (1, 3)).ravel()
    vals = local.ravel()
    keep = (rows >= 0) & (cols >= 0)
    nrows = layout.n_phi if rows_phi else layout.n_p2
    ncols = layout.n_phi if cols_phi else layout.n_p2
    return sp.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(nrows, ncols)).tocsr()


def _interface_geometry(m, pos):
    e = m.interface_edges[pos]
    seg = m.vertices[m.edges[e]]
    length = m.edge_lengths[e]
    orient = float(np.dot(m.edge_normals[e], m.interface_normals[pos]))
    return e, seg, length, (1.0 if orient > 0 else -1.0)


# ---------------------------------------------------------------------------
# Operator blocks.


def assemble_A(
    m: BipartiteMesh, layout: DofLayout, coeffs: CoefficientSet, check: bool = True
) -> sp.csr_matrix:
    """Flux mass, interface trace mass and the skew interface coupling."""
    if check:
        coeffs.validate(m)
    n_u1, n_p2 = layout.n_u1, layout.n_p2
    m_a = rt0_mass(m, layout, coeffs.a)

    rows, cols, vals = [], [], []
    s_rows, s_cols, s_vals = [], [], []
    hat = np.column_stack([1.0 - TRACE_RULE.points, TRACE_RULE.points])
    line_hat = np.column_stack([1.0 - LINE_RULE.points, LINE_RULE.points])
    for pos in range(len(m.interface_edges)):
        e, seg, length, s_e = _interface_geometry(m, pos)
        p2 = layout.vert_to_p2[m.edges[e]]
        x = seg[0] + np.outer(TRACE_RULE.points, seg[1] - seg[0])
        b_vals = np.asarray(coeffs.beta(x[:, 0], x[:, 1]), dtype=float)
        local = length * np.einsum("q,q,qi,qj->ij", TRACE_RULE.weights, b_vals, hat, hat)
        for i in range(2):
            for j in range(2):
                rows.append(p2[i])
                cols.append(p2[j])
                vals.append(local[i, j])
        # Normal trace of the edge's own flux basis is s_e / length, so the
        # coupling entries are +-1/2 independent of the mesh size.
        r = layout.edge_to_u1[e]
        couple = s_e * (LINE_RULE.weights @ line_hat)
        for j in range(2):
            s_rows.append(r)
            s_cols.append(p2[j])
            s_vals.append(couple[j])

    m_beta = sp.coo_matrix((vals, (rows, cols)), shape=(n_p2, n_p2))
    s = sp.coo_matrix((s_vals, (s_rows, s_cols)), shape=(n_u1, n_p2))
    return sp.bmat([[m_a, s], [-s.T, m_beta]], format="csr")


def assemble_B(m: BipartiteMesh, layout: DofLayout) -> sp.csr_matrix:
    """Divergence pairing with p1 and gradient pairing with the potential."""
    g = p1_stiffness_omega2(m, layout, rows_phi=True)        # (n_phi, n_p2)
    tris = layout.p1_triangles
    dof_rows = np.repeat(layout.tri_to_p1[tris], 3)
    dof_cols = layout.edge_to_u1[m.tri_edges[tris]].ravel()
    vals = m.tri_edge_signs[tris].astype(float).ravel()      # integral of div = sign
    d = sp.coo_matrix((vals, (dof_rows, dof_cols)), shape=(layout.n_p1, layout.n_u1))
    return sp.bmat([[None, g], [d, None]], format="csr")


def assemble_C(m: BipartiteMesh, layout: DofLayout, coeffs: CoefficientSet) -> sp.csr_matrix:
    """a-weighted potential stiffness; the p1 block is zero."""
    k_a = p1_stiffness_omega2(m, layout, a=coeffs.a, rows_phi=True, cols_phi=True)
    return sp.block_diag(
        [k_a, sp.csr_matrix((layout.n_p1, layout.n_p1))], format="csr"
    )


def assemble_rhs(m: BipartiteMesh, layout: DofLayout, case) -> tuple[np.ndarray, np.ndarray]:
    """Load vectors over the [u1, p2] and [phi, p1] test blocks.

    ``case`` provides F, g and interface data as evaluable fields; the g
    terms are skipped when the case declares no gravity-type forcing.
    Volume sources are sampled at centroids (one-point rule).
    """
    f1 = np.zeros(layout.n_x)
    f2 = np.zeros(layout.n_y)

    # Region-2 volume source against the pressure hats (centroid rule:
    # |K|/3 * F(c) to each vertex).
    tris2 = layout.u2_triangles
    areas2 = m.areas[tris2]
    c2 = m.centroids[tris2]
    f_vals = np.asarray(case.F_at(c2[:, 0], c2[:, 1]), dtype=float)
    np.add.at(
        f1,
        layout.offset_p2 + layout.vert_to_p2[m.triangles[tris2]].ravel(),
        np.repeat(areas2 * f_vals / 3.0, 3),
    )

    # Region-1 volume source against the cell constants.
    tris1 = layout.p1_triangles
    areas1 = m.areas[tris1]
    c1 = m.centroids[tris1]
    f2[layout.n_phi + layout.tri_to_p1[tris1]] = areas1 * np.asarray(
        case.F_at(c1[:, 0], c1[:, 1]), dtype=float
    )

    if case.g is not None:
        coords1, pts1 = _region_points(m, tris1, LOAD_RULE)
        coords2, pts2 = _region_points(m, tris2, LOAD_RULE)
        q1 = _quadrants_of(pts1)
        g1 = case.g(pts1[..., 0], pts1[..., 1], q1)
        signs = m.tri_edge_signs[tris1]
        phi = (signs[:, :, None, None] / (2.0 * areas1)[:, None, None, None]) * (
            pts1[:, None, :, :] - coords1[:, :, None, :]
        )
        vol = 2.0 * areas1[:, None] * np.einsum("q,tqd,tiqd->ti", LOAD_RULE.weights, g1, phi)
        np.add.at(f1, layout.edge_to_u1[m.tri_edges[tris1]].ravel(), -vol.ravel())

        q2 = _quadrants_of(pts2)
        g2 = case.g(pts2[..., 0], pts2[..., 1], q2)
        grads = hat_gradients(m)[tris2]
        gmean = 2.0 * areas2[:, None] * np.einsum("q,tqd->td", LOAD_RULE.weights, g2)
        vol2 = np.einsum("td,tid->ti", gmean, grads)
        rows = layout.vert_to_phi[m.triangles[tris2]].ravel()
        vals = -vol2.ravel()
        keep = rows >= 0
        np.add.at(f2, rows[keep], vals[keep])

    line_hat = np.column_stack([1.0 - LINE_RULE.points, LINE_RULE.points])
    for pos in range(len(m.interface_edges)):
        e, seg, length, s_e = _interface_geometry(m, pos)
        x = seg[0] + np.outer(LINE_RULE.points, seg[1] - seg[0])
        stress = np.asarray(case.f_stress(x[:, 0], x[:, 1]), dtype=float)
        flux = np.asarray(case.f_n(x[:, 0], x[:, 1]), dtype=float)
        f1[layout.edge_to_u1[e]] += s_e * float(LINE_RULE.weights @ stress)
        p2 = layout.vert_to_p2[m.edges[e]]
        f1[layout.offset_p2 + p2] -= length * (LINE_RULE.weights * flux) @ line_hat

    return f1, f2


def _quadrants_of(pts):
    x, y = pts[..., 0], pts[..., 1]
    return np.where(y > 0, np.where(x > 0, 1, 2), np.where(x > 0, 4, 3))


@dataclass
class SaddleSystem:
    """Assembled sparse blocks, load vectors and the originating layout."""

    A: sp.csr_matrix
    B: sp.csr_matrix
    Bt: sp.csr_matrix
    C: sp.csr_matrix
    F1: np.ndarray
    F2: np.ndarray
    mesh: BipartiteMesh
    layout: DofLayout
    diagnostics: dict = field(default_factory=dict)

    def matrix(self) -> sp.csr_matrix:
        return sp.bmat([[self.A, -self.Bt], [self.B, self.C]], format="csr")

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.F1, self.F2])

    @property
    def size(self) -> int:
        return self.layout.size


def assemble_system(m: BipartiteMesh, layout: DofLayout, case, check: bool = True) -> SaddleSystem:
    """Compose the four blocks and the load vectors for one case."""
    coeffs = case.coefficient_set()
    a = assemble_A(m, layout, coeffs, check=check)
    b = assemble_B(m, layout)
    c = assemble_C(m, layout, coeffs)
    f1, f2 = assemble_rhs(m, layout, case)
    n_u1 = layout.n_u1
    a12 = a[:n_u1, n_u1:]
    a21 = a[n_u1:, :n_u1]
    diagnostics = {
        "coupling_skew_defect": abs(a12 + a21.T).max() if a12.nnz else 0.0,
        "c_asymmetry": abs(c - c.T).max() if c.nnz else 0.0,
    }
    return SaddleSystem(
        A=a, B=b, Bt=b.T.tocsr(), C=c, F1=f1, F2=f2, mesh=m, layout=layout,
        diagnostics=diagnostics,
    )


def write_matrix_market(system: SaddleSystem, path) -> None:
    """Dump the composed saddle matrix in MatrixMarket coordinate format."""
    from scipy.io import mmwrite

    mmwrite(path, system.matrix().tocoo())
