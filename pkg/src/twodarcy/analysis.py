"""Error norms, convergence rates and study drivers.

Error columns are cell-sampled discrete norms: discrete and exact fields
are compared at element centroids and accumulated as
e^2 = sum_K |K| |err(c_K)|^2.  This is the verification convention for
lowest-order pairs on structured grids; the cellwise pressure and the flux
superconverge at centroids, which the plain L2 distance would hide.  The
divergence part of the H_div error compares the discrete flux divergence
with the centroid-sampled source; with the centroid-rule loads these agree
to solver tolerance, so the H_div column coincides with the L2 column.

Exact-solution norms (denominators of the relative errors) are continuous
L2/H1/H_div norms computed with a high-order triangle rule.  Relative
errors follow the h-scaled convention of the constant-flux study:
100 * error * h / exact-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import assemble_system
from .manufactured import ManufacturedCase, quadrants_of
from .mesh import BipartiteMesh, build_cartesian_mesh
from .quadrature import segment_rule, triangle_rule
from .solver import SolutionFields, solve, x_norm_gram, y_norm_gram
from .spaces import DofLayout, build_dof_layout, hat_gradients

__all__ = [
    "COLUMNS",
    "ErrorReport",
    "ConvergenceReport",
    "error_norms",
    "rate",
    "convergence_study",
    "write_csv",
    "interface_flux_residuals",
    "interpolate_exact",
    "dual_residual_norm",
    "u1_cell_values",
]

COLUMNS = ("p1", "p2_l2", "p2_h1", "u1_l2", "u1_hdiv", "u2")

CSV_HEADER = (
    "h_inv,e_p1,r_p1,e_p2_L2,r_p2_L2,e_p2_H1,r_p2_H1,"
    "e_u1_L2,r_u1_L2,e_u1_Hdiv,r_u1_Hdiv,e_u2,r_u2"
)


@dataclass(frozen=True)
class ErrorReport:
    """Error norms of one solve plus the matching exact-solution norms."""

    level_inv: int
    e_p1: float
    e_p2_l2: float
    e_p2_h1: float
    e_u1_l2: float
    e_u1_hdiv: float
    e_u2: float
    norm_p1: float
    norm_p2_l2: float
    norm_p2_h1: float
    norm_u1_l2: float
    norm_u1_hdiv: float
    norm_u2: float

    def errors(self) -> dict:
        return {
            "p1": self.e_p1,
            "p2_l2": self.e_p2_l2,
            "p2_h1": self.e_p2_h1,
            "u1_l2": self.e_u1_l2,
            "u1_hdiv": self.e_u1_hdiv,
            "u2": self.e_u2,
        }

    def relative(self) -> dict:
        """Percentage errors, h-scaled against the exact norms."""
        h = 1.0 / self.level_inv
        norms = {
            "p1": self.norm_p1,
            "p2_l2": self.norm_p2_l2,
            "p2_h1": self.norm_p2_h1,
            "u1_l2": self.norm_u1_l2,
            "u1_hdiv": self.norm_u1_hdiv,
            "u2": self.norm_u2,
        }
        return {k: 100.0 * e * h / norms[k] for k, e in self.errors().items()}


def _rt0_coefficients(sol: SolutionFields, m: BipartiteMesh, layout: DofLayout):
    tris = layout.p1_triangles
    signs = m.tri_edge_signs[tris].astype(float)
    return signs * sol.u1[layout.edge_to_u1[m.tri_edges[tris]]]


def u1_cell_values(sol: SolutionFields, m: BipartiteMesh) -> np.ndarray:
    """Flux field evaluated at the region-1 triangle centroids."""
    layout = sol.layout
    tris = layout.p1_triangles
    coords = m.vertices[m.triangles[tris]]
    areas = m.areas[tris]
    svec = _rt0_coefficients(sol, m, layout)
    centroid = coords.mean(axis=1)
    stot = svec.sum(axis=1)
    sp_ = np.einsum("ti,tid->td", svec, coords)
    return (stot[:, None] * centroid - sp_) / (2.0 * areas[:, None])


def error_norms(sol: SolutionFields, case: ManufacturedCase, m: BipartiteMesh,
                degree: int = 10) -> ErrorReport:
    """Cell-sampled error norms against the exact fields.

    ``degree`` controls only the rule used for the exact-solution norms;
    the error columns themselves are centroid-sampled discrete norms and
    carry no quadrature degree.
    """
    layout = sol.layout
    if len(layout.tri_to_p1) != m.n_triangles or layout.n_p1 != len(sol.p1):
        raise ValueError("solution fields do not belong to this mesh")
    rule = triangle_rule(degree)
    w = rule.weights

    # Region 1: cell pressure, flux and its divergence at centroids.
    tris = layout.p1_triangles
    coords = m.vertices[m.triangles[tris]]
    areas = m.areas[tris]
    c1 = m.centroids[tris]
    qc1 = quadrants_of(c1[:, 0], c1[:, 1])

    svec = _rt0_coefficients(sol, m, layout)
    stot = svec.sum(axis=1)
    sp_ = np.einsum("ti,tid->td", svec, coords)
    u1h_c = (stot[:, None] * c1 - sp_) / (2.0 * areas[:, None])
    div_h = stot / areas

    e_p1 = math.sqrt(float(areas @ (sol.p1 - case.p(c1[:, 0], c1[:, 1], qc1)) ** 2))
    e_u1 = math.sqrt(float(
        areas @ ((u1h_c - case.u(c1[:, 0], c1[:, 1], qc1)) ** 2).sum(axis=-1)
    ))
    e_div = math.sqrt(float(areas @ (div_h - case.F(c1[:, 0], c1[:, 1], qc1)) ** 2))

    # Region 2: nodal pressure, its gradient and the potential velocity.
    tris2 = layout.u2_triangles
    areas2 = m.areas[tris2]
    c2 = m.centroids[tris2]
    qc2 = quadrants_of(c2[:, 0], c2[:, 1])

    nodal = sol.p2[layout.vert_to_p2[m.triangles[tris2]]]
    p2h_c = nodal.mean(axis=1)
    grads = hat_gradients(m)[tris2]
    g2h = np.einsum("ti,tid->td", nodal, grads)

    e_p2 = math.sqrt(float(areas2 @ (p2h_c - case.p(c2[:, 0], c2[:, 1], qc2)) ** 2))
    e_semi = math.sqrt(float(
        areas2 @ ((g2h - case.grad_p(c2[:, 0], c2[:, 1], qc2)) ** 2).sum(axis=-1)
    ))
    e_u2 = math.sqrt(float(
        areas2 @ ((sol.u2 - case.u(c2[:, 0], c2[:, 1], qc2)) ** 2).sum(axis=-1)
    ))

    # Continuous norms of the exact solution (relative-error denominators).
    pts = np.einsum("qi,tid->tqd", rule.points, coords)
    x, y = pts[..., 0], pts[..., 1]
    q = quadrants_of(x, y)
    two_a = 2.0 * areas
    norm_p1 = math.sqrt(float(two_a @ ((case.p(x, y, q) ** 2) @ w)))
    norm_u1 = math.sqrt(float(two_a @ ((case.u(x, y, q) ** 2).sum(axis=-1) @ w)))
    norm_f = math.sqrt(float(two_a @ ((case.F(x, y, q) ** 2) @ w)))

    coords2 = m.vertices[m.triangles[tris2]]
    pts2 = np.einsum("qi,tid->tqd", rule.points, coords2)
    x2, y2 = pts2[..., 0], pts2[..., 1]
    q2 = quadrants_of(x2, y2)
    two_a2 = 2.0 * areas2
    norm_p2 = math.sqrt(float(two_a2 @ ((case.p(x2, y2, q2) ** 2) @ w)))
    norm_g2 = math.sqrt(float(two_a2 @ ((case.grad_p(x2, y2, q2) ** 2).sum(axis=-1) @ w)))
    norm_u2 = math.sqrt(float(two_a2 @ ((case.u(x2, y2, q2) ** 2).sum(axis=-1) @ w)))

    return ErrorReport(
        level_inv=m.level_inv,
        e_p1=e_p1,
        e_p2_l2=e_p2,
        e_p2_h1=math.hypot(e_p2, e_semi),
        e_u1_l2=e_u1,
        e_u1_hdiv=math.hypot(e_u1, e_div),
        e_u2=e_u2,
        norm_p1=norm_p1,
        norm_p2_l2=norm_p2,
        norm_p2_h1=math.hypot(norm_p2, norm_g2),
        norm_u1_l2=norm_u1,
        norm_u1_hdiv=math.hypot(norm_u1, norm_f),
        norm_u2=norm_u2,
    )


def rate(e_coarse: float, e_fine: float) -> float:
    """Observed order between two consecutive mesh halvings."""
    if e_coarse <= 0.0 or e_fine <= 0.0:
        raise ValueError("rates need strictly positive errors")
    return (math.log(e_coarse) - math.log(e_fine)) / math.log(2.0)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-level error reports and the successive rates between them."""

    case_name: str
    reports: tuple
    rates: tuple  # first entry None, then {column: rate}

    def levels(self):
        return [r.level_inv for r in self.reports]


def convergence_study(case: ManufacturedCase, levels, degree: int = 10,
                      on_level=None) -> ConvergenceReport:
    """Full mesh -> assemble -> solve -> norms pipeline over a level sweep.

    ``levels`` must be strictly increasing powers of two.  ``on_level`` is
    an optional callback ``(level, mesh, layout, solution)`` invoked after
    each solve (used for field dumps).
    """
    levels = [int(k) for k in levels]
    for k in levels:
        if k < 1 or (k & (k - 1)) != 0:
            raise ValueError(f"levels must be powers of 2, got {k}")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")

    reports = []
    for k in levels:
        m = build_cartesian_mesh(k)
        layout = build_dof_layout(m)
        system = assemble_system(m, layout, case)
        sol = solve(system)
        reports.append(error_norms(sol, case, m, degree=degree))
        if on_level is not None:
            on_level(k, m, layout, sol)

    rates: list = [None]
    for prev, curr in zip(reports, reports[1:]):
        ep, ec = prev.errors(), curr.errors()
        rates.append({c: rate(ep[c], ec[c]) for c in COLUMNS})
    return ConvergenceReport(case_name=case.name, reports=tuple(reports), rates=tuple(rates))


def write_csv(report: ConvergenceReport, path) -> None:
    """One row per level: errors and successive rates, 6 significant digits."""
    lines = [CSV_HEADER]
    for rep, rates in zip(report.reports, report.rates):
        cells = [str(rep.level_inv)]
        errors = rep.errors()
        for col in COLUMNS:
            cells.append(f"{errors[col]:.6g}")
            cells.append("" if rates is None else f"{rates[col]:.6g}")
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii") as fp:
        fp.write("\n".join(lines) + "\n")


def interface_flux_residuals(sol: SolutionFields, case: ManufacturedCase,
                             m: BipartiteMesh) -> np.ndarray:
    """Weak normal-flux balance defect, integrated per interface edge."""
    layout = sol.layout
    rule = segment_rule(11)
    hat = np.column_stack([1.0 - rule.points, rule.points])
    out = np.empty(len(m.interface_edges))
    for pos, e in enumerate(m.interface_edges):
        seg = m.vertices[m.edges[e]]
        length = m.edge_lengths[e]
        n = m.interface_normals[pos]
        s_e = 1.0 if float(np.dot(m.edge_normals[e], n)) > 0 else -1.0
        u1n = s_e * sol.u1[layout.edge_to_u1[e]] / length
        u2n = float(sol.u2[layout.tri_to_u2[m.interface_tri2[pos]]] @ n)
        p2h = hat @ sol.p2[layout.vert_to_p2[m.edges[e]]]
        x = seg[0] + np.outer(rule.points, seg[1] - seg[0])
        f_n = np.asarray(case.f_n(x[:, 0], x[:, 1]), dtype=float)
        defect = u1n - u2n - case.beta * p2h - f_n
        out[pos] = length * float(rule.weights @ defect)
    return out


def _omega2_quadrant_of_vertex(x: float, y: float) -> int:
    """Region-2 quadrant whose closure contains the vertex."""
    if abs(x) < 1e-14:
        return 2 if y > 0 else 4
    if abs(y) < 1e-14:
        return 2 if x < 0 else 4
    return int(quadrants_of(x, y))


def interpolate_exact(case: ManufacturedCase, m: BipartiteMesh,
                      layout: DofLayout) -> np.ndarray:
    """Natural interpolant of the exact fields as a global dof vector.

    Edge dofs are exact integrated fluxes (region-1 one-sided values on the
    interface), the nodal pressure interpolates vertex values, the cell
    pressure takes cell means, and the potential is the nodal interpolant
    of the case's velocity potential shifted to vanish at the pinned
    vertex.
    """
    rule = segment_rule(11)
    x = np.zeros(layout.size)

    interface_pos = {int(e): pos for pos, e in enumerate(m.interface_edges)}
    for idx, e in enumerate(layout.u1_edges):
        pos = interface_pos.get(int(e))
        if pos is not None:
            quadrant = int(m.tri_quadrant[m.interface_tri1[pos]])
        else:
            quadrant = int(m.tri_quadrant[m.edge_tris[e, 0]])
        seg = m.vertices[m.edges[e]]
        pts = seg[0] + np.outer(rule.points, seg[1] - seg[0])
        u = case.u(pts[:, 0], pts[:, 1], quadrant)
        x[idx] = m.edge_lengths[e] * float(rule.weights @ (u @ m.edge_normals[e]))

    pin = layout.pinned_vertex
    px, py = m.vertices[pin]
    pin_value = float(case.potential_at(px, py, _omega2_quadrant_of_vertex(px, py)))
    for v in layout.p2_vertices:
        vx, vy = m.vertices[v]
        quadrant = _omega2_quadrant_of_vertex(vx, vy)
        x[layout.offset_p2 + layout.vert_to_p2[v]] = float(case.p(vx, vy, quadrant))
        if v != pin:
            x[layout.offset_phi + layout.vert_to_phi[v]] = (
                float(case.potential_at(vx, vy, quadrant)) - pin_value
            )

    # cell means of the exact pressure (its L2 projection onto constants)
    tris1 = layout.p1_triangles
    vol_rule = triangle_rule(10)
    pts = np.einsum("qi,tid->tqd", vol_rule.points, m.vertices[m.triangles[tris1]])
    q1 = quadrants_of(pts[..., 0], pts[..., 1])
    x[layout.offset_p1:] = 2.0 * (case.p(pts[..., 0], pts[..., 1], q1) @ vol_rule.weights)
    return x


def dual_residual_norm(system, x: np.ndarray) -> float:
    """Residual of a candidate vector in the discrete dual norm."""
    r = system.matrix() @ x - system.rhs()
    gram = sp.block_diag([x_norm_gram(system), y_norm_gram(system)], format="csc")
    z = spla.spsolve(gram, r)
    return math.sqrt(abs(float(r @ z)))
