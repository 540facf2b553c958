"""Error norms, convergence studies and the quadrilateral mesh condition."""
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import assemble
from .errors import ParameterError
from .mesh import edge_vectors, mesh_center_jacobians, uniform_mesh
from .monotone import check_m_matrix
from .problem import check_spd, effective_coefficient_batch
from .quadparams import TOL_EQ
from .solve import solve_system

CSV_HEADER = "n,dof,l2,l2_order,linf,linf_order"


def nodal_errors(result, mesh, problem):
    """Discrete errors over interior nodes.

    ``linf = max |e_i|`` and ``l2 = h * sqrt(sum e_i^2)`` where ``h`` is
    ``sqrt(h1 * h2)`` for uniform meshes.
    """
    u = result.u if hasattr(result, "u") else np.asarray(result)
    I = mesh.interior_nodes
    x, y = mesh.vertices[I, 0], mesh.vertices[I, 1]
    e = u[I] - problem.eval_u(x, y)
    if e.size == 0:
        return 0.0, 0.0
    return float(mesh.h * np.sqrt(np.sum(e * e))), float(np.abs(e).max())


@dataclass
class ConvergenceRow:
    n: int
    dof: int
    l2: float = None
    linf: float = None
    l2_order: float = None
    linf_order: float = None
    certified: bool = True
    report: object = None
    iterations: int = 0


@dataclass
class ConvergenceTable:
    problem: str
    policy: str
    c: float
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    rows: list = field(default_factory=list)

    @property
    def certified(self):
        return all(r.certified for r in self.rows)

    def to_csv(self):
        def fmt(v):
            return "-" if v is None else f"{v:.6g}"
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(",".join([str(r.n), str(r.dof), fmt(r.l2), fmt(r.l2_order),
                                   fmt(r.linf), fmt(r.linf_order)]))
        return "\n".join(lines) + "\n"

    def to_dat(self):
        """Whitespace-separated columns for gnuplot-style tools."""
        x0, x1, y0, y1 = self.domain
        lines = [f"# problem={self.problem} policy={self.policy} c={self.c}",
                 "# h n dof l2 linf"]
        for r in self.rows:
            if r.l2 is not None:
                h = math.sqrt((x1 - x0) * (y1 - y0)) / r.n
                lines.append(f"{h:.6g} {r.n} {r.dof} {r.l2:.6g} {r.linf:.6g}")
        return "\n".join(lines) + "\n"


def _order(coarse, fine):
    if coarse is None or fine is None or coarse <= 0 or fine <= 0:
        return None
    return math.log2(coarse / fine)


def convergence_study(problem, levels, policy="upper", method="cg", rel_tol=1e-12):
    """Solve on ``n x n`` uniform meshes of ``problem.domain`` and tabulate errors.

    At least two levels, each double the previous. A level whose matrix
    fails M-matrix certification is recorded without errors, and orders
    across it are left empty.
    """
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise ParameterError("a convergence study needs at least two levels")
    for a, b in zip(levels, levels[1:]):
        if b != 2 * a:
            raise ParameterError(f"levels must double, got {a} -> {b}")

    table = ConvergenceTable(problem.name, policy, problem.c_value, tuple(problem.domain))
    prev = None
    for n in levels:
        mesh = uniform_mesh(n, n, problem.domain)
        system = assemble(mesh, problem, policy)
        report = check_m_matrix(system.A)
        row = ConvergenceRow(n, system.n, certified=report.certified, report=report)
        if report.certified:
            res = solve_system(system, method, rel_tol)
            row.l2, row.linf = nodal_errors(res, mesh, problem)
            row.iterations = res.iterations
            if prev is not None:
                row.l2_order = _order(prev.l2, row.l2)
                row.linf_order = _order(prev.linf, row.linf)
        table.rows.append(row)
        prev = row
    return table


# -- mesh condition --------------------------------------------------------------

@dataclass
class MeshConditionReport:
    values: np.ndarray        # (ne, 4) edge-vector quadratic forms
    tilde_values: np.ndarray  # (ne, 4) same quantities from a~, after common scaling
    element_pass: np.ndarray  # (ne,) bool
    strict: bool
    aspect_ratio: float = None  # recommended h1/h2 where a is constant on a rectangle mesh

    @property
    def passed(self):
        return bool(self.element_pass.all())

    @property
    def failing(self):
        return np.flatnonzero(~self.element_pass)

    def to_text(self):
        mode = "strict" if self.strict else "boundary-tolerant"
        lines = [f"mesh condition ({mode}): {'PASS' if self.passed else 'FAIL'} "
                 f"({int(self.element_pass.sum())}/{self.element_pass.size} elements pass)"]
        for e in self.failing[:20]:
            v = ", ".join(f"{x:.6g}" for x in self.values[e])
            lines.append(f"  element {e}: forms = ({v})")
        if self.aspect_ratio is not None:
            lines.append(f"  recommended aspect ratio h1/h2 = {self.aspect_ratio:.6g}")
        return "\n".join(lines)


def mesh_condition_check(mesh, problem, strict=False):
    """Evaluate the four edge-vector inequalities per element.

    With ``p = c0 + c2``, ``q = c1 + c3`` and ``M = abar^{-1}`` the forms are
    ``p.M(c0+c3)``, ``p.M(c0-c1)``, ``q.M(c0+c3)``, ``q.M(c1-c0)``; all must be
    positive (or >= -tol in boundary-tolerant mode). Up to the positive factor
    ``2C`` they equal ``a11-a12``, ``a11+a12``, ``a22-a12``, ``a22+a12`` of the
    effective coefficient, which is reported as ``tilde_values``.
    """
    corners = mesh.corners()
    e = edge_vectors(corners)
    c0, c1, c2, c3 = (e[:, k, :] for k in range(4))
    centers = corners.mean(axis=1)
    abar = np.array(problem.eval_a(centers[:, 0], centers[:, 1]), dtype=float)
    check_spd(abar)
    abar = 0.5 * (abar + np.swapaxes(abar, 1, 2))
    M = np.linalg.inv(abar)

    def form(u, v):
        return np.einsum("ei,eij,ej->e", u, M, v)

    p, q = c0 + c2, c1 + c3
    values = np.column_stack([form(p, c0 + c3), form(p, c0 - c1),
                              form(q, c0 + c3), form(q, c1 - c0)])

    DF = mesh_center_jacobians(mesh)
    J = DF[:, 0, 0] * DF[:, 1, 1] - DF[:, 0, 1] * DF[:, 1, 0]
    at = effective_coefficient_batch(DF, abar)
    a11, a12, a22 = at[:, 0, 0], at[:, 0, 1], at[:, 1, 1]
    C = np.linalg.det(abar) / (4 * J)
    tilde = np.column_stack([a11 - a12, a11 + a12, a22 - a12, a22 + a12]) / (2 * C[:, None])

    scale = form(p, p) + form(q, q)
    if strict:
        ok = (values > 0).all(axis=1)
    else:
        ok = (values >= -TOL_EQ * scale[:, None]).all(axis=1)

    ratio = None
    if mesh.uniform is not None:
        spread = np.ptp(abar.reshape(len(abar), -1), axis=0).max() if len(abar) else 0.0
        if spread <= 1e-12 * np.abs(abar).max():
            ratio = recommend_aspect_ratio(abar[0])
    return MeshConditionReport(values, tilde, ok, strict, ratio)


def recommend_aspect_ratio(abar):
    """``h1 / h2 = sqrt(a11 / a22)``; rectangles with this ratio satisfy the M-matrix condition."""
    abar = np.asarray(abar, dtype=float)
    check_spd(abar)
    return float(np.sqrt(abar[0, 0] / abar[1, 1]))
