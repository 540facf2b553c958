"""Global assembly of the monotone Q1 scheme.

Diffusion uses the mixed rule with per-element parameters applied to the
center-sampled effective coefficient. Reaction and load use the trapezoid
rule, which lumps them onto the vertices. Dirichlet nodes are eliminated, so
the returned matrix lives on interior nodes only.
"""
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .mesh import mesh_center_jacobians, mesh_vertex_jacobians
from .problem import check_spd, effective_coefficient_batch
from .quadparams import interval_batch, select_lambda_batch
from .reference import local_stiffness_batch, mixed_rule_1d


@dataclass(frozen=True)
class ElementRecord:
    abar: np.ndarray    # (ne, 2, 2)
    atilde: np.ndarray  # (ne, 2, 2)
    lam: np.ndarray     # (ne,) with lambda1 = lambda2 = lam
    low: np.ndarray
    high: np.ndarray
    forced: np.ndarray
    policy: str


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Interior system ``A u = b`` plus the pieces needed to rebuild it.

    ``stiffness`` is the diffusion block, ``mass`` the lumped trapezoid
    weights, ``coupling`` the interior-by-boundary diffusion block.
    """

    A: sp.csr_matrix
    b: np.ndarray
    stiffness: sp.csr_matrix
    mass: np.ndarray
    c_nodal: np.ndarray
    load: np.ndarray
    coupling: sp.csr_matrix
    interior: np.ndarray
    boundary: np.ndarray
    g_boundary: np.ndarray
    mesh: object
    record: ElementRecord

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def interior_map(self):
        """Mesh node index -> matrix row."""
        return {int(node): row for row, node in enumerate(self.interior)}

    def with_data(self, c_nodal=None, f_nodal=None, g_boundary=None):
        """Rebuild ``A`` and ``b`` for new nodal c, f (interior) and g (boundary) data."""
        c = self.c_nodal if c_nodal is None else np.asarray(c_nodal, float)
        load = self.load if f_nodal is None else self.mass * np.asarray(f_nodal, float)
        A = (self.stiffness + sp.diags(self.mass * c)).tocsr()
        A.sort_indices()
        out = replace(self, A=A, c_nodal=c, load=load)
        return apply_dirichlet(out, self.g_boundary if g_boundary is None else g_boundary)


def _scatter(n_nodes, elements, local):
    rows = np.repeat(elements, 4, axis=1).ravel()
    cols = np.tile(elements, (1, 4)).ravel()
    K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    K.sum_duplicates()
    K.sort_indices()
    return K


def assemble(mesh, problem, policy="upper", fixed_lambda=None):
    """Assemble the interior system for ``problem`` on ``mesh``.

    Raises CoefficientError, GeometryError, AdmissibilityError or
    EllipticityError naming the first offending element.

    ``fixed_lambda`` bypasses parameter selection and the admissibility
    check, using the given value on every element. It exists for experiments
    (e.g. plain trapezoid rule, deliberately non-monotone configurations).
    """
    corners = mesh.corners()
    DF = mesh_center_jacobians(mesh)
    centers = corners.mean(axis=1)
    abar = np.array(problem.eval_a(centers[:, 0], centers[:, 1]), dtype=float)
    check_spd(abar)
    abar = 0.5 * (abar + np.swapaxes(abar, 1, 2))
    atilde = effective_coefficient_batch(DF, abar)
    if fixed_lambda is None:
        lam, low, high, forced = select_lambda_batch(atilde, policy)
    else:
        mixed_rule_1d(fixed_lambda)  # domain check
        low, high = interval_batch(atilde)
        lam = np.full(len(atilde), float(fixed_lambda))
        forced = np.zeros(len(atilde), dtype=bool)
        policy = f"fixed({float(fixed_lambda)!r})"
    local = local_stiffness_batch(atilde, lam, lam)

    nn = mesh.n_vertices
    K = _scatter(nn, mesh.elements, local)

    vj = mesh_vertex_jacobians(mesh)
    lumped = np.bincount(mesh.elements.ravel(), weights=0.25 * vj.ravel(), minlength=nn)

    I, B = mesh.interior_nodes, mesh.boundary_nodes
    x, y = mesh.vertices[:, 0], mesh.vertices[:, 1]
    stiffness = K[I][:, I].tocsr()
    stiffness.eliminate_zeros()
    coupling = K[I][:, B].tocsr()
    mass = lumped[I]
    c_nodal = np.array(problem.eval_c(x[I], y[I]), dtype=float)
    f_nodal = np.array(problem.eval_f(x[I], y[I]), dtype=float)
    g = np.array(problem.eval_g(x[B], y[B]), dtype=float)

    A = (stiffness + sp.diags(mass * c_nodal)).tocsr()
    A.sort_indices()
    record = ElementRecord(abar, atilde, lam, low, high, forced, policy)
    system = AssembledSystem(A=A, b=mass * f_nodal, stiffness=stiffness, mass=mass,
                             c_nodal=c_nodal, load=mass * f_nodal, coupling=coupling,
                             interior=I, boundary=B, g_boundary=g, mesh=mesh, record=record)
    return apply_dirichlet(system, g)


def apply_dirichlet(system, g):
    """Return a copy with ``b = load - coupling @ g``.

    ``g`` is an array over ``system.boundary`` or a callable ``g(x, y)``.
    """
    B = system.boundary
    if callable(g):
        v = system.mesh.vertices[B]
        g = np.broadcast_to(np.asarray(g(v[:, 0], v[:, 1]), float), B.shape)
    g = np.array(g, dtype=float).reshape(B.shape)
    b = system.load - system.coupling @ g if B.size else system.load.copy()
    return replace(system, b=b, g_boundary=g)


# -- export ---------------------------------------------------------------------

def export_matrix(system_or_matrix, path):
    """Write 1-based ``row col value`` triplets in row-major order after a ``nrows ncols nnz`` header."""
    A = system_or_matrix.A if hasattr(system_or_matrix, "A") else system_or_matrix
    A = sp.csr_matrix(A)
    A.sort_indices()
    coo = A.tocoo()
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]} {A.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r + 1} {c + 1} {float(v)!r}\n")


def read_matrix(path):
    with open(path) as fh:
        nr, nc, nnz = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.empty((0, 3))
    if data.shape[0] != nnz:
        raise ValueError(f"{path}: header says {nnz} entries, found {data.shape[0]}")
    return sp.csr_matrix((data[:, 2], (data[:, 0].astype(int) - 1, data[:, 1].astype(int) - 1)),
                         shape=(nr, nc))


def export_vector(vec, path):
    vec = np.asarray(vec, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{vec.size}\n")
        for v in vec:
            fh.write(f"{float(v)!r}\n")


def read_vector(path):
    with open(path) as fh:
        n = int(fh.readline())
        vals = [float(line) for line in fh if line.strip()]
    if len(vals) != n:
        raise ValueError(f"{path}: header says {n} values, found {len(vals)}")
    return np.array(vals)
