"""Solvers for the assembled SPD system: Jacobi-preconditioned CG and a dense oracle."""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import (DefinitenessError, DimensionCapError, NonConvergenceError,
                     SingularMatrixError)

DENSE_CAP = 4096


@dataclass(frozen=True)
class SolveResult:
    """``x`` solves the interior system; ``u`` is the full nodal vector when known."""

    x: np.ndarray
    iterations: int
    residual: float
    method: str
    u: np.ndarray = None


def _relres(A, x, b):
    nb = np.linalg.norm(b)
    r = np.linalg.norm(b - A @ x)
    return r / nb if nb > 0 else r


def cg_solve(A, b, rel_tol=1e-12, max_iter=None):
    """Jacobi-preconditioned conjugate gradients from a zero initial guess."""
    A = sp.csr_matrix(A) if sp.issparse(A) else np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.size
    if max_iter is None:
        max_iter = max(20 * n, 1)
    x = np.zeros(n)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return SolveResult(x, 0, 0.0, "cg")

    d = A.diagonal()
    if np.any(~(d > 0)):
        raise DefinitenessError("nonpositive diagonal entry; Jacobi preconditioner undefined")
    dinv = 1.0 / d

    r = b.copy()
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for it in range(1, max_iter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise DefinitenessError(f"p^T A p = {pAp:.3e} <= 0 at iteration {it}")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        if np.linalg.norm(r) <= rel_tol * nb:
            # recurrence drifts from the true residual; confirm it
            true = _relres(A, x, b)
            if true <= rel_tol:
                return SolveResult(x, it, true, "cg")
            r = b - A @ x
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    res = _relres(A, x, b)
    raise NonConvergenceError(f"CG did not converge in {max_iter} iterations "
                              f"(relative residual {res:.3e})", residual=res, iterations=max_iter)


def dense_solve(A, b, cap=DENSE_CAP):
    """Direct symmetric solve; reference oracle for :func:`cg_solve`."""
    n = A.shape[0]
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds dense cap {cap}")
    M = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            x = sla.solve(M, b, assume_a="sym")
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            raise SingularMatrixError(f"dense solve failed: {exc}") from None
    return SolveResult(x, 1, _relres(M, x, b), "dense")


def solve_system(system, method="cg", rel_tol=1e-12, max_iter=None):
    """Solve an :class:`~monoq1.assembly.AssembledSystem`, returning full nodal values in ``u``."""
    if method == "cg":
        res = cg_solve(system.A, system.b, rel_tol, max_iter)
    elif method == "dense":
        res = dense_solve(system.A, system.b)
    else:
        raise ValueError(f"unknown method {method!r}")
    u = np.zeros(system.mesh.n_vertices)
    u[system.interior] = res.x
    u[system.boundary] = system.g_boundary
    return SolveResult(res.x, res.iterations, res.residual, res.method, u)


def export_solution(mesh, u, path):
    """One ``x y value`` line per node in mesh order (lexicographic for uniform meshes)."""
    with open(path, "w") as fh:
        for (x, y), v in zip(mesh.vertices, u):
            fh.write(f"{float(x)!r} {float(y)!r} {float(v)!r}\n")
