import numpy as np
import pytest
import scipy.sparse as sp

from monoq1.assembly import assemble
from monoq1.errors import (DefinitenessError, DimensionCapError, NonConvergenceError,
                           SingularMatrixError)
from monoq1.mesh import uniform_mesh
from monoq1.problem import builtin_problem
from monoq1.solve import cg_solve, dense_solve, export_solution, solve_system

from oracles import five_point_laplacian


def test_identity_one_iteration():
    b = np.array([1.0, -2.0, 3.5])
    r = cg_solve(sp.identity(3, format="csr"), b)
    assert r.iterations == 1
    assert np.allclose(r.x, b)
    d = dense_solve(np.eye(3), b)
    assert np.allclose(d.x, b)


def test_laplacian_constructed_solution():
    A = sp.csr_matrix(five_point_laplacian(5))
    b = A @ np.ones(25)
    for r in (cg_solve(A, b), dense_solve(A, b)):
        assert np.allclose(r.x, 1.0, rtol=1e-11)
        assert r.residual <= 1e-12


def test_sec6_16_cross_check():
    p = builtin_problem("paper-sec6")
    s = assemble(uniform_mesh(16, 16, p.domain), p)
    c = cg_solve(s.A, s.b, rel_tol=1e-12)
    d = dense_solve(s.A, s.b)
    assert c.residual <= 1e-12
    assert np.linalg.norm(c.x - d.x) <= 1e-10 * np.linalg.norm(d.x)


def test_zero_rhs():
    r = cg_solve(sp.identity(4), np.zeros(4))
    assert r.iterations == 0 and not r.x.any()


def test_nonconvergence():
    A = sp.csr_matrix(five_point_laplacian(10))
    with pytest.raises(NonConvergenceError) as exc:
        cg_solve(A, np.ones(100), rel_tol=1e-14, max_iter=3)
    assert exc.value.residual > 1e-14


def test_indefinite_detected():
    A = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(DefinitenessError):
        cg_solve(A, np.array([1.0, 1.0]))
    B = np.array([[1.0, 3.0], [3.0, 1.0]])
    with pytest.raises(DefinitenessError):
        cg_solve(B, np.array([1.0, -1.0]))


def test_dense_errors():
    with pytest.raises(SingularMatrixError):
        dense_solve(np.zeros((2, 2)), np.ones(2))
    with pytest.raises(DimensionCapError):
        dense_solve(sp.identity(10), np.ones(10), cap=5)


@pytest.mark.parametrize("scale", [-3.0, 1e-6, 250.0])
def test_linearity(scale):
    p = builtin_problem("paper-sec6")
    s = assemble(uniform_mesh(8, 8, p.domain), p)
    u1 = cg_solve(s.A, s.b).x
    us = cg_solve(s.A, scale * s.b).x
    assert np.linalg.norm(us - scale * u1) <= 1e-12 * np.linalg.norm(scale * u1) * 10


def test_solve_system_fills_boundary(tmp_path):
    p = builtin_problem("poisson-sine")
    m = uniform_mesh(4, 4)
    s = assemble(m, p)
    r = solve_system(s, "cg")
    assert r.u.shape == (25,)
    assert np.array_equal(r.u[s.boundary], s.g_boundary)
    assert np.array_equal(r.u[s.interior], r.x)
    export_solution(m, r.u, tmp_path / "u.txt")
    rows = np.loadtxt(tmp_path / "u.txt")
    assert rows.shape == (25, 3)
    assert np.array_equal(rows[:, :2], m.vertices)
    assert np.array_equal(rows[:, 2], r.u)
