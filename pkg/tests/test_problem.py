import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monoq1.errors import CoefficientError, ParameterError, UnknownProblemError
from monoq1.mesh import element_geometry, general_mesh, uniform_mesh
from monoq1.problem import (ProblemSpec, builtin_problem, constant_coefficient,
                            effective_coefficient, effective_coefficient_edges,
                            parse_problem_name, rotated_tensor, sample_center)

from oracles import random_spd

PI = np.pi


def _one_element(corners):
    return element_geometry(general_mesh(corners, [[0, 1, 2, 3]]), 0)


def test_sample_identity():
    p = builtin_problem("poisson-sine")
    g = element_geometry(uniform_mesh(3, 3), 4)
    assert np.array_equal(sample_center(p, g), np.eye(2))


def test_sample_sec6_center():
    p = builtin_problem("paper-sec6")
    m = uniform_mesh(2, 2, (0, PI / 2 * 2, 0, PI / 2 * 2))
    # element whose center is (pi/2, pi/2) on a 1x1 mesh of [0, pi]^2
    g = element_geometry(uniform_mesh(1, 1, (0, PI, 0, PI)), 0)
    assert np.allclose(g.center, [PI / 2, PI / 2])
    k = 1 + 2.5 * PI ** 2 + PI / 2
    a = sample_center(p, g)
    assert a[0, 0] == pytest.approx(k, rel=1e-14)
    assert a[0, 1] == pytest.approx(k, rel=1e-14)
    assert a[1, 1] == pytest.approx(k + 1, rel=1e-14)
    assert m.n_elements == 4


def test_sample_rejects_indefinite():
    bad = ProblemSpec(a=lambda x, y: np.array([[1.0, 2.0], [2.0, 1.0]]),
                      c=lambda x, y: 0.0, f=lambda x, y: 0.0, g=lambda x, y: 0.0)
    g = element_geometry(uniform_mesh(2, 2), 3)
    with pytest.raises(CoefficientError, match="element 3"):
        sample_center(bad, g, element=3)


def test_sample_rejects_nonsymmetric():
    bad = ProblemSpec(a=lambda x, y: np.array([[2.0, 0.5], [0.1, 2.0]]),
                      c=lambda x, y: 0.0, f=lambda x, y: 0.0, g=lambda x, y: 0.0)
    with pytest.raises(CoefficientError):
        sample_center(bad, element_geometry(uniform_mesh(1, 1), 0))


def test_effective_unit_square():
    g = _one_element([[0, 0], [0, 1], [1, 1], [1, 0]])
    a = np.array([[3.0, -0.7], [-0.7, 2.0]])
    assert np.allclose(effective_coefficient(g, a), a, rtol=0, atol=1e-15)


def test_effective_rectangle_closed_form():
    h1, h2 = 0.5, 0.2
    g = _one_element([[0, 0], [0, h2], [h1, h2], [h1, 0]])
    a = np.array([[3.0, -0.7], [-0.7, 2.0]])
    expect = np.array([[h2 / h1 * 3.0, -0.7], [-0.7, h1 / h2 * 2.0]])
    at = effective_coefficient(g, a)
    assert np.allclose(at, expect, rtol=1e-14)
    assert at[0, 1] == pytest.approx(-0.7, rel=1e-15)


def test_effective_parallelogram():
    s = 0.6
    g = _one_element([[0, 0], [s, 1], [1 + s, 1], [1, 0]])
    expect = np.array([[1 + s * s, -s], [-s, 1]])
    assert np.allclose(effective_coefficient(g, np.eye(2)), expect, rtol=1e-14)
    assert np.allclose(effective_coefficient_edges(g.edges, np.eye(2)), expect, rtol=1e-14)


def _random_quad(rng):
    # convex perturbation of a rotated, stretched square
    base = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=float)
    base += rng.uniform(-0.2, 0.2, (4, 2))
    S = np.diag(rng.uniform(0.2, 3.0, 2))
    th = rng.uniform(0, 2 * PI)
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    return base @ (R @ S).T


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32 - 1))
def test_effective_two_routes_agree_and_spd(seed):
    rng = np.random.default_rng(seed)
    g = _one_element(_random_quad(rng))
    a = random_spd(rng)
    at = effective_coefficient(g, a)
    ae = effective_coefficient_edges(g.edges, a)
    assert np.allclose(at, ae, rtol=1e-12, atol=1e-12 * np.abs(ae).max())
    assert at[0, 0] > 0 and np.linalg.det(at) > 0
    np.linalg.cholesky(at)


def test_sec6_exact_solution():
    p = builtin_problem("paper-sec6")
    assert p.eval_u(PI / 2, PI / 4) == pytest.approx(-0.5, abs=1e-15)
    t = np.linspace(0, PI, 33)
    for x, y in [(t, 0 * t), (t, PI + 0 * t), (0 * t, t), (PI + 0 * t, t)]:
        assert np.abs(p.eval_u(x, y)).max() <= 1e-15


def test_sec6_equality_structure():
    p = builtin_problem("paper-sec6")
    m = uniform_mesh(16, 16, p.domain)
    cen = m.corners().mean(axis=1)
    a = p.eval_a(cen[:, 0], cen[:, 1])
    assert np.array_equal(a[:, 0, 1], a[:, 0, 0])
    assert np.array_equal(a[:, 0, 1], np.minimum(a[:, 0, 0], a[:, 1, 1]))
    assert p.c_value == 1.0


def _fd_residual(p, step, x, y):
    """-div(a grad u) + c u by nested central differences, minus f."""
    def flux(x, y):
        ux = (p.eval_u(x + step, y) - p.eval_u(x - step, y)) / (2 * step)
        uy = (p.eval_u(x, y + step) - p.eval_u(x, y - step)) / (2 * step)
        a = p.eval_a(x, y)
        return a[..., 0, 0] * ux + a[..., 0, 1] * uy, a[..., 1, 0] * ux + a[..., 1, 1] * uy

    div = ((flux(x + step, y)[0] - flux(x - step, y)[0])
           + (flux(x, y + step)[1] - flux(x, y - step)[1])) / (2 * step)
    return -div + p.eval_c(x, y) * p.eval_u(x, y) - p.eval_f(x, y)


@pytest.mark.parametrize("name", ["paper-sec6", "poisson-sine",
                                  "constant-anisotropic(a11=4, a12=1.9, a22=1)",
                                  "constant-anisotropic(0.4, 7)"])
@pytest.mark.parametrize("c", [0.0, 1.0])
def test_load_consistent_with_flux_finite_differences(name, c):
    p = builtin_problem(name, c=c)
    x0, x1, y0, y1 = p.domain
    X, Y = np.meshgrid(np.linspace(x0, x1, 41)[1:-1], np.linspace(y0, y1, 41)[1:-1])
    e1 = np.abs(_fd_residual(p, 2e-3, X, Y)).max()
    e2 = np.abs(_fd_residual(p, 1e-3, X, Y)).max()
    scale = np.abs(p.eval_f(X, Y)).max()
    assert e2 <= 1e-4 * scale
    assert 0.2 <= e2 / e1 <= 0.3   # second order in the step


def test_sec6_load_matches_symbolic():
    sympy = pytest.importorskip("sympy")
    x, y = sympy.symbols("x y")
    k = 1 + 10 * y ** 2 + x * sympy.cos(y) + y
    u = -sympy.sin(x) ** 2 * sympy.sin(y) * sympy.cos(y)
    ux, uy = sympy.diff(u, x), sympy.diff(u, y)
    f = -(sympy.diff(k * ux + k * uy, x) + sympy.diff(k * ux + (k + 1) * uy, y)) + u
    fn = sympy.lambdify((x, y), f, "numpy")
    rng = np.random.default_rng(0)
    X, Y = rng.uniform(0, PI, (2, 500))
    p = builtin_problem("paper-sec6", c=1.0)
    assert np.allclose(p.eval_f(X, Y), fn(X, Y), rtol=1e-12, atol=1e-11)


def test_poisson_sine_load():
    p = builtin_problem("poisson-sine")
    assert p.eval_f(0.5, 0.5) == pytest.approx(2 * PI ** 2, rel=1e-15)
    assert p.domain == (0.0, 1.0, 0.0, 1.0)
    assert np.array_equal(p.eval_a(0.3, 0.2), np.eye(2))


def test_constant_anisotropic_forms():
    p = builtin_problem("constant-anisotropic(theta=0.5, ratio=10)")
    assert np.allclose(p.eval_a(0.1, 0.2), rotated_tensor(0.5, 10))
    assert np.allclose(np.linalg.eigvalsh(rotated_tensor(0.5, 10)), [1, 10])
    q = builtin_problem("constant-anisotropic(a11=4, a12=1.9, a22=1)", domain=(0, 2, 0, 1))
    assert np.array_equal(q.eval_a(0.0, 0.0), [[4, 1.9], [1.9, 1]])
    assert q.domain == (0, 2, 0, 1)


def test_unknown_and_bad_names():
    with pytest.raises(UnknownProblemError):
        builtin_problem("nope")
    with pytest.raises(UnknownProblemError):
        parse_problem_name("constant-anisotropic(a=b)")
    with pytest.raises(ParameterError):
        builtin_problem("paper-sec6", domain=(0, 1, 0, 1))
    with pytest.raises(CoefficientError):
        constant_coefficient([[1, 2], [2, 1]])
