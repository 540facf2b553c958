import numpy as np
import pytest

from monoq1.errors import GeometryError, MeshParseError, ParameterError
from monoq1.mesh import (edge_vectors, element_geometry, general_mesh, load_mesh, save_mesh,
                         uniform_mesh)


@pytest.mark.parametrize("n, nv, ne, ni", [(4, 25, 16, 9), (1, 4, 1, 0), (64, 65 ** 2, 64 ** 2, 63 ** 2)])
def test_uniform_counts(n, nv, ne, ni):
    m = uniform_mesh(n, n, (0, np.pi, 0, np.pi))
    assert (m.n_vertices, m.n_elements, m.interior_nodes.size) == (nv, ne, ni)


def test_uniform_rejects_zero():
    with pytest.raises(ParameterError):
        uniform_mesh(0, 3)
    with pytest.raises(ParameterError):
        uniform_mesh(2, 2, (0, 0, 0, 1))


def test_uniform_numbering_and_boundary():
    m = uniform_mesh(3, 2, (0, 3, 0, 2))
    assert np.array_equal(m.vertices[1], [1, 0])       # x fastest
    assert np.array_equal(m.vertices[4], [0, 1])
    x, y = m.vertices.T
    on = (x == 0) | (x == 3) | (y == 0) | (y == 2)
    assert np.array_equal(m.boundary_nodes, np.flatnonzero(on))
    assert np.array_equal(m.elements[0], [0, 4, 5, 1])  # c00, c01, c11, c10


def test_uniform_geometry_is_constant():
    m = uniform_mesh(5, 3, (0, 1, 0, 2))
    h1, h2 = 0.2, 2 / 3
    for e in range(m.n_elements):
        g = element_geometry(m, e)
        assert np.allclose(g.DF, np.diag([h1, h2]), atol=1e-15)
        assert g.J == pytest.approx(h1 * h2)


def _closure(mesh):
    e = edge_vectors(mesh.corners())
    return e[:, 1] + e[:, 2] - e[:, 3] - e[:, 0]


@pytest.mark.parametrize("n, dom", [(4, (0, np.pi, 0, np.pi)), (7, (0, 2, 0, 1)), (16, (-1, 1, 0, 3))])
def test_closure_identity_uniform(n, dom):
    assert not _closure(uniform_mesh(n, n, dom)).any()


def test_closure_identity_perturbed():
    rng = np.random.default_rng(3)
    m = uniform_mesh(6, 6)
    v = m.vertices.copy()
    v[m.interior_nodes] += rng.uniform(-0.03, 0.03, (m.interior_nodes.size, 2))
    assert np.abs(_closure(general_mesh(v, m.elements))).max() <= 1e-15


def test_unit_square_geometry():
    m = general_mesh([[0, 0], [0, 1], [1, 1], [1, 0]], [[0, 1, 2, 3]])
    g = element_geometry(m, 0)
    assert np.array_equal(g.DF, np.eye(2))
    assert g.J == 1.0
    assert np.array_equal(g.center, [0.5, 0.5])
    assert np.array_equal(m.boundary_nodes, [0, 1, 2, 3])


def test_rectangle_geometry():
    h1, h2 = 0.3, 0.7
    m = general_mesh([[0, 0], [0, h2], [h1, h2], [h1, 0]], [[0, 1, 2, 3]])
    g = element_geometry(m, 0)
    assert np.allclose(g.DF, np.diag([h1, h2]))
    assert g.J == pytest.approx(h1 * h2)


def test_parallelogram_geometry():
    s = 0.4
    m = general_mesh([[0, 0], [s, 1], [1 + s, 1], [1, 0]], [[0, 1, 2, 3]])
    g = element_geometry(m, 0)
    assert np.allclose(g.edges[0], [s, 1])
    assert np.allclose(g.DF, [[1, s], [0, 1]])
    assert g.J == pytest.approx(1.0)


def test_inverted_element_rejected():
    with pytest.raises(GeometryError, match="element 0"):
        general_mesh([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2, 3]])


def test_general_boundary_detection():
    m = uniform_mesh(3, 3)
    gm = general_mesh(m.vertices, m.elements)
    assert np.array_equal(gm.boundary_nodes, m.boundary_nodes)


def test_round_trip(tmp_path):
    m = uniform_mesh(4, 4, (0, np.pi, 0, np.pi))
    path = tmp_path / "m.txt"
    save_mesh(m, path)
    m2 = load_mesh(path)
    assert m.same_as(m2)
    assert m2.kind == "uniform"


def test_round_trip_general(tmp_path):
    rng = np.random.default_rng(0)
    m = uniform_mesh(3, 3)
    v = m.vertices.copy()
    v[m.interior_nodes] += rng.uniform(-0.05, 0.05, (m.interior_nodes.size, 2))
    gm = general_mesh(v, m.elements)
    save_mesh(gm, tmp_path / "g.txt")
    assert gm.same_as(load_mesh(tmp_path / "g.txt"))


def test_load_single_element(tmp_path):
    p = tmp_path / "one.txt"
    p.write_text("# unit square\n4 1\n0 0\n0 1\n1 1\n1 0\n0 1 2 3\n")
    m = load_mesh(p)
    assert m.n_vertices == 4 and m.n_elements == 1
    assert m.interior_nodes.size == 0


def _write(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    return p


def test_index_out_of_range(tmp_path):
    m = uniform_mesh(4, 4)
    save_mesh(m, tmp_path / "ok.txt")
    lines = (tmp_path / "ok.txt").read_text().splitlines()
    # header comment, header, 25 vertices, then elements
    lines[2 + 25] = "0 1 99 3"
    p = _write(tmp_path, "\n".join(lines) + "\n")
    with pytest.raises(MeshParseError, match="index out of range") as exc:
        load_mesh(p)
    assert exc.value.line == 28


@pytest.mark.parametrize("text, line", [
    ("4\n", 1),
    ("4 1\n0 0\n0 x\n1 1\n1 0\n0 1 2 3\n", 3),
    ("4 1\n0 0\n0 1\n1 1\n1 0\n0 1 2\n", 6),
    ("4 1\n0 0\n0 1\n1 1\n", 4),
    ("4 1\n0 0\n1 0\n1 1\n0 1\n0 1 2 3\n", 6),   # clockwise -> inverted
    ("4 1\n0 0\n0 1\n1 1\n1 0\n0 1 1 3\n", 6),   # repeated vertex
    ("4 1\n0 0\n0 1\n1 1\n1 0\n0 1 2 3\nB 0 7\n", 7),
])
def test_parse_errors_carry_line(tmp_path, text, line):
    with pytest.raises(MeshParseError) as exc:
        load_mesh(_write(tmp_path, text))
    assert exc.value.line == line
