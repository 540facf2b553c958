"""Quadrilateral meshes, per-element geometry and the plain-text mesh format.

Elements store their corners in the order ``c00, c01, c11, c10`` (the images
of the reference vertices). A valid element has ``det(DF) > 0`` at its
center, i.e. ``c00 -> c10 -> c11 -> c01`` runs counter-clockwise.

Mesh file layout::

    nv ne
    x y            (nv lines)
    i0 i1 i2 i3    (ne lines, zero-based)
    B j0 j1 ...    (optional boundary-node list)

Tokens are whitespace separated; ``#`` starts a comment. Uniform meshes are
saved with a ``# kind uniform nx ny x0 x1 y0 y1`` comment so that loading
restores their metadata.
"""
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, MeshParseError, ParameterError


@dataclass(frozen=True)
class UniformInfo:
    nx: int
    ny: int
    domain: tuple  # (x0, x1, y0, y1)

    @property
    def h(self):
        x0, x1, y0, y1 = self.domain
        return ((x1 - x0) / self.nx, (y1 - y0) / self.ny)


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray        # (nv, 2)
    elements: np.ndarray        # (ne, 4) int
    boundary_nodes: np.ndarray  # sorted int
    uniform: UniformInfo = None
    _interior: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        nv = self.vertices.shape[0]
        mask = np.ones(nv, dtype=bool)
        mask[self.boundary_nodes] = False
        object.__setattr__(self, "_interior", np.flatnonzero(mask))

    @property
    def kind(self):
        return "uniform" if self.uniform is not None else "general"

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def interior_nodes(self):
        return self._interior

    @property
    def h(self):
        """Characteristic size: sqrt(h1 * h2) on uniform meshes, else sqrt(mean area)."""
        if self.uniform is not None:
            h1, h2 = self.uniform.h
            return float(np.sqrt(h1 * h2))
        return float(np.sqrt(np.mean(element_jacobians(self))))

    def corners(self):
        """Corner coordinates, shape ``(ne, 4, 2)``."""
        return self.vertices[self.elements]

    def same_as(self, other):
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.elements, other.elements)
            and np.array_equal(self.boundary_nodes, other.boundary_nodes)
            and self.uniform == other.uniform
        )


@dataclass(frozen=True)
class ElementGeometry:
    edges: np.ndarray   # (4, 2): c0, c1, c2, c3
    DF: np.ndarray      # Jacobian of the bilinear map at (1/2, 1/2)
    J: float            # det(DF)
    center: np.ndarray  # image of (1/2, 1/2)


def uniform_mesh(nx, ny, domain=(0.0, 1.0, 0.0, 1.0)):
    """Tensor-product mesh of ``nx * ny`` congruent rectangles.

    Nodes are numbered lexicographically with x fastest:
    node ``(i, j)`` has index ``j * (nx + 1) + i``.
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise ParameterError(f"element counts must be positive integers, got ({nx}, {ny})")
    nx, ny = int(nx), int(ny)
    x0, x1, y0, y1 = map(float, domain)
    if not (x1 > x0 and y1 > y0):
        raise ParameterError(f"degenerate domain {domain!r}")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    n00 = j * (nx + 1) + i
    elements = np.column_stack([n00, n00 + nx + 1, n00 + nx + 2, n00 + 1])

    I, J = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    on_bnd = (I == 0) | (I == nx) | (J == 0) | (J == ny)
    boundary = np.flatnonzero(on_bnd.ravel())
    return Mesh(vertices, elements, boundary, UniformInfo(nx, ny, (x0, x1, y0, y1)))


def general_mesh(vertices, elements, boundary_nodes=None):
    """Build a mesh from raw arrays, validating orientation.

    Without ``boundary_nodes`` a node is on the boundary iff it lies on an
    edge owned by exactly one element.
    """
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
    elements = np.asarray(elements, dtype=np.int64).reshape(-1, 4)
    if boundary_nodes is None:
        boundary_nodes = detect_boundary(elements)
    boundary_nodes = np.unique(np.asarray(boundary_nodes, dtype=np.int64))
    mesh = Mesh(vertices, elements, boundary_nodes)
    _validate(mesh)
    return mesh


def detect_boundary(elements):
    counts = Counter()
    for el in np.asarray(elements):
        for k in range(4):
            a, b = int(el[k]), int(el[(k + 1) % 4])
            counts[(min(a, b), max(a, b))] += 1
    nodes = {n for edge, cnt in counts.items() if cnt == 1 for n in edge}
    return np.array(sorted(nodes), dtype=np.int64)


def edge_vectors(corners):
    """Edge vectors c0..c3 for corners in (c00, c01, c11, c10) order.

    ``corners`` has shape ``(..., 4, 2)``; the result has the same shape.
    """
    c00, c01, c11, c10 = (corners[..., k, :] for k in range(4))
    return np.stack([c01 - c00, c10 - c00, c11 - c10, c11 - c01], axis=-2)


def center_jacobians(corners):
    """``DF`` at the reference center, shape ``(..., 2, 2)``."""
    e = edge_vectors(corners)
    DF = np.empty(corners.shape[:-2] + (2, 2))
    DF[..., :, 0] = 0.5 * (e[..., 1, :] + e[..., 3, :])
    DF[..., :, 1] = 0.5 * (e[..., 0, :] + e[..., 2, :])
    return DF


def mesh_center_jacobians(mesh):
    """``DF`` at every element center; exactly ``diag(h1, h2)`` on uniform meshes."""
    if mesh.uniform is not None:
        DF = np.zeros((mesh.n_elements, 2, 2))
        DF[:, 0, 0], DF[:, 1, 1] = mesh.uniform.h
        return DF
    return center_jacobians(mesh.corners())


def mesh_vertex_jacobians(mesh):
    if mesh.uniform is not None:
        h1, h2 = mesh.uniform.h
        return np.full((mesh.n_elements, 4), h1 * h2)
    return vertex_jacobians(mesh.corners())


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def element_jacobians(mesh):
    return _det2(mesh_center_jacobians(mesh))


def vertex_jacobians(corners):
    """|J| of the bilinear map evaluated at each reference vertex, shape ``(..., 4)``.

    At a vertex the two columns of DF are the two edges leaving it.
    """
    c0, c1, c2, c3 = (edge_vectors(corners)[..., k, :] for k in range(4))

    def det(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    return np.abs(np.stack([det(c1, c0), det(c3, c0), det(c3, c2), det(c1, c2)], axis=-1))


def element_geometry(mesh, e):
    if not (0 <= e < mesh.n_elements):
        raise IndexError(f"element index {e} out of range [0, {mesh.n_elements})")
    corners = mesh.vertices[mesh.elements[e]]
    DF = np.diag(mesh.uniform.h) if mesh.uniform is not None else center_jacobians(corners)
    J = float(_det2(DF))
    if not J > 0:
        raise GeometryError(f"element {e} is degenerate or inverted (det DF = {J:.6g})", element=e)
    return ElementGeometry(edge_vectors(corners), DF, J, corners.mean(axis=0))


def _validate(mesh, line_of=None):
    nv = mesh.n_vertices
    bad = np.flatnonzero((mesh.elements < 0).any(axis=1) | (mesh.elements >= nv).any(axis=1))
    if bad.size:
        e = int(bad[0])
        raise MeshParseError(f"element {e}: vertex index out of range (nv = {nv})",
                             line_of(e) if line_of else None)
    for e, el in enumerate(mesh.elements):
        if len(set(el.tolist())) != 4:
            raise MeshParseError(f"element {e}: repeated vertex", line_of(e) if line_of else None)
    J = element_jacobians(mesh)
    bad = np.flatnonzero(~(J > 0))
    if bad.size:
        e = int(bad[0])
        msg = f"element {e}: degenerate or inverted geometry (det DF = {J[e]:.6g})"
        if line_of:
            raise MeshParseError(msg, line_of(e))
        raise GeometryError(msg, element=e)
    if mesh.boundary_nodes.size and (mesh.boundary_nodes.min() < 0 or mesh.boundary_nodes.max() >= nv):
        raise MeshParseError("boundary node index out of range")


# -- I/O ----------------------------------------------------------------------

def save_mesh(mesh, path):
    lines = []
    if mesh.uniform is not None:
        u = mesh.uniform
        dom = " ".join(repr(float(v)) for v in u.domain)
        lines.append(f"# kind uniform {u.nx} {u.ny} {dom}")
    lines.append(f"{mesh.n_vertices} {mesh.n_elements}")
    lines.extend(f"{float(x)!r} {float(y)!r}" for x, y in mesh.vertices)
    lines.extend(" ".join(str(int(i)) for i in el) for el in mesh.elements)
    lines.append("B " + " ".join(str(int(i)) for i in mesh.boundary_nodes))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mesh(path):
    with open(path) as fh:
        raw = fh.readlines()

    uniform = None
    rows = []  # (line number, tokens)
    for lineno, text in enumerate(raw, start=1):
        body, _, comment = text.partition("#")
        ctoks = comment.split()
        if len(ctoks) == 8 and ctoks[:2] == ["kind", "uniform"]:
            try:
                uniform = UniformInfo(int(ctoks[2]), int(ctoks[3]), tuple(float(t) for t in ctoks[4:]))
            except ValueError:
                raise MeshParseError("malformed uniform metadata comment", lineno) from None
        toks = body.split()
        if toks:
            rows.append((lineno, toks))

    if not rows:
        raise MeshParseError("empty mesh file")
    lineno, header = rows[0]
    try:
        if len(header) != 2:
            raise ValueError
        nv, ne = int(header[0]), int(header[1])
        if nv < 0 or ne < 0:
            raise ValueError
    except ValueError:
        raise MeshParseError("malformed header, expected 'nv ne'", lineno) from None

    body = rows[1:]
    if len(body) < nv + ne:
        last = rows[-1][0]
        raise MeshParseError(f"expected {nv} vertex and {ne} element lines, found {len(body)} lines",
                             last)

    vertices = np.empty((nv, 2))
    for k in range(nv):
        lineno, toks = body[k]
        try:
            if len(toks) != 2:
                raise ValueError
            vertices[k] = [float(toks[0]), float(toks[1])]
        except ValueError:
            raise MeshParseError("malformed vertex line, expected 'x y'", lineno) from None

    elements = np.empty((ne, 4), dtype=np.int64)
    el_lines = []
    for k in range(ne):
        lineno, toks = body[nv + k]
        el_lines.append(lineno)
        try:
            if len(toks) != 4:
                raise ValueError
            elements[k] = [int(t) for t in toks]
        except ValueError:
            raise MeshParseError("malformed element line, expected 4 integer indices", lineno) from None
        if (elements[k] < 0).any() or (elements[k] >= nv).any():
            raise MeshParseError(f"index out of range: element {k} references vertex "
                                 f"{int(elements[k][(elements[k] < 0) | (elements[k] >= nv)][0])} "
                                 f"of {nv}", lineno)

    boundary = None
    rest = body[nv + ne:]
    if rest:
        lineno, toks = rest[0]
        if toks[0] != "B" or len(rest) > 1:
            raise MeshParseError("unexpected trailing content", lineno)
        try:
            boundary = np.array([int(t) for t in toks[1:]], dtype=np.int64)
        except ValueError:
            raise MeshParseError("malformed boundary line", lineno) from None
        if boundary.size and ((boundary < 0).any() or (boundary >= nv).any()):
            raise MeshParseError("index out of range in boundary list", lineno)

    if boundary is None:
        boundary = detect_boundary(elements)
    mesh = Mesh(vertices, elements, np.unique(boundary), uniform)
    _validate(mesh, line_of=lambda e: el_lines[e])
    return mesh
