"""Model problems -div(a grad u) + c u = f with Dirichlet data g.

Coefficient callables take coordinate arrays ``(x, y)`` and must broadcast:
``a`` returns shape ``x.shape + (2, 2)``; ``c``, ``f``, ``g`` and ``u_exact``
return ``x.shape``. Scalar-returning callables are broadcast for you.
"""
import re
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientError, GeometryError, ParameterError, UnknownProblemError


@dataclass(frozen=True)
class ProblemSpec:
    a: object
    c: object
    f: object
    g: object
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    u_exact: object = None
    name: str = "custom"
    c_value: float = None  # constant c, when known, for report headers

    def eval_a(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.broadcast_to(np.asarray(self.a(x, y), float), x.shape + (2, 2))

    def _scalar(self, fn, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.broadcast_to(np.asarray(fn(x, y), float), x.shape)

    def eval_c(self, x, y):
        return self._scalar(self.c, x, y)

    def eval_f(self, x, y):
        return self._scalar(self.f, x, y)

    def eval_g(self, x, y):
        return self._scalar(self.g, x, y)

    def eval_u(self, x, y):
        if self.u_exact is None:
            raise ParameterError(f"problem {self.name!r} has no exact solution")
        return self._scalar(self.u_exact, x, y)


def check_spd(abar, elements=None):
    """Raise CoefficientError for the first non-SPD (or non-symmetric) sample."""
    abar = np.asarray(abar, float).reshape(-1, 2, 2)
    a11, a12, a21, a22 = abar[:, 0, 0], abar[:, 0, 1], abar[:, 1, 0], abar[:, 1, 1]
    scale = np.abs(abar).max(axis=(1, 2))
    bad = (np.abs(a12 - a21) > 1e-12 * scale) | ~(a11 > 0) | ~(a11 * a22 - a12 * a21 > 0)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        e = k if elements is None else int(elements[k])
        raise CoefficientError(
            f"element {e}: diffusion coefficient is not symmetric positive definite "
            f"at the element center: {abar[k].tolist()}", element=e)


def sample_center(problem, geom, element=None):
    """Coefficient ``abar_e = a(center)`` for one element."""
    abar = np.array(problem.eval_a(geom.center[0], geom.center[1]), dtype=float)
    check_spd(abar, None if element is None else [element])
    return 0.5 * (abar + abar.T)


def effective_coefficient_batch(DF, abar):
    """``J * DF^{-1} abar DF^{-T}`` for stacks of 2x2 matrices."""
    J = DF[..., 0, 0] * DF[..., 1, 1] - DF[..., 0, 1] * DF[..., 1, 0]
    if np.any(~(J > 0)):
        k = int(np.flatnonzero(~(np.atleast_1d(J) > 0))[0])
        raise GeometryError(f"element {k}: singular or inverted DF at the center", element=k)
    # adj(DF) = J * DF^{-1}, so J DF^{-1} a DF^{-T} = adj a adj^T / J
    adj = np.empty_like(DF)
    adj[..., 0, 0] = DF[..., 1, 1]
    adj[..., 0, 1] = -DF[..., 0, 1]
    adj[..., 1, 0] = -DF[..., 1, 0]
    adj[..., 1, 1] = DF[..., 0, 0]
    at = adj @ abar @ np.swapaxes(adj, -1, -2) / J[..., None, None]
    return 0.5 * (at + np.swapaxes(at, -1, -2))


def effective_coefficient(geom, abar):
    return effective_coefficient_batch(np.asarray(geom.DF)[None], np.asarray(abar)[None])[0]


def effective_coefficient_edges(edges, abar):
    """Same quantity through the edge-vector quadratic forms (independent route)."""
    c0, c1, c2, c3 = edges
    p = c0 + c2
    q = c1 + c3
    DF = 0.5 * np.column_stack([q, p])
    detDF = np.linalg.det(DF)
    deta = np.linalg.det(abar)
    # J det(a) / (4 det(DF)^2); rot(p)^T a rot(p) = det(a) p^T a^{-1} p
    C = detDF * deta / (4 * detDF ** 2)
    ainv = np.linalg.inv(abar)
    a11 = C * p @ ainv @ p
    a12 = -C * p @ ainv @ q
    a22 = C * q @ ainv @ q
    return np.array([[a11, a12], [a12, a22]])


# -- builtin problems ------------------------------------------------------------

def _const(value):
    return lambda x, y: np.full(np.broadcast(x, y).shape, float(value))


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _sec6_k(x, y):
    return 1 + 10 * y ** 2 + x * np.cos(y) + y


def paper_sec6(c=1.0):
    """Variable, diagonally dominant anisotropic coefficient on [0, pi]^2.

    a11 = a12 = k, a22 = k + 1 with k = 1 + 10 y^2 + x cos y + y, exact
    solution u = -sin^2(x) sin(y) cos(y).
    """
    c = float(c)

    def a(x, y):
        k = _sec6_k(x, y)
        out = np.empty(np.shape(k) + (2, 2))
        out[..., 0, 0] = k
        out[..., 0, 1] = k
        out[..., 1, 0] = k
        out[..., 1, 1] = k + 1
        return out

    def u(x, y):
        return -np.sin(x) ** 2 * np.sin(y) * np.cos(y)

    def f(x, y):
        # div(a grad u) = (k_x + k_y)(u_x + u_y) + k (u_xx + 2 u_xy + u_yy) + u_yy
        k = _sec6_k(x, y)
        kx = np.cos(y)
        ky = 20 * y - x * np.sin(y) + 1
        s2x, s2y, c2y = np.sin(2 * x), np.sin(2 * y), np.cos(2 * y)
        sx2 = np.sin(x) ** 2
        ux = -0.5 * s2x * s2y
        uy = -sx2 * c2y
        uxx = -np.cos(2 * x) * s2y
        uxy = -s2x * c2y
        uyy = 2 * sx2 * s2y
        div = (kx + ky) * (ux + uy) + k * (uxx + 2 * uxy + uyy) + uyy
        return -div + c * u(x, y)

    return ProblemSpec(a=a, c=_const(c), f=f, g=_zero, domain=(0.0, np.pi, 0.0, np.pi),
                       u_exact=u, name="paper-sec6", c_value=c)


def constant_coefficient(amat, domain=(0.0, 1.0, 0.0, 1.0), c=0.0, name="constant"):
    """Constant SPD coefficient with u = sin(pi s) sin(pi t) on the given rectangle.

    ``s`` and ``t`` are the coordinates rescaled to [0, 1], so g = 0.
    """
    A = np.asarray(amat, dtype=float)
    if A.shape != (2, 2):
        raise ParameterError("coefficient matrix must be 2x2")
    check_spd(A)
    x0, x1, y0, y1 = map(float, domain)
    kx, ky = np.pi / (x1 - x0), np.pi / (y1 - y0)
    c = float(c)

    def a(x, y):
        return np.broadcast_to(A, np.broadcast(x, y).shape + (2, 2)).copy()

    def u(x, y):
        return np.sin(kx * (x - x0)) * np.sin(ky * (y - y0))

    def f(x, y):
        sx, sy = np.sin(kx * (x - x0)), np.sin(ky * (y - y0))
        cx, cy = np.cos(kx * (x - x0)), np.cos(ky * (y - y0))
        return ((A[0, 0] * kx ** 2 + A[1, 1] * ky ** 2 + c) * sx * sy
                - 2 * A[0, 1] * kx * ky * cx * cy)

    return ProblemSpec(a=a, c=_const(c), f=f, g=_zero, domain=(x0, x1, y0, y1),
                       u_exact=u, name=name, c_value=c)


def rotated_tensor(theta, ratio):
    """``R(theta) diag(ratio, 1) R(theta)^T``."""
    ct, st = np.cos(theta), np.sin(theta)
    R = np.array([[ct, -st], [st, ct]])
    return R @ np.diag([float(ratio), 1.0]) @ R.T


_NAME_RE = re.compile(r"^\s*([A-Za-z0-9_-]+)\s*(?:\((.*)\))?\s*$")


def parse_problem_name(text):
    """Split ``"name(k=v, ...)"`` or ``"name(v1, v2)"`` into name, args, kwargs."""
    m = _NAME_RE.match(text)
    if not m:
        raise UnknownProblemError(f"cannot parse problem name {text!r}")
    name, inner = m.group(1), m.group(2)
    args, kwargs = [], {}
    if inner and inner.strip():
        for tok in inner.split(","):
            tok = tok.strip()
            try:
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    kwargs[k.strip()] = float(v)
                else:
                    args.append(float(tok))
            except ValueError:
                raise UnknownProblemError(f"bad parameter {tok!r} in {text!r}") from None
    return name, args, kwargs


def builtin_problem(name, c=None, domain=None):
    """Look up a builtin problem.

    Names: ``paper-sec6``, ``poisson-sine``, ``constant-anisotropic(theta, ratio)``
    (also ``constant-anisotropic(a11=.., a12=.., a22=..)``). ``c`` overrides the
    default reaction coefficient; ``domain`` the default rectangle (not allowed
    for ``paper-sec6`` whose exact solution needs [0, pi]^2).
    """
    base, args, kwargs = parse_problem_name(name)
    if base == "paper-sec6":
        if domain is not None and tuple(domain) != (0.0, np.pi, 0.0, np.pi):
            raise ParameterError("paper-sec6 is defined on [0, pi]^2 only")
        return paper_sec6(1.0 if c is None else c)
    if base == "poisson-sine":
        return constant_coefficient(np.eye(2), domain or (0.0, 1.0, 0.0, 1.0),
                                    0.0 if c is None else c, name="poisson-sine")
    if base == "constant-anisotropic":
        if {"a11", "a12", "a22"} <= kwargs.keys():
            A = [[kwargs["a11"], kwargs["a12"]], [kwargs["a12"], kwargs["a22"]]]
        else:
            theta = kwargs.get("theta", args[0] if len(args) > 0 else 0.0)
            ratio = kwargs.get("ratio", args[1] if len(args) > 1 else 1.0)
            if ratio <= 0:
                raise ParameterError("ratio must be positive")
            A = rotated_tensor(theta, ratio)
        return constant_coefficient(A, domain or (0.0, 1.0, 0.0, 1.0),
                                    0.0 if c is None else c, name=name.strip())
    raise UnknownProblemError(
        f"unknown problem {base!r}; expected paper-sec6, poisson-sine or constant-anisotropic")
