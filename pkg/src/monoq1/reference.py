"""Reference-square data: Q1 basis and the mixed trapezoid/midpoint rules.

All 4x4 local matrices in this package use the vertex order

    0: (0, 0)    1: (0, 1)    2: (1, 1)    3: (1, 0)

on the reference square [0, 1]^2.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: reference vertices in local basis order
VERTICES = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]])

_NODES_1D = (0.0, 0.5, 1.0)


def _check_lambda(lam, name="lambda"):
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise ParameterError(f"{name} must lie in [0, 1], got {lam!r}")
    return lam


@dataclass(frozen=True)
class QuadRule1D:
    """Mixed rule ``lam * trapezoid + (1 - lam) * midpoint`` on [0, 1]."""

    lam: float
    nodes: tuple
    weights: tuple

    def integrate(self, f):
        return sum(w * f(x) for x, w in zip(self.nodes, self.weights))


@dataclass(frozen=True)
class QuadRule2D:
    """Tensor product of two mixed rules; axis 1 uses ``lambda1``."""

    lambda1: float
    lambda2: float
    points: np.ndarray   # (9, 2)
    weights: np.ndarray  # (9,)

    def integrate(self, f):
        """Apply the rule to ``f(x1, x2)``; ``f`` may be vectorized or scalar."""
        x1, x2 = self.points[:, 0], self.points[:, 1]
        try:
            vals = np.asarray(f(x1, x2), dtype=float)
            if vals.shape != x1.shape:
                raise ValueError
        except (TypeError, ValueError):
            vals = np.array([f(a, b) for a, b in self.points])
        return float(np.dot(self.weights, vals))


def mixed_rule_1d(lam):
    """One-dimensional mixed quadrature rule with parameter ``lam`` in [0, 1].

    ``lam = 1`` is the trapezoid rule, ``lam = 0`` the midpoint rule.
    """
    lam = _check_lambda(lam)
    return QuadRule1D(lam, _NODES_1D, (lam / 2, 1.0 - lam, lam / 2))


def tensor_rule(lambda1, lambda2):
    r1 = mixed_rule_1d(lambda1)
    r2 = mixed_rule_1d(lambda2)
    points = np.array([(p, q) for p in r1.nodes for q in r2.nodes])
    weights = np.array([wp * wq for wp in r1.weights for wq in r2.weights])
    return QuadRule2D(r1.lam, r2.lam, points, weights)


# -- basis -------------------------------------------------------------------

def basis(x1, x2):
    """Values of the four Q1 shape functions, stacked on the last axis."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return np.stack([(1 - x1) * (1 - x2), (1 - x1) * x2, x1 * x2, x1 * (1 - x2)], axis=-1)


def basis_gradients(x1, x2):
    """Reference gradients, shape ``(..., 4, 2)``."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x1, x2 = np.broadcast_arrays(x1, x2)
    g = np.empty(x1.shape + (4, 2))
    g[..., 0, 0] = -(1 - x2)
    g[..., 0, 1] = -(1 - x1)
    g[..., 1, 0] = -x2
    g[..., 1, 1] = 1 - x1
    g[..., 2, 0] = x2
    g[..., 2, 1] = x1
    g[..., 3, 0] = 1 - x2
    g[..., 3, 1] = -x1
    return g


# -- local stiffness ----------------------------------------------------------

def local_stiffness_batch(abar, lambda1, lambda2):
    """Closed-form mixed-quadrature stiffness for a stack of elements.

    Parameters
    ----------
    abar : array_like, shape (n, 2, 2)
        Symmetric coefficient on the reference square (``a~`` for mapped cells).
    lambda1, lambda2 : array_like, shape (n,)
        Quadrature parameters along reference axes 1 and 2.

    Returns
    -------
    ndarray, shape (n, 4, 4)
        Off-diagonal entries from the closed forms; each diagonal entry is
        the negated off-diagonal row sum, so rows sum to zero exactly.
    """
    abar = np.asarray(abar, dtype=float)
    l1 = np.asarray(lambda1, dtype=float)
    l2 = np.asarray(lambda2, dtype=float)
    a11 = abar[:, 0, 0]
    a12 = abar[:, 0, 1]
    a22 = abar[:, 1, 1]

    trap = -0.25 * (l2 * a11 + l1 * a22)
    mid = -0.25 * ((1 - l2) * a11 + (1 - l1) * a22)
    s01 = trap + 0.25 * (a11 - a22)   # (0,0)-(0,1) and (1,1)-(1,0)
    s03 = trap + 0.25 * (a22 - a11)   # (0,0)-(1,0) and (0,1)-(1,1)
    s02 = mid - 0.5 * a12             # (0,0)-(1,1)
    s13 = mid + 0.5 * a12             # (0,1)-(1,0)

    S = np.zeros((abar.shape[0], 4, 4))
    S[:, 0, 1] = S[:, 1, 0] = s01
    S[:, 2, 3] = S[:, 3, 2] = s01
    S[:, 0, 3] = S[:, 3, 0] = s03
    S[:, 1, 2] = S[:, 2, 1] = s03
    S[:, 0, 2] = S[:, 2, 0] = s02
    S[:, 1, 3] = S[:, 3, 1] = s13
    for r in range(4):
        S[:, r, r] = -(S[:, r, (r + 1) % 4] + S[:, r, (r + 2) % 4] + S[:, r, (r + 3) % 4])
    return S


def local_stiffness(abar, params, lambda2=None):
    """4x4 stiffness of ``<abar grad phi_r, grad phi_s>_h`` on the reference square.

    ``params`` is a :class:`~monoq1.quadparams.QuadParams`, a ``(lambda1,
    lambda2)`` pair, or a scalar ``lambda1`` (with ``lambda2`` defaulting to it).
    """
    if hasattr(params, "lambda1"):
        l1, l2 = params.lambda1, params.lambda2
    elif np.ndim(params) == 1:
        l1, l2 = params
    else:
        l1 = params
        l2 = params if lambda2 is None else lambda2
    abar = np.asarray(abar, dtype=float).reshape(1, 2, 2)
    return local_stiffness_batch(abar, [float(l1)], [float(l2)])[0]
