"""Admissibility of the effective coefficient and choice of the quadrature parameter.

For a symmetric ``a~`` with ``|a12| <= min(a11, a22)`` the local stiffness has
nonpositive off-diagonal entries whenever both parameters lie in

    ( |a11 - a22| / (a11 + a22),  1 - 2 |a12| / (a11 + a22) ]

and in the equality case the interval collapses to its upper end.
"""
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, EllipticityError, ParameterError

STRICT, BOUNDARY, INADMISSIBLE = "strict", "boundary", "inadmissible"
POLICIES = ("upper", "midpoint")

TOL_EQ = 1e-12


@dataclass(frozen=True)
class QuadParams:
    lambda1: float
    lambda2: float
    interval_low: float
    interval_high: float
    forced: bool

    @property
    def lambdas(self):
        return (self.lambda1, self.lambda2)


def _parts(atilde):
    at = np.asarray(atilde, dtype=float)
    return at[..., 0, 0], at[..., 0, 1], at[..., 1, 1]


def classify_batch(atilde):
    """Integer codes per element: 0 strict, 1 boundary, 2 inadmissible."""
    a11, a12, a22 = _parts(atilde)
    gap = np.abs(a12) - np.minimum(a11, a22)
    tol = TOL_EQ * (a11 + a22)
    return np.where(np.abs(gap) <= tol, 1, np.where(gap < 0, 0, 2))


def admissible(atilde):
    """``"strict"``, ``"boundary"`` or ``"inadmissible"``."""
    return (STRICT, BOUNDARY, INADMISSIBLE)[int(classify_batch(atilde))]


def interval_batch(atilde):
    a11, a12, a22 = _parts(atilde)
    s = a11 + a22
    return np.abs(a11 - a22) / s, 1.0 - 2.0 * np.abs(a12) / s


def select_lambda_batch(atilde, policy="upper", elements=None):
    """Vectorized :func:`select_lambda`.

    Returns ``(lam, low, high, forced)`` arrays; ``lambda1 = lambda2 = lam``.
    """
    if policy not in POLICIES:
        raise ParameterError(f"unknown lambda policy {policy!r}; expected one of {POLICIES}")
    atilde = np.asarray(atilde, dtype=float).reshape(-1, 2, 2)
    code = classify_batch(atilde)
    if (code == 2).any():
        k = int(np.flatnonzero(code == 2)[0])
        e = k if elements is None else int(elements[k])
        a11, a12, a22 = atilde[k, 0, 0], atilde[k, 0, 1], atilde[k, 1, 1]
        raise AdmissibilityError(
            f"element {e}: |a12| <= min(a11, a22) violated for the effective coefficient "
            f"(|a12| = {abs(a12):.6g} > min = {min(a11, a22):.6g})", element=e)
    low, high = interval_batch(atilde)
    forced = code == 1
    if policy == "upper":
        lam = high.copy()
    else:
        lam = np.where(forced, high, 0.5 * (low + high))
    if np.any(~(lam > 0)):
        k = int(np.flatnonzero(~(lam > 0))[0])
        e = k if elements is None else int(elements[k])
        raise EllipticityError(f"element {e}: selected quadrature parameter {lam[k]!r} is not positive")
    return lam, low, high, forced


def select_lambda(atilde, policy="upper"):
    lam, low, high, forced = select_lambda_batch(atilde, policy)
    return QuadParams(float(lam[0]), float(lam[0]), float(low[0]), float(high[0]), bool(forced[0]))
