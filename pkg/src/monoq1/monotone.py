"""Executable M-matrix and discrete-maximum-principle checks.

The certificate is the classical sufficient condition: an irreducible matrix
with positive diagonal, nonpositive off-diagonal entries, nonnegative row
sums and at least one positive row sum is a nonsingular M-matrix.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .assembly import assemble
from .errors import DimensionCapError, SingularMatrixError
from .solve import dense_solve

SIGN_RTOL = 1e-12
ROWSUM_RTOL = 1e-11
ORACLE_CAP = 2500


@dataclass
class MmatrixReport:
    n: int
    sign_ok: bool
    sign_violations: list      # (i, j, value), at most 20 kept
    n_sign_violations: int
    diag_ok: bool
    min_diag: float
    rowsum_ok: bool
    min_rowsum: float
    n_positive_rowsums: int
    irreducible: bool
    tol_sign: float
    tol_rowsum: float
    verdict: str = field(init=False)

    def __post_init__(self):
        ok = self.sign_ok and self.diag_ok and self.rowsum_ok and self.irreducible
        self.verdict = "certified" if ok else "violated"

    @property
    def certified(self):
        return self.verdict == "certified"

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "n": self.n,
            "sign_ok": self.sign_ok,
            "n_sign_violations": self.n_sign_violations,
            "diag_ok": self.diag_ok,
            "min_diag": self.min_diag,
            "rowsum_ok": self.rowsum_ok,
            "min_rowsum": self.min_rowsum,
            "n_positive_rowsums": self.n_positive_rowsums,
            "irreducible": self.irreducible,
            "tol_sign": self.tol_sign,
            "tol_rowsum": self.tol_rowsum,
        }

    def to_text(self):
        lines = [
            f"M-matrix check ({self.n} unknowns): {self.verdict.upper()}",
            f"  positive diagonal        : {'ok' if self.diag_ok else 'FAIL'} (min {self.min_diag:.6g})",
            f"  off-diagonal <= {self.tol_sign:.3g} : {'ok' if self.sign_ok else 'FAIL'}"
            f" ({self.n_sign_violations} violations)",
            f"  row sums >= -{self.tol_rowsum:.3g} : {'ok' if self.rowsum_ok else 'FAIL'}"
            f" (min {self.min_rowsum:.6g}, {self.n_positive_rowsums} positive)",
            f"  irreducible              : {'ok' if self.irreducible else 'FAIL'}",
        ]
        for i, j, v in self.sign_violations:
            lines.append(f"    A[{i},{j}] = {v:.6g}")
        return "\n".join(lines)

    def to_kv(self):
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())


def check_m_matrix(A, tol_sign=None, tol_rowsum=None):
    """Evaluate the sufficient M-matrix conditions for a square matrix.

    Default tolerances scale with the largest diagonal entry: ``1e-12`` for
    the sign test and ``1e-11`` for the row-sum test. Off-diagonal entries
    with magnitude at most ``tol_sign`` do not count as graph edges.
    """
    A = sp.csr_matrix(A, dtype=float)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("matrix must be square")
    d = A.diagonal()
    maxd = float(np.abs(d).max()) if n else 0.0
    tol_sign = SIGN_RTOL * maxd if tol_sign is None else tol_sign
    tol_rowsum = ROWSUM_RTOL * maxd if tol_rowsum is None else tol_rowsum

    off = (A - sp.diags(d)).tocoo()
    bad = off.data > tol_sign
    viol = sorted(zip(off.row[bad].tolist(), off.col[bad].tolist(), off.data[bad].tolist()))

    rowsums = np.asarray(A.sum(axis=1)).ravel()
    min_rowsum = float(rowsums.min()) if n else 0.0
    n_pos = int(np.count_nonzero(rowsums > tol_rowsum))
    rowsum_ok = bool(n and min_rowsum >= -tol_rowsum and n_pos >= 1)

    if n:
        strong = np.abs(off.data) > tol_sign
        G = sp.csr_matrix((np.ones(int(strong.sum())), (off.row[strong], off.col[strong])),
                          shape=(n, n))
        ncomp, _ = connected_components(G, directed=True, connection="strong")
        irreducible = ncomp == 1
    else:
        irreducible = False

    return MmatrixReport(
        n=n, sign_ok=not viol, sign_violations=viol[:20], n_sign_violations=len(viol),
        diag_ok=bool(n and (d > 0).all()), min_diag=float(d.min()) if n else 0.0,
        rowsum_ok=rowsum_ok, min_rowsum=min_rowsum, n_positive_rowsums=n_pos,
        irreducible=bool(irreducible), tol_sign=float(tol_sign), tol_rowsum=float(tol_rowsum))


@dataclass(frozen=True)
class InverseCheck:
    passed: bool
    min_entry: float
    position: tuple
    tol: float


def inverse_nonnegative_oracle(A, tol=None, cap=ORACLE_CAP):
    """Dense inverse; passes iff its smallest entry is >= -tol.

    ``tol`` defaults to ``1e-12 * max|A^{-1}|``.
    """
    n = A.shape[0]
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds oracle cap {cap}")
    M = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    try:
        lu = sla.lu_factor(M, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularMatrixError(str(exc)) from None
    if np.any(np.diag(lu[0]) == 0):
        raise SingularMatrixError("matrix is singular")
    inv = sla.lu_solve(lu, np.eye(n))
    if tol is None:
        tol = 1e-12 * float(np.abs(inv).max())
    k = int(np.argmin(inv))
    pos = np.unravel_index(k, inv.shape)
    m = float(inv.flat[k])
    return InverseCheck(m >= -tol, m, (int(pos[0]), int(pos[1])), float(tol))


@dataclass
class DMPReport:
    trials: int
    seed: int
    worst_negativity: float    # max over trials of max(0, -min u), f >= 0, g = 0
    negativity_scale: float    # max |f| seen
    worst_bounds: float        # max over trials of distance outside [min g, max g]
    bounds_scale: float        # max |g| seen

    @property
    def relative_negativity(self):
        return self.worst_negativity / self.negativity_scale if self.negativity_scale else 0.0

    @property
    def relative_bounds(self):
        return self.worst_bounds / self.bounds_scale if self.bounds_scale else 0.0

    def passed(self, rtol=1e-10):
        return self.relative_negativity <= rtol and self.relative_bounds <= rtol


def dmp_test(system, problem=None, trials=100, seed=0, policy="upper"):
    """Random discrete-maximum-principle trials.

    ``system`` is an assembled system, or a mesh when ``problem`` is given.

    Nonnegativity: random c, f in [0, 1] at interior nodes, g = 0, expect u >= 0.
    Bounds: c = f = 0, random g in [-1, 1], expect min g <= u <= max g.
    Both use dense factorizations, so the system must be below the dense cap.
    """
    if problem is not None:
        system = assemble(system, problem, policy)
    rng = np.random.default_rng(seed)
    n, nb = system.n, system.boundary.size
    zeros_i, zeros_b = np.zeros(n), np.zeros(nb)

    worst_neg = worst_bnd = 0.0
    f_scale = g_scale = 0.0
    for _ in range(trials):
        c = rng.uniform(0.0, 1.0, n)
        f = rng.uniform(0.0, 1.0, n)
        s = system.with_data(c_nodal=c, f_nodal=f, g_boundary=zeros_b)
        u = dense_solve(s.A, s.b).x
        worst_neg = max(worst_neg, float(max(0.0, -u.min())))
        f_scale = max(f_scale, float(np.abs(f).max()))

    homogeneous = system.with_data(c_nodal=zeros_i, f_nodal=zeros_i)
    if nb:
        M = homogeneous.A.toarray()
        factor = sla.cho_factor(M)
        for _ in range(trials):
            g = rng.uniform(-1.0, 1.0, nb)
            u = sla.cho_solve(factor, homogeneous.load - homogeneous.coupling @ g)
            over = max(float(u.max() - g.max()), float(g.min() - u.min()), 0.0)
            worst_bnd = max(worst_bnd, over)
            g_scale = max(g_scale, float(np.abs(g).max()))
    return DMPReport(trials, seed, worst_neg, f_scale, worst_bnd, g_scale)
