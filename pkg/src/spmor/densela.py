"""Dense matrix kernel: LU solves and rank-revealing Gram-Schmidt.

Matrices are plain 2-D numpy arrays. Real arrays stay real; complex
arithmetic is used only when an input is complex.
"""

from dataclasses import dataclass
import warnings

import numpy as np
import scipy.linalg

from .errors import SingularMatrix

PIVOT_RTOL = 1e-14
DEFAULT_TOL = 1e-10


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D float or complex array."""
    m = np.asarray(a)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.iscomplexobj(m):
        m = m.astype(float, copy=False)
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def frozen(a, name="matrix"):
    m = np.array(as_matrix(a, name))
    m.setflags(write=False)
    return m


def max_norm(a):
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


@dataclass(frozen=True)
class LuFactorization:
    """Partial-pivoted LU factors of a square matrix."""

    lu: np.ndarray
    piv: np.ndarray
    n: int

    def solve(self, b):
        b = np.asarray(b)
        if self.n == 0:
            return np.zeros(b.shape, dtype=np.result_type(self.lu, b, float))
        dtype = np.result_type(self.lu, b, float)
        return scipy.linalg.lu_solve(
            (self.lu, self.piv), b.astype(dtype, copy=False), check_finite=False
        )


def lu_factor(m):
    """Factor a square matrix with partial pivoting.

    Raises
    ------
    SingularMatrix
        If some pivot magnitude is below ``1e-14`` times the largest column
        norm of `m`.
    """
    m = as_matrix(m)
    n, k = m.shape
    if n != k:
        raise ValueError(f"lu_factor needs a square matrix, got {m.shape}")
    if n == 0:
        return LuFactorization(m.copy(), np.zeros(0, dtype=np.int32), 0)
    scale = float(np.linalg.norm(m, axis=0).max())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < PIVOT_RTOL * scale:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} x column scale {scale:.3e}"
        )
    return LuFactorization(lu, piv, n)


def solve(m, b):
    return lu_factor(m).solve(b)


def gram_schmidt(cols, against=None, tol=DEFAULT_TOL):
    """Modified Gram-Schmidt with one full re-orthogonalization pass.

    Parameters
    ----------
    cols : (N, k) array
        Candidate columns, processed left to right.
    against : (N, q) array, optional
        Columns with orthonormal columns that the output must be orthogonal to.
    tol : float
        A candidate is dropped when its residual after both passes is below
        ``tol`` times its original norm.

    Returns
    -------
    Q : (N, r) array
        New orthonormal columns.
    kept : list of int
        Indices of the surviving candidates.
    ratios : list of float
        Residual-to-original norm ratio for every candidate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cols = as_matrix(cols, "cols")
    N = cols.shape[0]
    if against is None:
        against = np.zeros((N, 0), dtype=cols.dtype)
    against = as_matrix(against, "against")
    if against.shape[0] != N:
        raise ValueError("row mismatch between cols and against")
    dtype = np.result_type(cols, against, float)

    basis = [against[:, i].astype(dtype) for i in range(against.shape[1])]
    new = []
    kept = []
    ratios = []
    for k in range(cols.shape[1]):
        v = cols[:, k].astype(dtype, copy=True)
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            ratios.append(0.0)
            continue
        for _ in range(2):
            for q in basis:
                v -= q * np.vdot(q, v)
            for q in new:
                v -= q * np.vdot(q, v)
        r = np.linalg.norm(v)
        ratios.append(float(r / norm0))
        if r < tol * norm0:
            continue
        new.append(v / r)
        kept.append(k)
    Q = np.column_stack(new) if new else np.zeros((N, 0), dtype=dtype)
    return Q, kept, ratios


def orthonormalize(cols, against=None, tol=DEFAULT_TOL):
    """Orthonormal basis of range(cols) outside range(against).

    Returns ``(Q, kept)`` where `kept` lists the input columns that survived
    deflation.
    """
    Q, kept, _ = gram_schmidt(cols, against, tol)
    return Q, kept
