"""Deflated block-Krylov bases for ``M = (s0 E - A)^{-1} E`` and ``R = (s0 E - A)^{-1} B``."""

from dataclasses import dataclass, field
import math

import numpy as np

from .densela import DEFAULT_TOL, gram_schmidt, lu_factor
from .errors import ExpansionPointIsPole, SingularMatrix, TargetUnreachable


@dataclass(frozen=True, eq=False)
class KrylovOperator:
    """Holds the single LU factorization of ``s0 E - A``."""

    lu: object
    E: np.ndarray
    B: np.ndarray
    s0: complex

    @property
    def N1(self):
        return self.E.shape[0]

    def apply(self, v):
        """``M v`` by one solve with ``s0 E - A``."""
        return self.lu.solve(self.E @ v)

    def start_block(self):
        """``R``."""
        return self.lu.solve(self.B)


def make_operator(sys, s0):
    try:
        lu = lu_factor(sys.pencil(s0))
    except SingularMatrix as exc:
        raise ExpansionPointIsPole(f"s0 = {s0} is a pole of sE - A: {exc}") from None
    return KrylovOperator(lu, sys.E, sys.B, s0)


@dataclass(frozen=True)
class DeflationRecord:
    iteration: int
    column: int
    residual: float

    def to_dict(self):
        return {"iteration": self.iteration, "column": self.column, "residual": self.residual}


@dataclass(frozen=True, eq=False)
class KrylovBasis:
    """Orthonormal basis ``V`` of the block-Krylov space ``K_n(M, R)``.

    ``sources[j]`` lists the columns of ``R`` that are still active in block
    ``j+1`` (so block j+1 spans ``M^j R[:, sources[j]]`` modulo earlier
    blocks). ``exhausted`` is True when the last block built was followed by a
    fully deflated candidate block.
    """

    V: np.ndarray
    widths: tuple
    sources: tuple
    deflations: tuple
    s0: complex
    tol: float
    exhausted: bool = False
    requested_n: int = None

    @property
    def boundaries(self):
        out, n = [], 0
        for w in self.widths:
            n += w
            out.append(n)
        return tuple(out)

    @property
    def n(self):
        return self.V.shape[1]

    @property
    def j(self):
        return len(self.widths)

    def truncate(self, j):
        """The basis of the first `j` blocks (``n = n(j)``)."""
        if not 1 <= j <= self.j:
            raise ValueError(f"block index must be in 1..{self.j}, got {j}")
        n = self.boundaries[j - 1]
        defl = tuple(d for d in self.deflations if d.iteration <= j)
        return KrylovBasis(
            self.V[:, :n], self.widths[:j], self.sources[:j], defl, self.s0, self.tol,
            exhausted=False, requested_n=None,
        )

    def stats(self):
        return {
            "n": self.n,
            "j": self.j,
            "boundaries": list(self.boundaries),
            "widths": list(self.widths),
            "exhausted": self.exhausted,
            "deflation_tol": self.tol,
            "deflations": [d.to_dict() for d in self.deflations],
        }


def build_basis(op, target_n=None, tol=DEFAULT_TOL):
    """Block Arnoldi with deflation.

    Each sweep orthogonalizes the candidate block against the whole basis
    (two Gram-Schmidt passes) and drops columns whose residual is below
    ``tol`` times their original norm. The next candidate block is ``M``
    applied to the surviving orthonormal columns. The loop stops at the
    first block boundary ``n(j) >= target_n`` or when a candidate block
    deflates completely. ``target_n=None`` builds the maximal basis.

    Raises
    ------
    TargetUnreachable
        The space was exhausted below `target_n`; the maximal basis is
        attached to the exception.
    """
    if target_n is not None and target_n < 1:
        raise ValueError("target_n must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    goal = math.inf if target_n is None else target_n
    N1 = op.N1
    dtype = np.result_type(op.E, op.B, op.lu.lu, float)
    V = np.zeros((N1, 0), dtype=dtype)
    widths, sources, deflations = [], [], []
    cand = op.start_block()
    active = list(range(cand.shape[1]))
    exhausted = False
    iteration = 1
    while True:
        Q, kept, ratios = gram_schmidt(cand, V, tol)
        for k, col in enumerate(active):
            if k not in kept:
                deflations.append(DeflationRecord(iteration, col, ratios[k]))
        if not kept:
            exhausted = True
            break
        V = np.hstack([V, Q])
        active = [active[k] for k in kept]
        widths.append(len(kept))
        sources.append(tuple(active))
        if V.shape[1] >= goal:
            break
        cand = op.apply(Q)
        iteration += 1
    basis = KrylovBasis(
        V, tuple(widths), tuple(sources), tuple(deflations), op.s0, tol,
        exhausted=exhausted, requested_n=target_n,
    )
    if V.shape[1] < goal and target_n is not None:
        raise TargetUnreachable(target_n, basis)
    if not widths:
        raise TargetUnreachable(target_n or 1, basis)
    return basis
