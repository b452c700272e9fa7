"""Projection-based reduced-order models: PRIMA, SPRIM and order-l preserving.

All three project the first-order data with a matrix ``V`` whose range
contains the block-Krylov space of a :class:`~spmor.krylov.KrylovBasis`:

* ``prima``: ``V`` is the Krylov basis itself.
* ``sprim``: ``V = diag(V1, V2)`` from the row blocks of the basis.
* ``higher_order``: ``V = diag(S, ..., S)`` with one shared ``S``.

Zero and identity blocks of the structured reduced pencils are assembled
explicitly, never computed.
"""

from dataclasses import dataclass, field

import numpy as np

from .densela import DEFAULT_TOL, lu_factor, orthonormalize
from .errors import ReducedInnerGSingular, ReducedPencilSingular, SingularMatrix
from .linearize import linearize_higher_order
from .systems import (
    FirstOrderSystem,
    HigherOrderSystem,
    SpecialSecondOrderSystem,
    is_hermitian,
)


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Reduced data plus provenance.

    `system` is the projected first-order model; `structured` is the
    recovered second-order or order-l model (None for PRIMA).
    """

    kind: str
    system: FirstOrderSystem
    structured: object
    V: np.ndarray
    n: int
    j: int
    boundaries: tuple
    s0: complex
    hermitian_source: bool = False
    info: dict = field(default_factory=dict)

    @property
    def state_dim(self):
        """Dimension of the reduced model in its natural (structured) form."""
        if isinstance(self.structured, SpecialSecondOrderSystem):
            return self.structured.N
        if isinstance(self.structured, HigherOrderSystem):
            return self.structured.N
        return self.system.N1

    def transfer(self, s):
        return self.system.transfer(s)

    def provenance(self):
        out = {
            "method": self.kind,
            "n": self.n,
            "j": self.j,
            "boundaries": list(self.boundaries),
            "s0": [float(np.real(self.s0)), float(np.imag(self.s0))],
            "hermitian_source": self.hermitian_source,
            "state_dim": self.state_dim,
            "first_order_dim": self.system.N1,
        }
        out.update(self.info)
        return out


def _check_basis(sys_fo, basis):
    if basis.V.shape[0] != sys_fo.N1:
        raise ValueError(
            f"basis has {basis.V.shape[0]} rows but the system has N1 = {sys_fo.N1}"
        )


def _check_pencil(fo, s0):
    try:
        lu_factor(fo.pencil(s0))
    except SingularMatrix as exc:
        raise ReducedPencilSingular(f"s0 En - An singular at s0 = {s0}: {exc}") from None


def _first_order(E, A, B, L, D, s0):
    try:
        fo = FirstOrderSystem(E=E, A=A, B=B, L=L, D=D)
    except ValueError as exc:
        raise ReducedPencilSingular(str(exc)) from None
    _check_pencil(fo, s0)
    return fo


def prima_reduce(sys, basis):
    """One-sided projection ``V^H A V``, ``V^H E V``, ``V^H B``, ``L V``."""
    _check_basis(sys, basis)
    V = basis.V
    Vh = V.conj().T
    fo = _first_order(Vh @ sys.E @ V, Vh @ sys.A @ V, Vh @ sys.B, sys.L @ V, sys.D, basis.s0)
    return ReducedModel(
        "prima", fo, None, V, basis.n, basis.j, basis.boundaries, basis.s0,
        hermitian_source=False,
    )


def sprim_reduce(sys, sys_fo, lmap, basis, tol=DEFAULT_TOL):
    """SPRIM: split the Krylov basis by rows and project block-diagonally.

    The row blocks ``V1`` (N rows) and ``V2`` (N0 rows) are re-orthonormalized
    independently with rank tolerance `tol`, so the two blocks may end up with
    different column counts.

    Raises
    ------
    ReducedInnerGSingular
        ``V2^H G V2`` is singular.
    ReducedPencilSingular
        The reduced pencil is singular at the expansion point.
    """
    _check_basis(sys_fo, basis)
    N, N0 = sys.N, sys.N0
    if lmap.N1 != N + N0:
        raise ValueError("linearization map does not match the second-order system")
    V1, _ = orthonormalize(basis.V[:N], None, tol)
    V2, _ = orthonormalize(basis.V[N:], None, tol) if N0 else (np.zeros((0, 0)), [])
    n1, n2 = V1.shape[1], V2.shape[1]
    V1h, V2h = V1.conj().T, V2.conj().T

    P0 = V1h @ sys.P0 @ V1
    P1 = V1h @ sys.P1 @ V1
    B = V1h @ sys.B
    L = sys.L_out @ V1
    G = V2h @ sys.G @ V2
    if n2:
        try:
            lu_factor(G)
        except SingularMatrix as exc:
            raise ReducedInnerGSingular(f"V2^H G V2 is singular: {exc}") from None

    if sys.variant == "AF1":
        F1G = V1h @ sys.F1 @ sys.G @ V2
        F2G = V1h @ sys.F2 @ sys.G @ V2
        upper, lower, G22 = F1G, F2G.conj().T, V2h @ sys.G.conj().T @ V2
        if n2:
            # F~ = (V1^H F G V2) G~^{-1}
            F1 = np.linalg.solve(G.T, F1G.T).T
            F2 = np.linalg.solve(G.T, F2G.T).T
        else:
            F1 = F2 = np.zeros((n1, 0))
    else:
        F1 = V1h @ sys.F1 @ V2
        F2 = V1h @ sys.F2 @ V2
        upper, lower, G22 = F1, F2.conj().T, G

    dtype = np.result_type(P0, P1, upper, G22, float)
    An = np.block([[-P0, -upper], [lower, np.zeros((n2, n2), dtype=dtype)]])
    En = np.block(
        [[P1, np.zeros((n1, n2), dtype=dtype)], [np.zeros((n2, n1), dtype=dtype), G22]]
    )
    Bn = np.vstack([B, np.zeros((n2, sys.m), dtype=B.dtype)])
    Ln = np.hstack([L, np.zeros((sys.p, n2), dtype=L.dtype)])
    fo = _first_order(En, An, Bn, Ln, sys.D, basis.s0)

    try:
        structured = SpecialSecondOrderSystem(
            P1=P1, P0=P0, F1=F1, F2=F2, G=G, B=B, L_out=L, D=sys.D, variant=sys.variant
        )
    except ValueError as exc:
        raise ReducedPencilSingular(str(exc)) from None
    Vs = np.zeros((N + N0, n1 + n2), dtype=np.result_type(V1, V2, float))
    Vs[:N, :n1] = V1
    Vs[N:, n1:] = V2
    return ReducedModel(
        "sprim", fo, structured, Vs, basis.n, basis.j, basis.boundaries, basis.s0,
        hermitian_source=bool(is_hermitian(sys)),
        info={"n1": n1, "n2": n2},
    )


def higher_order_reduce(sys, sys_fo, basis, tol=DEFAULT_TOL):
    """Order-l structure-preserving projection with ``V = diag(S, ..., S)``.

    ``S`` is an orthonormal basis of the span of all l row blocks of the
    Krylov basis, so its column count r may exceed n in floating point; all r
    columns are kept and ``r - n`` is reported.
    """
    _check_basis(sys_fo, basis)
    l, N = sys.l, sys.N
    if sys_fo.N1 != l * N:
        raise ValueError("first-order system is not the companion form of this system")
    if l == 1:
        S = basis.V
    else:
        stacked = np.hstack([basis.V[i * N:(i + 1) * N] for i in range(l)])
        S, _ = orthonormalize(stacked, None, tol)
    r = S.shape[1]
    Sh = S.conj().T
    try:
        reduced = HigherOrderSystem(
            P=tuple(Sh @ Pi @ S for Pi in sys.P),
            B=Sh @ sys.B,
            Ls=tuple(Lj @ S for Lj in sys.Ls),
            D=sys.D,
        )
        fo, _ = linearize_higher_order(reduced)
    except ValueError as exc:
        raise ReducedPencilSingular(str(exc)) from None
    _check_pencil(fo, basis.s0)
    V = np.zeros((l * N, l * r), dtype=np.result_type(S, float))
    for i in range(l):
        V[i * N:(i + 1) * N, i * r:(i + 1) * r] = S
    return ReducedModel(
        "higher_order", fo, reduced, V, basis.n, basis.j, basis.boundaries, basis.s0,
        hermitian_source=bool(is_hermitian(sys)),
        info={"r": r, "r_minus_n": r - basis.n},
    )
