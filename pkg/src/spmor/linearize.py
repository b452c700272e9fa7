"""Equivalent first-order formulations of second- and higher-order systems."""

from dataclasses import dataclass

import numpy as np

from .densela import lu_factor
from .errors import SingularInnerG, SingularMatrix
from .systems import FirstOrderSystem, HigherOrderSystem, SpecialSecondOrderSystem


@dataclass(frozen=True)
class LinearizationMap:
    """How first-order state coordinates map back to the source system.

    `blocks` lists ``(start, stop)`` row ranges: ``[x, z2]`` for second
    order, ``[x, x', ..., x^(l-1)]`` for order l.
    """

    source_kind: str
    N: int
    N1: int
    blocks: tuple
    N0: int = 0
    l: int = 1
    variant: str = None


def linearize_second_order(sys):
    """First-order realization with state ``[x; z2]`` of dimension ``N + N0``.

    AF1: ``A = [[-P0, -F1 G], [(F2 G)^H, 0]]``, ``E = diag(P1, G^H)``.
    AF2: ``A = [[-P0, -F1], [F2^H, 0]]``, ``E = diag(P1, G)``.
    """
    N, N0 = sys.N, sys.N0
    if sys.variant == "AF2" and N0:
        try:
            lu_factor(sys.G)
        except SingularMatrix:
            raise SingularInnerG("variant AF2 needs a nonsingular G") from None
    if sys.variant == "AF1":
        upper, lower, G22 = sys.F1 @ sys.G, (sys.F2 @ sys.G).conj().T, sys.G.conj().T
    else:
        upper, lower, G22 = sys.F1, sys.F2.conj().T, sys.G
    Z = np.zeros((N0, N0))
    A = np.block([[-sys.P0, -upper], [lower, Z]])
    E = np.block([[sys.P1, np.zeros((N, N0))], [np.zeros((N0, N)), G22]])
    B = np.vstack([sys.B, np.zeros((N0, sys.m))])
    L = np.hstack([sys.L_out, np.zeros((sys.p, N0))])
    fo = FirstOrderSystem(E=E, A=A, B=B, L=L, D=sys.D)
    lmap = LinearizationMap(
        "second_order", N, N + N0, ((0, N), (N, N + N0)), N0=N0, l=1, variant=sys.variant
    )
    return fo, lmap


def linearize_higher_order(sys):
    """Companion realization with state ``[x; x'; ...; x^(l-1)]``.

    ``E = diag(I, ..., I, P_l)``; A has identity blocks on the block
    superdiagonal and ``-[P_0 ... P_{l-1}]`` as its last block row.
    """
    l, N, m = sys.l, sys.N, sys.m
    dtype = np.result_type(*sys.P, float)
    E = np.zeros((l * N, l * N), dtype=dtype)
    A = np.zeros((l * N, l * N), dtype=dtype)
    I = np.eye(N)
    for i in range(l - 1):
        E[i * N:(i + 1) * N, i * N:(i + 1) * N] = I
        A[i * N:(i + 1) * N, (i + 1) * N:(i + 2) * N] = I
    E[(l - 1) * N:, (l - 1) * N:] = sys.P[l]
    for i in range(l):
        A[(l - 1) * N:, i * N:(i + 1) * N] = -sys.P[i]
    B = np.zeros((l * N, m), dtype=sys.B.dtype)
    B[(l - 1) * N:] = sys.B
    L = np.hstack(sys.Ls)
    fo = FirstOrderSystem(E=E, A=A, B=B, L=L, D=sys.D)
    blocks = tuple((i * N, (i + 1) * N) for i in range(l))
    return fo, LinearizationMap("higher_order", N, l * N, blocks, l=l)


def linearize(sys):
    if isinstance(sys, SpecialSecondOrderSystem):
        return linearize_second_order(sys)
    if isinstance(sys, HigherOrderSystem):
        return linearize_higher_order(sys)
    if isinstance(sys, FirstOrderSystem):
        return sys, LinearizationMap("first_order", sys.N1, sys.N1, ((0, sys.N1),))
    raise TypeError(f"cannot linearize {type(sys).__name__}")
