"""First-order, special second-order and higher-order LTI systems.

Transfer functions:

* first order   ``H(s) = D + L (sE - A)^{-1} B``
* second order  ``H(s) = D + L (s P1 + P0 + P_{-1}/s)^{-1} B`` with
  ``P_{-1} = F1 G F2^H`` (variant AF1) or ``F1 G^{-1} F2^H`` (variant AF2)
* order l       ``H(s) = D + L(s) P(s)^{-1} B`` with matrix polynomials
  ``P(s) = sum s^i P_i`` and ``L(s) = sum s^j L_j``
"""

from dataclasses import dataclass, field

import numpy as np

from .densela import as_matrix, frozen, lu_factor, max_norm
from .errors import PoleOrSingular, RelationViolated, SingularInnerG, SingularMatrix

HERMITIAN_RTOL = 1e-12
J_RELATION_RTOL = 1e-10

# Regularity probes span many decades so that circuit data with pF/nH
# element values is not misjudged by a probe near the wrong scale.
_PROBE_PHASE = np.exp(1j * 0.9273)
_PROBES = tuple(0.7316 * 10.0**k * _PROBE_PHASE for k in (0, 1, -1, 3, 6, 9, 10, 12, -3))


def _find_probe(factor_at):
    for s in _PROBES:
        try:
            factor_at(s)
        except SingularMatrix:
            continue
        return s
    raise ValueError("matrix pencil/polynomial is singular at every probe point")


def _check_shapes(named, rules):
    for name, (rows, cols) in rules.items():
        r, c = named[name].shape
        if (rows is not None and r != rows) or (cols is not None and c != cols):
            raise ValueError(f"{name} has shape {(r, c)}, expected {(rows, cols)}")


@dataclass(frozen=True, eq=False)
class FirstOrderSystem:
    """``E z' - A z = B u``, ``y = D u + L z``."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    L: np.ndarray
    D: np.ndarray = None
    probe: complex = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("E", "A", "B", "L"):
            object.__setattr__(self, name, frozen(getattr(self, name), name))
        N1, m, p = self.A.shape[0], self.B.shape[1], self.L.shape[0]
        D = np.zeros((p, m)) if self.D is None else self.D
        object.__setattr__(self, "D", frozen(D, "D"))
        _check_shapes(
            {"E": self.E, "A": self.A, "B": self.B, "L": self.L, "D": self.D},
            {"A": (N1, N1), "E": (N1, N1), "B": (N1, None), "L": (None, N1), "D": (p, m)},
        )
        object.__setattr__(self, "probe", _find_probe(self.pencil_lu))

    @property
    def N1(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.L.shape[0]

    def pencil(self, s):
        return s * self.E - self.A

    def pencil_lu(self, s):
        return lu_factor(self.pencil(s))

    def transfer(self, s):
        try:
            lu = self.pencil_lu(s)
        except SingularMatrix as exc:
            raise PoleOrSingular(f"sE - A singular at s={s}: {exc}") from None
        return self.D + self.L @ lu.solve(self.B)


@dataclass(frozen=True, eq=False)
class SpecialSecondOrderSystem:
    """``P1 x' + P0 x + P_{-1} int x = B u``, ``y = D u + L_out x``.

    ``P_{-1}`` is held in factored form ``F1 G F2^H`` (``variant="AF1"``) or
    ``F1 G^{-1} F2^H`` (``variant="AF2"``). ``N0 = 0`` means ``P_{-1} = 0``.
    """

    P1: np.ndarray
    P0: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    G: np.ndarray
    B: np.ndarray
    L_out: np.ndarray
    D: np.ndarray = None
    variant: str = "AF2"
    probe: complex = field(init=False, repr=False)

    def __post_init__(self):
        if self.variant not in ("AF1", "AF2"):
            raise ValueError(f"variant must be 'AF1' or 'AF2', got {self.variant!r}")
        for name in ("P1", "P0", "B", "L_out"):
            object.__setattr__(self, name, frozen(getattr(self, name), name))
        N = self.P1.shape[0]
        F1 = np.zeros((N, 0)) if self.F1 is None else self.F1
        F2 = F1 if self.F2 is None else self.F2
        G = np.zeros((0, 0)) if self.G is None else self.G
        object.__setattr__(self, "F1", frozen(np.asarray(F1).reshape(N, -1), "F1"))
        object.__setattr__(self, "F2", frozen(np.asarray(F2).reshape(N, -1), "F2"))
        N0 = self.F1.shape[1]
        object.__setattr__(self, "G", frozen(np.asarray(G).reshape(N0, N0), "G"))
        m, p = self.B.shape[1], self.L_out.shape[0]
        D = np.zeros((p, m)) if self.D is None else self.D
        object.__setattr__(self, "D", frozen(D, "D"))
        _check_shapes(
            {"P1": self.P1, "P0": self.P0, "F1": self.F1, "F2": self.F2, "G": self.G,
             "B": self.B, "L_out": self.L_out, "D": self.D},
            {"P1": (N, N), "P0": (N, N), "F1": (N, N0), "F2": (N, N0), "G": (N0, N0),
             "B": (N, None), "L_out": (None, N), "D": (p, m)},
        )
        if self.variant == "AF2" and N0 > 0:
            try:
                lu_factor(self.G)
            except SingularMatrix:
                raise SingularInnerG("variant AF2 needs a nonsingular G") from None
        object.__setattr__(self, "probe", _find_probe(self.inner_lu))

    @property
    def N(self):
        return self.P1.shape[0]

    @property
    def N0(self):
        return self.G.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.L_out.shape[0]

    def p_minus1(self):
        """Dense ``P_{-1}``."""
        if self.N0 == 0:
            return np.zeros((self.N, self.N), dtype=np.result_type(self.P1, self.P0))
        if self.variant == "AF1":
            return self.F1 @ self.G @ self.F2.conj().T
        return self.F1 @ lu_factor(self.G).solve(self.F2.conj().T)

    def inner(self, s):
        K = s * self.P1 + self.P0
        if self.N0:
            if s == 0:
                raise SingularMatrix("s = 0 is a pole when P_{-1} is present")
            K = K + self.p_minus1() / s
        return K

    def inner_lu(self, s):
        return lu_factor(self.inner(s))

    def transfer(self, s):
        try:
            lu = self.inner_lu(s)
        except SingularMatrix as exc:
            raise PoleOrSingular(f"s P1 + P0 + P_-1/s singular at s={s}: {exc}") from None
        return self.D + self.L_out @ lu.solve(self.B)


@dataclass(frozen=True, eq=False)
class HigherOrderSystem:
    """``sum_i P_i x^(i) = B u``, ``y = D u + sum_j L_j x^(j)``.

    `P` holds ``P_0 .. P_l`` and `Ls` holds ``L_0 .. L_{l-1}``.
    """

    P: tuple
    B: np.ndarray
    Ls: tuple
    D: np.ndarray = None
    probe: complex = field(init=False, repr=False)

    def __post_init__(self):
        P = tuple(frozen(p, f"P{i}") for i, p in enumerate(self.P))
        if len(P) < 2:
            raise ValueError("order l >= 1 needs at least P0 and P1")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "B", frozen(self.B, "B"))
        Ls = tuple(frozen(x, f"L{j}") for j, x in enumerate(self.Ls))
        object.__setattr__(self, "Ls", Ls)
        N, l = P[0].shape[0], len(P) - 1
        if len(Ls) != l:
            raise ValueError(f"order {l} system needs {l} output matrices, got {len(Ls)}")
        m, p = self.B.shape[1], Ls[0].shape[0]
        D = np.zeros((p, m)) if self.D is None else self.D
        object.__setattr__(self, "D", frozen(D, "D"))
        named = {f"P{i}": x for i, x in enumerate(P)}
        named.update({f"L{j}": x for j, x in enumerate(Ls)})
        named.update(B=self.B, D=self.D)
        rules = {f"P{i}": (N, N) for i in range(l + 1)}
        rules.update({f"L{j}": (p, N) for j in range(l)})
        rules.update(B=(N, m), D=(p, m))
        _check_shapes(named, rules)
        object.__setattr__(self, "probe", _find_probe(lambda s: lu_factor(self.poly(s))))

    @property
    def l(self):
        return len(self.P) - 1

    @property
    def N(self):
        return self.P[0].shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.Ls[0].shape[0]

    def poly(self, s):
        out = self.P[-1] * 1.0
        for Pi in reversed(self.P[:-1]):
            out = out * s + Pi
        return out

    def out_poly(self, s):
        out = self.Ls[-1] * 1.0
        for Lj in reversed(self.Ls[:-1]):
            out = out * s + Lj
        return out

    def transfer(self, s):
        try:
            lu = lu_factor(self.poly(s))
        except SingularMatrix as exc:
            raise PoleOrSingular(f"P(s) singular at s={s}: {exc}") from None
        return self.D + self.out_poly(s) @ lu.solve(self.B)


def eval_transfer(sys, s):
    """Evaluate the p x m transfer matrix of any system at `s`."""
    return sys.transfer(complex(s) if np.iscomplexobj(s) else s)


@dataclass
class HermitianReport:
    ok: bool
    failures: list

    def __bool__(self):
        return self.ok


def _herm_defect(X):
    return max_norm(X - X.conj().T)


def _close(X, Y, rtol):
    scale = max(max_norm(X), max_norm(Y))
    return max_norm(X - Y) <= rtol * scale


def is_hermitian(sys, rtol=HERMITIAN_RTOL):
    """Check the Hermitian-system conditions entrywise.

    Second order: ``L_out = B^H``, ``P0``, ``P1``, ``G`` Hermitian and
    ``F1 = F2``. Order l: every ``P_i`` Hermitian, ``L_0 = B^H`` and all
    higher output matrices zero. Deviations are measured relative to the
    max-norm of the matrix involved.
    """
    fails = []
    if isinstance(sys, SpecialSecondOrderSystem):
        if not (sys.L_out.shape == sys.B.conj().T.shape and _close(sys.L_out, sys.B.conj().T, rtol)):
            fails.append("L_out")
        for name in ("P0", "P1", "G"):
            X = getattr(sys, name)
            if _herm_defect(X) > rtol * max_norm(X):
                fails.append(name)
        if not _close(sys.F1, sys.F2, rtol):
            fails.append("F1/F2")
    elif isinstance(sys, HigherOrderSystem):
        for i, X in enumerate(sys.P):
            if _herm_defect(X) > rtol * max_norm(X):
                fails.append(f"P{i}")
        if not (sys.Ls[0].shape == sys.B.conj().T.shape and _close(sys.Ls[0], sys.B.conj().T, rtol)):
            fails.append("L0")
        for j, X in enumerate(sys.Ls[1:], start=1):
            if max_norm(X) != 0.0:
                fails.append(f"L{j}")
    else:
        raise TypeError(f"is_hermitian expects a second- or higher-order system, got {type(sys).__name__}")
    return HermitianReport(not fails, fails)


@dataclass(frozen=True)
class HermitianStructure:
    """J-matrix of a linearized Hermitian system.

    ``kind`` is ``"second_order"`` (``J = diag(I_N, -I_N0)``, Hermitian and
    involutory) or ``"higher_order"`` (J built from the shifted coefficient
    sums ``P^_j = sum_i s0^i P_{j+i}``).
    """

    J: np.ndarray
    kind: str
    s0: float


def hermitian_structure(sys, s0=0.0):
    if isinstance(sys, SpecialSecondOrderSystem):
        J = np.diag(np.concatenate([np.ones(sys.N), -np.ones(sys.N0)]))
        return HermitianStructure(J, "second_order", s0)
    if isinstance(sys, HigherOrderSystem):
        return HermitianStructure(_higher_order_j(sys, s0), "higher_order", s0)
    raise TypeError(f"no J-matrix for {type(sys).__name__}")


def _higher_order_j(sys, s0):
    l, N = sys.l, sys.N
    dtype = np.result_type(*sys.P, s0, float)
    Phat = [sum(s0**i * sys.P[j + i] for i in range(l - j + 1)) for j in range(l + 1)]
    I = np.eye(N)
    T = np.eye(l * N, dtype=dtype)
    for i in range(l - 1):
        T[i * N:(i + 1) * N, (i + 1) * N:(i + 2) * N] = -s0 * I
    H = np.zeros((l * N, l * N), dtype=dtype)
    for i in range(l):
        for k in range(l):
            if i == 0 and k == l - 1:
                H[:N, (l - 1) * N:] = I
            elif i + k + 1 <= l:
                H[i * N:(i + 1) * N, k * N:(k + 1) * N] = Phat[i + k + 1]
    return T @ H


def verify_j_relations(sys_fo, J, s0, rtol=J_RELATION_RTOL):
    """Check the J-relations of a linearized Hermitian system at real `s0`.

    Second order: ``J K = K^H J``, ``J E = E J``, ``J = J^H`` and
    ``L^H = J B`` with ``K = s0 E - A``. Order l: ``J K`` and ``J E`` are
    Hermitian and ``L^H = J B``; here J itself is not Hermitian.

    Returns a dict ``{relation: residual}``; raises :class:`RelationViolated`
    on the first relation whose entrywise residual exceeds ``rtol`` times the
    max-norm of the matrices compared.
    """
    if np.iscomplexobj(s0) and np.imag(s0) != 0:
        raise ValueError("J-relations require a real expansion point")
    s0 = float(np.real(s0))
    Jm = J.J
    K = s0 * sys_fo.E - sys_fo.A
    E = sys_fo.E
    if J.kind == "second_order":
        checks = [
            ("J(s0E-A) = (s0E-A)^H J", Jm @ K, K.conj().T @ Jm),
            ("JE = EJ", Jm @ E, E @ Jm),
            ("J = J^H", Jm, Jm.conj().T),
        ]
    else:
        JK, JE = Jm @ K, Jm @ E
        checks = [
            ("J(s0E-A) = (s0E-A)^H J^H", JK, JK.conj().T),
            ("JE = E^H J^H", JE, JE.conj().T),
        ]
    checks.append(("L^H = JB", sys_fo.L.conj().T, Jm @ sys_fo.B))
    report = {}
    for name, X, Y in checks:
        if X.shape != Y.shape:
            raise RelationViolated(name, float("inf"), 0.0)
        res = max_norm(X - Y)
        tol = rtol * max(max_norm(X), max_norm(Y))
        report[name] = res
        if res > tol:
            raise RelationViolated(name, res, tol)
    return report
