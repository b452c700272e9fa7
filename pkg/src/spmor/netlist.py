"""RCL netlist parsing and modified nodal analysis.

Grammar, one element per line (``#`` starts a comment)::

    R|C|L <name> <n1> <n2> <value>
    K     <name> <L1> <L2> <mutual inductance>
    I     <name> <n+> <n-> PORT <k>

Node ``0`` is the datum node. Values accept scientific notation and the
suffixes f, p, n, u, m, k, meg, g (case-insensitive; ``m`` is milli).
"""

from dataclasses import dataclass, field
import json
import re

import numpy as np

from .errors import NonPdInductance, ParseError, ValidationError
from .systems import FirstOrderSystem, SpecialSecondOrderSystem

DATUM = "0"

SI_SUFFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "meg": 1e6,
    "g": 1e9,
}

_VALUE_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(meg|[fpnumkg])?$", re.IGNORECASE
)


def parse_value(token, line=None):
    m = _VALUE_RE.match(token)
    if m is None:
        raise ParseError(f"bad numeric value {token!r}", line)
    value = float(m.group(1))
    if m.group(2):
        value *= SI_SUFFIXES[m.group(2).lower()]
    return value


@dataclass(frozen=True)
class Element:
    kind: str
    name: str
    terminals: tuple
    value: float = 0.0
    port: int = None
    line: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Netlist:
    """Parsed circuit. `elements` keeps declaration order."""

    elements: tuple

    @property
    def nodes(self):
        """Non-datum node names in order of first appearance."""
        seen = {}
        for e in self.elements:
            if e.kind == "K":
                continue
            for t in e.terminals:
                if t != DATUM:
                    seen.setdefault(t, None)
        return tuple(seen)

    def of_kind(self, kind):
        return [e for e in self.elements if e.kind == kind]

    @property
    def ports(self):
        """Current sources sorted by port index."""
        return sorted(self.of_kind("I"), key=lambda e: e.port)

    @property
    def m(self):
        return len(self.of_kind("I"))


def parse_netlist(text):
    """Parse netlist text into a validated :class:`Netlist`."""
    elements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0].upper()
        if kind in ("R", "C", "L"):
            if len(tok) != 5:
                raise ParseError(f"{kind} element needs 4 fields, got {len(tok) - 1}", lineno)
            _, name, n1, n2, val = tok
            elements.append(Element(kind, name, (n1, n2), parse_value(val, lineno), line=lineno))
        elif kind == "K":
            if len(tok) != 5:
                raise ParseError(f"K element needs 4 fields, got {len(tok) - 1}", lineno)
            _, name, l1, l2, val = tok
            elements.append(Element("K", name, (l1, l2), parse_value(val, lineno), line=lineno))
        elif kind == "I":
            if len(tok) != 6 or tok[4].upper() != "PORT":
                raise ParseError("expected 'I <name> <n+> <n-> PORT <k>'", lineno)
            _, name, n1, n2, _, k = tok
            if not re.fullmatch(r"\d+", k):
                raise ParseError(f"bad port number {k!r}", lineno)
            elements.append(Element("I", name, (n1, n2), port=int(k), line=lineno))
        else:
            raise ParseError(f"unknown element kind {tok[0]!r}", lineno)
    nl = Netlist(tuple(elements))
    _validate(nl)
    return nl


def _validate(nl):
    names = {}
    for e in nl.elements:
        key = (e.kind, e.name)
        if key in names:
            raise ValidationError(f"duplicate {e.kind} element name {e.name!r}", e.line)
        names[key] = e
        if e.kind in ("R", "C", "L"):
            if not e.value > 0:
                raise ValidationError(f"{e.kind} {e.name}: value must be > 0, got {e.value!r}", e.line)
        if e.kind == "K":
            if e.value == 0:
                raise ValidationError(f"K {e.name}: zero mutual inductance", e.line)
            if e.terminals[0] == e.terminals[1]:
                raise ValidationError(f"K {e.name}: couples {e.terminals[0]!r} with itself", e.line)
        elif e.terminals[0] == e.terminals[1]:
            raise ValidationError(f"{e.kind} {e.name}: both terminals on node {e.terminals[0]!r}", e.line)
    inductors = {e.name for e in nl.of_kind("L")}
    pairs = set()
    for e in nl.of_kind("K"):
        for ref in e.terminals:
            if ref not in inductors:
                raise ValidationError(f"K {e.name}: unknown inductor {ref!r}", e.line)
        pair = frozenset(e.terminals)
        if pair in pairs:
            raise ValidationError(f"K {e.name}: inductor pair already coupled", e.line)
        pairs.add(pair)
    ports = sorted(e.port for e in nl.of_kind("I"))
    if ports != list(range(1, len(ports) + 1)):
        bad = next(e for e in nl.of_kind("I"))
        raise ValidationError(f"port numbers must be 1..{len(ports)} without gaps, got {ports}", bad.line)


def _fmt(value):
    return repr(float(value))


def serialize_netlist(nl):
    lines = []
    for e in nl.elements:
        if e.kind == "I":
            lines.append(f"I {e.name} {e.terminals[0]} {e.terminals[1]} PORT {e.port}")
        else:
            lines.append(f"{e.kind} {e.name} {e.terminals[0]} {e.terminals[1]} {_fmt(e.value)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MnaData:
    """Incidence and element matrices of an RCL circuit.

    Incidence matrices are branch x non-datum-node with a +1 in the column of
    the first terminal and -1 in the column of the second.
    """

    A_i: np.ndarray
    A_g: np.ndarray
    A_c: np.ndarray
    A_l: np.ndarray
    G: np.ndarray
    C: np.ndarray
    L: np.ndarray
    nodes: tuple
    node_index: dict = field(compare=False)

    @property
    def N(self):
        return len(self.nodes)

    @property
    def N0(self):
        return self.A_l.shape[0]

    @property
    def m(self):
        return self.A_i.shape[0]

    def to_dict(self):
        from .serialize import matrix_to_json

        out = {"kind": "mna", "nodes": list(self.nodes)}
        for name in ("A_i", "A_g", "A_c", "A_l", "G", "C", "L"):
            out[name] = matrix_to_json(getattr(self, name))
        return out

    def to_json(self):
        return json.dumps(self.to_dict())


def _incidence(elements, col):
    A = np.zeros((len(elements), len(col)))
    for r, e in enumerate(elements):
        a, b = e.terminals
        if a != DATUM:
            A[r, col[a]] = 1.0
        if b != DATUM:
            A[r, col[b]] = -1.0
    return A


def assemble_mna(nl):
    """Assemble incidence and element matrices.

    Rows of A_g, A_c, A_l follow declaration order; rows of A_i follow the
    port index so that column k of ``B = A_i^T`` is port k+1.
    """
    nodes = nl.nodes
    if not nodes:
        raise ValidationError("netlist has no non-datum nodes")
    if nl.m == 0:
        raise ValidationError("netlist defines no current-source ports")
    col = {name: i for i, name in enumerate(nodes)}
    res, caps, inds = nl.of_kind("R"), nl.of_kind("C"), nl.of_kind("L")
    A_i = _incidence(nl.ports, col)
    A_g = _incidence(res, col)
    A_c = _incidence(caps, col)
    A_l = _incidence(inds, col)
    G = np.diag([1.0 / e.value for e in res]) if res else np.zeros((0, 0))
    C = np.diag([e.value for e in caps]) if caps else np.zeros((0, 0))
    L = np.diag([e.value for e in inds]) if inds else np.zeros((0, 0))
    lidx = {e.name: i for i, e in enumerate(inds)}
    for k in nl.of_kind("K"):
        a, b = lidx[k.terminals[0]], lidx[k.terminals[1]]
        L[a, b] += k.value
        L[b, a] += k.value
    if inds:
        try:
            np.linalg.cholesky(L)
        except np.linalg.LinAlgError:
            raise NonPdInductance("inductance matrix is not positive definite") from None
    return MnaData(A_i, A_g, A_c, A_l, G, C, L, nodes, col)


def mna_to_second_order(d):
    """Special second-order form with ``P_{-1} = A_l^T L^{-1} A_l`` kept factored."""
    P1 = d.A_c.T @ d.C @ d.A_c
    P0 = d.A_g.T @ d.G @ d.A_g
    F = d.A_l.T.copy()
    B = d.A_i.T.copy()
    return SpecialSecondOrderSystem(
        P1=P1,
        P0=P0,
        F1=F,
        F2=F,
        G=d.L,
        B=B,
        L_out=B.conj().T,
        D=np.zeros((d.m, d.m)),
        variant="AF2",
    )


def mna_to_first_order(d):
    """First-order DAE form with state ``[v_n; i_l]``."""
    N, N0 = d.N, d.N0
    P1 = d.A_c.T @ d.C @ d.A_c
    P0 = d.A_g.T @ d.G @ d.A_g
    E = np.block([[P1, np.zeros((N, N0))], [np.zeros((N0, N)), d.L]])
    A = np.block([[-P0, -d.A_l.T], [d.A_l, np.zeros((N0, N0))]])
    B = np.vstack([d.A_i.T, np.zeros((N0, d.m))])
    return FirstOrderSystem(E=E, A=A, B=B, L=B.conj().T, D=np.zeros((d.m, d.m)))
