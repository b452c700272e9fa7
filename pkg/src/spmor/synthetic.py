"""Seeded generators for test circuits and random system corpora."""

import numpy as np

from .netlist import parse_netlist
from .systems import HigherOrderSystem, SpecialSecondOrderSystem


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def rc_ladder(sections, seed=0, two_port=True):
    """RC ladder: node k --R-- node k+1 with a capacitor from every node to ground."""
    if sections < 1:
        raise ValueError("sections must be >= 1")
    rng = _rng(seed)
    lines = [f"# RC ladder, {sections} sections, seed {seed}"]
    for k in range(1, sections + 1):
        lines.append(f"C c{k} {k} 0 {rng.uniform(0.2e-12, 1e-12)!r}")
        if k < sections:
            lines.append(f"R r{k} {k} {k + 1} {rng.uniform(0.5, 2.0)!r}")
    lines.append(f"R rterm {sections} 0 {rng.uniform(20.0, 80.0)!r}")
    lines.append("I i1 1 0 PORT 1")
    if two_port and sections > 1:
        lines.append(f"I i2 {sections} 0 PORT 2")
    return "\n".join(lines) + "\n"


def rlc_ladder(sections, seed=0, couplings=0, two_port=True):
    """RLC ladder: node k --R-- mid --L-- node k+1, capacitors to ground.

    Element ranges (L 50-200 pH, C 20-100 fF) put the section resonances
    well above 10 GHz, so reduced models converge over 0.1-10 GHz.

    `couplings` adds that many K elements between neighbouring inductors,
    each with a coupling coefficient below 0.3 so the inductance matrix
    stays positive definite.
    """
    if sections < 1:
        raise ValueError("sections must be >= 1")
    if not 0 <= couplings <= max(sections - 2, 0):
        raise ValueError(f"couplings must be in 0..{max(sections - 2, 0)}")
    rng = _rng(seed)
    lines = [f"# RLC ladder, {sections} sections, seed {seed}"]
    inductors = []
    for k in range(1, sections + 1):
        lines.append(f"C c{k} n{k} 0 {rng.uniform(20e-15, 100e-15)!r}")
        if k < sections:
            lines.append(f"R r{k} n{k} m{k} {rng.uniform(0.5, 2.0)!r}")
            val = rng.uniform(50e-12, 200e-12)
            inductors.append(val)
            lines.append(f"L l{k} m{k} n{k + 1} {val!r}")
    lines.append(f"R rterm n{sections} 0 {rng.uniform(20.0, 80.0)!r}")
    for c in range(couplings):
        a, b = c + 1, c + 2
        coef = rng.uniform(0.05, 0.3)
        lines.append(f"K k{c + 1} l{a} l{b} {float(coef * np.sqrt(inductors[a - 1] * inductors[b - 1]))!r}")
    lines.append("I i1 n1 0 PORT 1")
    if two_port and sections > 1:
        lines.append(f"I i2 n{sections} 0 PORT 2")
    return "\n".join(lines) + "\n"


def ladder_netlist(kind, sections, seed=0, couplings=0):
    if kind == "rc-ladder":
        return parse_netlist(rc_ladder(sections, seed))
    if kind == "rlc-ladder":
        return parse_netlist(rlc_ladder(sections, seed, couplings))
    raise ValueError(f"unknown generator {kind!r}")


def _spd(rng, n, complex_=False):
    X = rng.standard_normal((n, n))
    if complex_:
        X = X + 1j * rng.standard_normal((n, n))
    return X @ X.conj().T / n + 0.5 * np.eye(n)


def _general(rng, r, c, complex_=False):
    X = rng.standard_normal((r, c))
    if complex_:
        X = X + 1j * rng.standard_normal((r, c))
    return X


def random_second_order(seed, N, N0, m=1, variant="AF2", hermitian=True, omega=1.0, complex_=False):
    """Random special second-order system, frequency-scaled by `omega`.

    With ``omega != 1`` the data are rescaled so that the response at
    ``s = omega * sigma`` equals that of the unscaled system at ``sigma``.
    """
    rng = _rng(seed)
    if hermitian:
        P1, P0 = _spd(rng, N, complex_), _spd(rng, N, complex_)
        G = _spd(rng, N0, complex_) if N0 else np.zeros((0, 0))
        F1 = _general(rng, N, N0, complex_)
        F2 = F1
        B = _general(rng, N, m, complex_)
        L = B.conj().T
    else:
        P1 = _spd(rng, N) + 0.3 * _general(rng, N, N, complex_)
        P0 = _spd(rng, N) + 0.3 * _general(rng, N, N, complex_)
        G = (_spd(rng, N0) + 0.3 * _general(rng, N0, N0, complex_)) if N0 else np.zeros((0, 0))
        F1 = _general(rng, N, N0, complex_)
        F2 = _general(rng, N, N0, complex_)
        B = _general(rng, N, m, complex_)
        L = _general(rng, m, N, complex_)
    P1 = P1 / omega
    G = G / omega if variant == "AF2" else G * omega
    return SpecialSecondOrderSystem(P1=P1, P0=P0, F1=F1, F2=F2, G=G, B=B, L_out=L, variant=variant)


def random_higher_order(seed, N, l, m=1, hermitian=True, omega=1.0, complex_=False):
    """Random order-l system with ``P_i`` scaled by ``omega^-i``."""
    rng = _rng(seed)
    if hermitian:
        P = [_spd(rng, N, complex_) for _ in range(l + 1)]
        # make the middle coefficients indefinite for variety
        for i in range(1, l):
            P[i] = P[i] - 0.5 * _spd(rng, N, complex_)
        B = _general(rng, N, m, complex_)
        Ls = [B.conj().T] + [np.zeros((m, N))] * (l - 1)
    else:
        P = [_spd(rng, N) + 0.3 * _general(rng, N, N, complex_) for _ in range(l + 1)]
        B = _general(rng, N, m, complex_)
        Ls = [_general(rng, m, N, complex_) for _ in range(l)]
    P = [Pi / omega**i for i, Pi in enumerate(P)]
    Ls = [Lj / omega**j for j, Lj in enumerate(Ls)]
    return HigherOrderSystem(P=tuple(P), B=B, Ls=tuple(Ls))


def corpus(size=50, seed=2024, hermitian=None, omega=1.0):
    """Mixed corpus of second-order (AF1/AF2) and higher-order systems.

    `hermitian` None alternates Hermitian and general members.
    """
    rng = _rng(seed)
    out = []
    for k in range(size):
        herm = (k % 2 == 0) if hermitian is None else hermitian
        m = int(rng.integers(1, 4))
        child = int(rng.integers(0, 2**31))
        if k % 3 == 2:
            l = int(rng.integers(2, 5))
            N = int(rng.integers(max(m, 2), 9))
            out.append(random_higher_order(child, N, l, m, hermitian=herm, omega=omega))
        else:
            N = int(rng.integers(max(m, 2), 13))
            N0 = int(rng.integers(0, min(6, N) + 1))
            variant = "AF1" if k % 3 == 1 else "AF2"
            out.append(random_second_order(child, N, N0, m, variant, hermitian=herm, omega=omega))
    return out


__all__ = [
    "corpus",
    "ladder_netlist",
    "random_higher_order",
    "random_second_order",
    "rc_ladder",
    "rlc_ladder",
]
