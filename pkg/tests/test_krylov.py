import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import MIN_RC, MIN_RLC, RC3, RC3G, build
from spmor import (
    ExpansionPointIsPole,
    FirstOrderSystem,
    TargetUnreachable,
    build_basis,
    linearize,
    make_operator,
)
from spmor.synthetic import random_higher_order, random_second_order


def krylov_blocks(fo, s0, sources):
    """Explicit ``M^i R[:, sources[i]]`` by dense inversion."""
    K = fo.pencil(s0)
    M = np.linalg.solve(K, fo.E)
    R = np.linalg.solve(K, fo.B)
    out, W = [], R
    for i, src in enumerate(sources):
        out.append(W[:, list(src)])
        W = M @ W
    return out


def span_residual(V, X):
    return np.linalg.norm(X - V @ (V.conj().T @ X)) / max(np.linalg.norm(X), 1e-300)


def test_minimal_operators():
    _, _, fo = build(MIN_RC)
    op = make_operator(fo, 0.0)
    assert np.array_equal(op.start_block(), [[1.0]]) and np.array_equal(op.apply(np.ones((1, 1))), [[1.0]])
    _, _, fo = build(MIN_RLC)
    assert np.allclose(make_operator(fo, 1.0).start_block().ravel(), [1 / 3, 1 / 3], rtol=1e-15)


def test_pole_expansion_point():
    fo = FirstOrderSystem(E=[[1.0]], A=[[0.75]], B=[[1.0]], L=[[1.0]])
    with pytest.raises(ExpansionPointIsPole):
        make_operator(fo, 0.75)


def test_minimal_rc_basis():
    _, _, fo = build(MIN_RC)
    b = build_basis(make_operator(fo, 0.0), 1)
    assert np.array_equal(np.abs(b.V), [[1.0]]) and b.boundaries == (1,)


def test_floating_ladder_has_pole_at_zero():
    _, _, fo = build(RC3)
    with pytest.raises(ExpansionPointIsPole):
        make_operator(fo, 0.0)


def test_ladder_span():
    _, _, fo = build(RC3G)
    b = build_basis(make_operator(fo, 0.0), 2)
    assert b.boundaries == (1, 2)
    R, MR = krylov_blocks(fo, 0.0, [(0,), (0,)])
    assert span_residual(b.V, np.hstack([R, MR])) < 1e-10


def test_duplicated_column_deflates():
    sys = random_second_order(11, 6, 2, m=2)
    B = np.column_stack([sys.B[:, 0], sys.B[:, 0]])
    fo, _ = linearize(sys)
    fo = FirstOrderSystem(E=fo.E, A=fo.A, B=np.vstack([B, np.zeros((2, 2))]), L=np.zeros((1, 8)))
    b = build_basis(make_operator(fo, 1.0), 4)
    assert b.widths[0] == 1
    first = [d for d in b.deflations if d.iteration == 1]
    assert len(first) == 1 and first[0].column == 1 and first[0].residual < 1e-12


def test_target_unreachable_carries_basis():
    _, _, fo = build(MIN_RLC)
    with pytest.raises(TargetUnreachable) as exc:
        build_basis(make_operator(fo, 1.0), 5)
    assert exc.value.basis.n == 2 and exc.value.basis.exhausted


def test_mid_block_target_snaps_up():
    sys = random_second_order(2, 8, 3, m=3)
    fo, _ = linearize(sys)
    b = build_basis(make_operator(fo, 1.0), 4)
    assert b.n == 6 and b.boundaries == (3, 6) and b.requested_n == 4


def test_truncate_and_stats():
    sys = random_higher_order(6, 4, 2, m=2)
    fo, _ = linearize(sys)
    full = build_basis(make_operator(fo, 0.5))
    t = full.truncate(2)
    assert t.n == full.boundaries[1] and np.array_equal(t.V, full.V[:, : t.n])
    st_ = full.stats()
    assert st_["n"] == full.n and st_["boundaries"] == list(full.boundaries)
    with pytest.raises(ValueError):
        full.truncate(0)


def test_determinism():
    sys = random_second_order(4, 7, 3, m=2, hermitian=False)
    fo, _ = linearize(sys)
    a = build_basis(make_operator(fo, 0.8 + 0.2j))
    b = build_basis(make_operator(fo, 0.8 + 0.2j))
    assert a.boundaries == b.boundaries and a.deflations == b.deflations
    assert np.array_equal(a.V, b.V)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), N=st.integers(2, 9), N0=st.integers(0, 4), m=st.integers(1, 3),
       s0=st.sampled_from([0.5, 1.0, 0.3 + 0.7j]), dup=st.booleans())
def test_basis_invariants(seed, N, N0, m, s0, dup):
    sys = random_second_order(seed, N, N0, m, hermitian=seed % 2 == 0)
    fo, _ = linearize(sys)
    if dup:
        B = np.hstack([fo.B, fo.B[:, :1] * 2.0])
        fo = FirstOrderSystem(E=fo.E, A=fo.A, B=B, L=np.zeros((1, fo.N1)))
    b = build_basis(make_operator(fo, s0))
    assert np.linalg.norm(b.V.conj().T @ b.V - np.eye(b.n)) < 1e-12
    assert all(w1 >= w2 for w1, w2 in zip(b.widths, b.widths[1:]))
    assert b.boundaries[-1] == b.n <= fo.N1
    blocks = krylov_blocks(fo, s0, b.sources)
    for j in range(1, b.j + 1):
        Vj = b.V[:, : b.boundaries[j - 1]]
        for X in blocks[:j]:
            assert span_residual(Vj, X) < 1e-8
