import numpy as np
from hypothesis import given, settings, strategies as st

from conftest import MIN_RLC, build
from spmor import HigherOrderSystem, SpecialSecondOrderSystem, linearize, linearize_higher_order, linearize_second_order
from spmor.synthetic import random_higher_order, random_second_order


def _points(rng, k=5):
    return rng.uniform(0.1, 2.0, k) + 1j * rng.uniform(-2.0, 2.0, k)


def test_minimal_rlc_af2_and_af1():
    _, so, _ = build(MIN_RLC)
    fo, lmap = linearize_second_order(so)
    assert np.array_equal(fo.A, [[-1, -1], [1, 0]]) and np.array_equal(fo.E, np.eye(2))
    assert (lmap.N, lmap.N0, lmap.N1) == (1, 1, 2)
    af1 = SpecialSecondOrderSystem(P1=so.P1, P0=so.P0, F1=[[1.0]], F2=[[1.0]], G=[[1.0]],
                                   B=so.B, L_out=so.L_out, variant="AF1")
    fo1, _ = linearize_second_order(af1)
    assert np.array_equal(fo1.A, fo.A) and np.array_equal(fo1.E, fo.E)


def test_companion_order_one_and_two():
    sys = HigherOrderSystem(P=([[2.0]], [[3.0]]), B=[[1.0]], Ls=([[1.0]],))
    fo, _ = linearize_higher_order(sys)
    assert np.array_equal(fo.E, [[3.0]]) and np.array_equal(fo.A, [[-2.0]])
    sys = HigherOrderSystem(P=([[1.0]], [[1.0]], [[1.0]]), B=[[1.0]], Ls=([[1.0]], [[0.0]]))
    fo, lmap = linearize_higher_order(sys)
    assert np.array_equal(fo.E, np.eye(2))
    assert np.array_equal(fo.A, [[0, 1], [-1, -1]])
    assert np.array_equal(fo.B, [[0], [1]]) and np.array_equal(fo.L, [[1, 0]])
    assert fo.transfer(1.0)[0, 0] == 1 / 3
    assert lmap.N1 == 2 * 1 and lmap.blocks == ((0, 1), (1, 2))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), N=st.integers(1, 8), N0=st.integers(0, 5), m=st.integers(1, 3),
       variant=st.sampled_from(["AF1", "AF2"]), herm=st.booleans())
def test_second_order_equivalence(seed, N, N0, m, variant, herm):
    sys = random_second_order(seed, N, N0, m, variant, hermitian=herm, complex_=not herm)
    fo, lmap = linearize(sys)
    assert fo.N1 == N + N0 == lmap.N1
    for s in _points(np.random.default_rng(seed)):
        H = sys.transfer(s)
        assert np.linalg.norm(fo.transfer(s) - H) <= 1e-9 * np.linalg.norm(H)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), N=st.integers(1, 6), l=st.integers(1, 4), m=st.integers(1, 3),
       herm=st.booleans())
def test_higher_order_equivalence(seed, N, l, m, herm):
    sys = random_higher_order(seed, N, l, m, hermitian=herm)
    fo, lmap = linearize(sys)
    assert fo.N1 == l * N == lmap.N1
    for s in _points(np.random.default_rng(seed)):
        H = sys.transfer(s)
        assert np.linalg.norm(fo.transfer(s) - H) <= 1e-9 * np.linalg.norm(H)


def test_first_order_passes_through():
    _, _, fo = build(MIN_RLC)
    same, lmap = linearize(fo)
    assert same is fo and lmap.source_kind == "first_order"
