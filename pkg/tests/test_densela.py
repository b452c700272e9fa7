import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spmor.densela import as_matrix, gram_schmidt, lu_factor, orthonormalize, solve
from spmor.errors import SingularMatrix


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1), cplx=st.booleans())
def test_lu_solve_matches_residual(n, seed, cplx):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + n * np.eye(n)
    if cplx:
        A = A + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((n, 2))
    x = solve(A, b)
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(A) * np.linalg.norm(x)


def test_singular_matrix_raises():
    with pytest.raises(SingularMatrix):
        lu_factor(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SingularMatrix):
        lu_factor(np.zeros((3, 3)))


def test_empty_system():
    lu = lu_factor(np.zeros((0, 0)))
    assert lu.solve(np.zeros((0, 2))).shape == (0, 2)


def test_as_matrix_shapes_and_finiteness():
    with pytest.raises(ValueError):
        as_matrix(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_matrix(np.ones((2, 2, 2)))
    assert as_matrix(np.ones(3)).shape == (3, 1)
    assert as_matrix(2.0).shape == (1, 1)


def test_gram_schmidt_drops_dependent_columns(rng):
    X = rng.standard_normal((6, 2))
    cols = np.column_stack([X[:, 0], X[:, 1], X[:, 0] + 2 * X[:, 1], np.zeros(6)])
    Q, kept, ratios = gram_schmidt(cols)
    assert kept == [0, 1]
    assert ratios[2] < 1e-12
    assert np.allclose(Q.T @ Q, np.eye(2), atol=1e-14)


def test_orthonormalize_against_existing(rng):
    A, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    new = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    Q, kept = orthonormalize(new, A)
    assert kept == [0, 1]
    assert np.max(abs(A.T @ Q)) < 1e-14
    assert np.allclose(Q.conj().T @ Q, np.eye(2), atol=1e-14)
