import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import null_space

from spar.spectral import RankTolerance, decompose, pinv_solve, project_out
from conftest import random_orthonormal_rows


def test_decompose_identity():
    spec = decompose(np.eye(2))
    np.testing.assert_allclose(spec.singular_values, [1.0, 1.0])
    assert spec.numerical_rank == 2


def test_decompose_rank_one():
    spec = decompose(np.array([[3.0, 0.0], [0.0, 0.0]]))
    np.testing.assert_allclose(spec.singular_values, [3.0, 0.0])
    assert spec.numerical_rank == 1


def test_decompose_invariants(rng):
    for shape in [(5, 3), (3, 5), (20, 4), (1, 6)]:
        m = rng.standard_normal(shape)
        spec = decompose(m)
        s = spec.singular_values
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
        k = min(shape)
        vt = spec.right_vectors
        assert vt.shape == (k, shape[1])
        assert np.max(np.abs(vt @ vt.T - np.eye(k))) <= 1e-10
        resid = np.linalg.norm(m - spec.reconstruct())
        assert resid <= 1e-8 * max(1.0, np.linalg.norm(m))


def test_sign_convention(rng):
    spec = decompose(rng.standard_normal((6, 4)))
    for v in spec.right_vectors:
        assert v[np.argmax(np.abs(v))] > 0


def test_decompose_rejects_nonfinite():
    with pytest.raises(ValueError):
        decompose(np.array([[1.0, np.nan]]))


def test_rank_tolerance_threshold():
    m = np.diag([1.0, 1e-13])
    assert decompose(m).numerical_rank == 1
    assert decompose(m, RankTolerance(0.0)).numerical_rank == 2


def test_row_permutation_leaves_singular_values(rng):
    m = rng.standard_normal((7, 3))
    s1 = decompose(m).singular_values
    s2 = decompose(m[rng.permutation(7)]).singular_values
    np.testing.assert_allclose(s1, s2, atol=1e-10, rtol=0)


def test_pinv_identity():
    np.testing.assert_allclose(pinv_solve(np.eye(2), np.array([3.0, 5.0])), [3.0, 5.0])


def test_pinv_min_norm():
    w = pinv_solve(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([2.0, 7.0]))
    np.testing.assert_allclose(w, [2.0, 0.0], atol=1e-15)


def test_pinv_normal_equations(rng):
    x = rng.standard_normal((20, 4))
    y = rng.standard_normal(20)
    expected = np.linalg.solve(x.T @ x, x.T @ y)
    w = pinv_solve(x, y)
    assert np.linalg.norm(w - expected) <= 1e-8 * np.linalg.norm(expected)
    assert np.linalg.norm(x.T @ (x @ w - y)) <= 1e-8 * np.linalg.norm(x, 2) * np.linalg.norm(y)


def test_pinv_noiseless_recovery(rng):
    x = rng.standard_normal((4, 6))
    w_star = x.T @ rng.standard_normal(4)  # in the row span
    w = pinv_solve(x, x @ w_star)
    assert np.linalg.norm(w - w_star) <= 1e-8 * np.linalg.norm(w_star)


def test_pinv_rank_deficient_null_space(rng):
    x = rng.standard_normal((10, 2)) @ rng.standard_normal((2, 5))
    w = pinv_solve(x, rng.standard_normal(10))
    assert np.max(np.abs(null_space(x).T @ w)) <= 1e-10


def test_pinv_dimension_mismatch():
    with pytest.raises(ValueError):
        pinv_solve(np.eye(3), np.ones(2))


def test_project_out_empty():
    w = np.array([1.0, 2.0])
    np.testing.assert_array_equal(project_out(w, []), w)


def test_project_out_full_basis(rng):
    basis = random_orthonormal_rows(rng, 4, 4)
    np.testing.assert_allclose(project_out(rng.standard_normal(4), basis), 0.0, atol=1e-14)


def test_project_out_simple():
    np.testing.assert_allclose(project_out(np.array([1.0, 1.0]), [np.array([0.0, 1.0])]), [1.0, 0.0])


def test_project_out_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        project_out(np.ones(2), [np.array([1.0, 1.0])])


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.data())
def test_project_out_properties(seed, d, data):
    rng = np.random.Generator(np.random.Philox(seed))
    k = data.draw(st.integers(0, d))
    basis = random_orthonormal_rows(rng, k, d)
    w = rng.standard_normal(d)
    p = project_out(w, basis)
    if k:
        assert np.max(np.abs(basis @ p)) <= 1e-10
        # the removed part lies in span(basis)
        diff = w - p
        np.testing.assert_allclose(basis.T @ (basis @ diff), diff, atol=1e-12)
    np.testing.assert_allclose(project_out(p, basis), p, atol=1e-12)
