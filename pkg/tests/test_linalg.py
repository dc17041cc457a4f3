import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfaequiv import linalg
from qfaequiv.errors import InvalidShape


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_conj_transpose_row():
    out = linalg.conj_transpose(np.array([[0, 1j]]))
    assert out.shape == (2, 1)
    np.testing.assert_array_equal(out, [[0], [-1j]])


def test_conj_transpose_identity_and_involution():
    np.testing.assert_array_equal(linalg.conj_transpose(np.eye(2)), np.eye(2))
    m = rand_c(np.random.default_rng(0), 3, 3)
    np.testing.assert_array_equal(linalg.conj_transpose(linalg.conj_transpose(m)), m)


def test_diag_sum_examples():
    np.testing.assert_array_equal(linalg.diag_sum([[2]], [[3]]), [[2, 0], [0, 3]])
    np.testing.assert_array_equal(linalg.diag_sum(np.eye(2), np.eye(3)), np.eye(5))


def test_diag_sum_rejects_non_square():
    with pytest.raises(InvalidShape):
        linalg.diag_sum(np.ones((1, 2)), np.eye(2))


def test_trace_examples():
    assert linalg.trace(np.eye(4)) == 4
    assert linalg.trace(np.zeros((3, 3))) == 0
    with pytest.raises(InvalidShape):
        linalg.trace(np.ones((2, 3)))


@given(st.integers(0, 2**32 - 1))
def test_trace_identities(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_c(rng, 3, 3), rand_c(rng, 3, 3)
    assert linalg.trace(a @ b) == pytest.approx(linalg.trace(b @ a), abs=1e-10)
    c = rand_c(rng, 2, 2)
    assert linalg.trace(linalg.diag_sum(a, c)) == pytest.approx(linalg.trace(a) + linalg.trace(c), abs=1e-12)


def test_results_are_read_only():
    out = linalg.diag_sum(np.eye(1), np.eye(1))
    with pytest.raises(ValueError):
        out[0, 0] = 5


def test_as_matrix_rejects_nan():
    with pytest.raises(InvalidShape):
        linalg.as_matrix([[np.nan]])


def test_span_insert_examples():
    basis = linalg.SpanBasis.for_shape(2)
    basis, in_span = linalg.span_insert(basis, np.eye(2), tag="I")
    assert not in_span and len(basis) == 1
    basis2, in_span = linalg.span_insert(basis, 2 * np.eye(2))
    assert in_span and basis2 is basis
    _, in_span = linalg.span_insert(basis, np.zeros((2, 2)))
    assert in_span
    _, in_span = linalg.span_insert(linalg.SpanBasis.for_shape(2), np.zeros((2, 2)))
    assert in_span


def test_span_insert_shape_mismatch():
    with pytest.raises(InvalidShape):
        linalg.span_insert(linalg.SpanBasis.for_shape(2), np.eye(3))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_span_basis_invariants(seed, n):
    rng = np.random.default_rng(seed)
    basis = linalg.SpanBasis.for_shape(n)
    # low-rank stream: random combinations of a few generators, then fresh directions
    gens = [rand_c(rng, n, n) for _ in range(2)]
    stream = [sum(rng.standard_normal() * g for g in gens) for _ in range(4)]
    stream += [rand_c(rng, n, n) for _ in range(n * n + 3)]
    for m in stream:
        before = len(basis)
        basis, in_span = linalg.span_insert(basis, m)
        assert basis.gram_defect() <= 1e-9
        assert len(basis) <= n * n
        # idempotent: a second insertion never grows the basis
        again, in_span2 = linalg.span_insert(basis, m)
        assert in_span2 and len(again) == len(basis)
        assert len(basis) == before + (0 if in_span else 1)
    assert len(basis) == n * n
