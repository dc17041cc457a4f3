import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_e_all1, make_e_none, rotation
from qfaequiv import linalg
from qfaequiv.e1qfa import (
    E1QFA,
    Superoperator,
    accept_prob_e,
    apply_projected,
    apply_superop,
    check_density,
    diag_sum_e,
    from_mm,
    noncumulative_e,
    permute_states_e,
    theta_e,
    validate_e,
    vartheta_e,
    xi_e,
)
from qfaequiv.errors import EmptyWord, IncompleteKraus, MissingEndmarker, ValidationError
from qfaequiv.generate import random_e, random_kraus, random_mm
from qfaequiv.mm1qfa import MM1QFA, accept_prob_mm

seeds = st.integers(0, 2**32 - 1)
words = st.lists(st.sampled_from("ab"), max_size=5).map("".join)
R = rotation(np.pi / 4)
C = S = np.sqrt(0.5)


def e_rot_with(a_ops):
    return E1QFA(["q1", "q2"], ["a"], ["q2"], [], {"#": [np.eye(2)], "a": a_ops, "$": [R]}, "q1")


def test_validate_examples(e_rot):
    validate_e(e_rot)
    with pytest.raises(IncompleteKraus) as exc:
        validate_e(e_rot_with([np.diag([1, 0])]))
    assert exc.value.symbol == "a"
    validate_e(e_rot_with([np.diag([1, 0]), np.diag([0, 1])]))


def test_validate_missing_endmarker():
    a = E1QFA(["q"], ["a"], [], [], {"a": [[[1]]], "$": [[[1]]]}, "q")
    with pytest.raises(MissingEndmarker):
        validate_e(a)


def test_apply_superop_examples():
    rho = np.diag([1.0, 0.0]).astype(complex)
    np.testing.assert_allclose(apply_superop(Superoperator([np.eye(2)]), rho), rho)
    out = apply_superop(Superoperator([R]), rho)
    np.testing.assert_allclose(out, np.outer([C, S], [C, S]), atol=1e-15)
    dephase = Superoperator([np.diag([1, 0]), np.diag([0, 1])])
    np.testing.assert_allclose(apply_superop(dephase, out), np.diag([0.5, 0.5]), atol=1e-15)


def test_apply_projected_examples(e_rot):
    rho = np.diag([1.0, 0.0]).astype(complex)
    s = Superoperator([R])
    np.testing.assert_allclose(apply_projected(s, np.eye(2), rho), apply_superop(s, rho))
    pa, pg, _ = e_rot.projectors
    np.testing.assert_allclose(apply_projected(e_rot.superoperators["#"], pa, rho), 0)
    assert np.trace(apply_projected(e_rot.superoperators["$"], pa, rho)).real == pytest.approx(0.5, abs=1e-15)


def test_accept_prob_worked_values(e_rot):
    for w in ["", "a", "aaa"]:
        assert accept_prob_e(make_e_all1(), w) == pytest.approx(1.0, abs=1e-15)
    assert accept_prob_e(e_rot, "") == pytest.approx(0.5, abs=1e-12)
    assert accept_prob_e(e_rot, "a") == pytest.approx(0.75, abs=1e-12)
    assert accept_prob_e(e_rot, "aa") == pytest.approx(0.875, abs=1e-12)


def test_noncumulative_worked_values(e_rot):
    assert noncumulative_e(e_rot, "") == pytest.approx(0.5, abs=1e-12)
    assert noncumulative_e(e_rot, "a") == pytest.approx(0.25, abs=1e-12)
    for w in ["", "a", "aa"]:
        assert noncumulative_e(make_e_none(), w) == 0.0


def test_xi_examples(e_rot):
    ident = E1QFA(["q1", "q2"], ["a"], ["q2"], [], {s: [np.eye(2)] for s in "#a$"}, "q1")
    np.testing.assert_allclose(xi_e(ident, "a"), 0, atol=1e-15)
    np.testing.assert_allclose(xi_e(make_e_none(), "a"), 0)
    np.testing.assert_allclose(xi_e(e_rot, "a"), [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)


def test_vartheta_examples(e_rot):
    np.testing.assert_allclose(vartheta_e(e_rot, "a"), xi_e(e_rot, "a"))
    pg = e_rot.projectors[1]
    b = pg @ R
    np.testing.assert_allclose(vartheta_e(e_rot, "aa"), b.conj().T @ xi_e(e_rot, "a") @ b, atol=1e-15)
    np.testing.assert_allclose(vartheta_e(make_e_none(), "aaa"), 0)
    with pytest.raises(EmptyWord):
        vartheta_e(e_rot, "")


def test_theta_examples(e_rot):
    np.testing.assert_allclose(theta_e(e_rot, "a"), [[0.25, 0], [0, 0]], atol=1e-15)
    assert theta_e(e_rot, "a")[0, 0].real == pytest.approx(0.25, abs=1e-12)
    np.testing.assert_allclose(theta_e(make_e_none(), "aa"), 0)
    assert theta_e(e_rot, "")[0, 0].real == pytest.approx(accept_prob_e(e_rot, ""), abs=1e-12)


def test_check_density():
    check_density(np.diag([0.5, 0.5]), full=True)
    with pytest.raises(ValidationError):
        check_density(np.diag([1.0, 1.0]))
    with pytest.raises(ValidationError):
        check_density(np.array([[0.5, 0.6], [0.6, 0.5]]), full=True)


def test_diag_sum_pads_kraus_lists():
    a1 = random_e(2, 2, 1, max_kraus=1)
    a2 = random_e(3, 2, 2, max_kraus=3)
    s = diag_sum_e(a1, a2)
    validate_e(s)
    for sym, op in s.superoperators.items():
        assert len(op) == max(len(a1.superoperators[sym]), len(a2.superoperators[sym]))
        assert op.completeness_defect() <= 1e-10


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3), words)
def test_against_straight_line_oracle(seed, n, word):
    a = random_e(n, 2, seed)
    K, Pa, Pg, q0 = oracles.e_parts(a)
    assert accept_prob_e(a, word) == pytest.approx(oracles.e_prob(K, Pa, Pg, q0, word), abs=1e-12)
    if word:
        np.testing.assert_allclose(vartheta_e(a, word), oracles.e_vartheta(K, Pa, Pg, word), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3), words)
def test_reduced_form_and_telescoping(seed, n, word):
    a = random_e(n, 2, seed)
    assert noncumulative_e(a, word, "reduced") == pytest.approx(noncumulative_e(a, word), abs=1e-12)
    total = sum(noncumulative_e(a, word[:k]) for k in range(len(word) + 1))
    assert accept_prob_e(a, word) == pytest.approx(total, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3), st.sampled_from("ab"), words)
def test_vartheta_recurrence_and_bilinear(seed, n, y, word):
    a = random_e(n, 2, seed)
    q0 = a.initial_index
    theta = theta_e(a, y + word)
    np.testing.assert_allclose(theta, theta.conj().T, atol=1e-10)
    assert theta[q0, q0].real == pytest.approx(noncumulative_e(a, y + word), abs=1e-12)
    if word:
        expected = sum(linalg.sandwich(b, vartheta_e(a, word)) for b in a.go_ops(y))
        np.testing.assert_allclose(vartheta_e(a, y + word), expected, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3), words)
def test_block_structure_of_diag_sum(seed, n1, n2, word):
    a1, a2 = random_e(n1, 2, seed), random_e(n2, 2, seed + 1)
    theta = theta_e(diag_sum_e(a1, a2), word)
    np.testing.assert_allclose(theta[:n1, n1:], 0, atol=1e-12)
    np.testing.assert_allclose(theta[n1:, :n1], 0, atol=1e-12)
    np.testing.assert_allclose(theta[:n1, :n1], theta_e(a1, word), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4), words)
def test_mm_embedding(seed, n, word):
    mm = random_mm(n, 2, seed)
    # an E-1QFA starts in a basis state and measures right after '#', so the
    # MM automaton must start in a non-halting basis state for the two to agree
    basis = np.zeros(n)
    basis[0] = 1
    mm = MM1QFA(mm.states, mm.alphabet, mm.accepting - {"q1"}, mm.rejecting - {"q1"}, mm.unitaries, basis)
    e = from_mm(mm, mm.states[0])
    validate_e(e)
    assert accept_prob_e(e, word) == pytest.approx(accept_prob_mm(mm, word), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), words)
def test_relabeling_invariance(seed, n, word):
    a = random_e(n, 2, seed)
    perm = list(np.random.default_rng(seed).permutation(n))
    assert accept_prob_e(permute_states_e(a, perm), word) == pytest.approx(accept_prob_e(a, word), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_channel_trace_and_decomposition(seed, n, count):
    rng = np.random.default_rng(seed)
    s = Superoperator(random_kraus(n, count, rng))
    assert s.completeness_defect() <= 1e-10
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    out = apply_superop(s, rho)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-10)
    masks = rng.integers(0, 3, size=n)
    ps = [np.diag((masks == r).astype(float)) for r in range(3)]
    parts = sum(np.trace(apply_projected(s, p, rho)).real for p in ps)
    assert parts == pytest.approx(1.0, abs=1e-10)
