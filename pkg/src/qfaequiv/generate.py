"""Seeded random automata for tests and experiments."""

from __future__ import annotations

import string

import numpy as np

from .e1qfa import E1QFA
from .mm1qfa import MM1QFA
from .words import LEFT_END, RIGHT_END


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of R fixed."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(rows, rng)[:, :cols]


def random_kraus(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``count`` Kraus operators of order ``n`` cut from a random isometry, so ``sum M^H M = I``."""
    v = random_isometry(n * count, n, rng)
    return [v[i * n : (i + 1) * n] for i in range(count)]


def default_alphabet(k: int) -> list[str]:
    if k <= 26:
        return list(string.ascii_lowercase[:k])
    return [f"s{i}" for i in range(k)]


def _partition(n: int, rng: np.random.Generator, states: list[str]):
    roles = rng.integers(0, 3, size=n)  # 0 accept, 1 reject, 2 non-halting
    accepting = [q for q, r in zip(states, roles) if r == 0]
    rejecting = [q for q, r in zip(states, roles) if r == 1]
    return accepting, rejecting


def random_mm(n: int, k: int, seed: int) -> MM1QFA:
    """Random MM-1QFA with ``n`` states over a ``k``-letter alphabet, deterministic per seed.

    Each state is independently accepting, rejecting or non-halting with
    probability 1/3.
    """
    if n < 1 or k < 1:
        raise ValueError("need at least one state and one symbol")
    rng = np.random.default_rng(seed)
    states = [f"q{i + 1}" for i in range(n)]
    alphabet = default_alphabet(k)
    unitaries = {s: random_unitary(n, rng) for s in alphabet + [RIGHT_END]}
    init = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    init /= np.linalg.norm(init)
    accepting, rejecting = _partition(n, rng, states)
    return MM1QFA(states, alphabet, accepting, rejecting, unitaries, init)


def random_e(n: int, k: int, seed: int, max_kraus: int = 2) -> E1QFA:
    """Random E-1QFA; every symbol gets between 1 and ``max_kraus`` Kraus operators."""
    if n < 1 or k < 1 or max_kraus < 1:
        raise ValueError("need at least one state, one symbol and one Kraus operator")
    rng = np.random.default_rng(seed)
    states = [f"q{i + 1}" for i in range(n)]
    alphabet = default_alphabet(k)
    ops = {}
    for s in [LEFT_END] + alphabet + [RIGHT_END]:
        count = int(rng.integers(1, max_kraus + 1))
        ops[s] = random_kraus(n, count, rng)
    accepting, rejecting = _partition(n, rng, states)
    q0 = states[int(rng.integers(0, n))]
    return E1QFA(states, alphabet, accepting, rejecting, ops, q0)
