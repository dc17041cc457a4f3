"""Enhanced one-way quantum finite automata.

The state is a density matrix.  Each symbol, including the left end-marker
``#`` read before the input and the right end-marker ``$`` read after it,
acts through a superoperator given by Kraus operators, and the accept / go /
reject measurement follows every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import (
    AlphabetMismatch,
    EmptyWord,
    IncompleteKraus,
    MissingEndmarker,
    OverlappingPartition,
    ShapeMismatch,
    UnknownSymbol,
    ValidationError,
)
from .mm1qfa import DEFAULT_TOL_VALID, MM1QFA
from .words import LEFT_END, RESERVED, RIGHT_END, WordLike, encode


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Completely positive map ``rho -> sum_i M_i rho M_i^H``."""

    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus: Sequence[object]):
        ops = tuple(linalg.as_matrix(k, "Kraus operator") for k in kraus)
        if not ops:
            raise ShapeMismatch("a superoperator needs at least one Kraus operator")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def completeness_defect(self) -> float:
        """Frobenius norm of ``sum_i M_i^H M_i - I``."""
        total = sum(k.conj().T @ k for k in self.kraus)
        return float(np.linalg.norm(total - np.eye(self.dim)))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_superop(self, rho)

    def __len__(self):
        return len(self.kraus)


def _check_shapes(s: Superoperator, m: np.ndarray) -> None:
    d = m.shape[0]
    if m.ndim != 2 or m.shape != (d, d) or any(k.shape != (d, d) for k in s.kraus):
        raise ShapeMismatch(f"superoperator of order {s.dim} cannot act on a {m.shape} matrix")


def apply_superop(s: Superoperator, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    _check_shapes(s, rho)
    return sum(k @ rho @ k.conj().T for k in s.kraus)


def apply_projected(s: Superoperator, p: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``sum_i (P M_i) rho (P M_i)^H``; sub-normalised in general."""
    rho = np.asarray(rho, dtype=np.complex128)
    _check_shapes(s, rho)
    p = np.asarray(p)
    if p.shape != rho.shape:
        raise ShapeMismatch(f"projector shape {p.shape} does not match state shape {rho.shape}")
    return sum((p @ k) @ rho @ (p @ k).conj().T for k in s.kraus)


def check_density(rho: np.ndarray, tol: float = DEFAULT_TOL_VALID, full: bool = False) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, non-negative diagonal.

    With ``full=True`` the smallest eigenvalue is checked as well.
    """
    rho = linalg.as_matrix(rho, "density matrix")
    if rho.shape[0] != rho.shape[1]:
        raise ShapeMismatch("density matrix must be square")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValidationError(f"density matrix has trace {np.trace(rho)!r}")
    herm = (rho + rho.conj().T) / 2
    if np.min(np.diag(herm).real) < -tol:
        raise ValidationError("density matrix has a negative diagonal entry")
    if full and np.min(np.linalg.eigvalsh(herm)) < -tol:
        raise ValidationError("density matrix is not positive semidefinite")
    return rho


@dataclass(frozen=True, eq=False)
class E1QFA:
    """An E-1QFA over ``alphabet``.

    ``superoperators`` maps every input symbol and both end-markers to a
    :class:`Superoperator` (a list of Kraus matrices is accepted too).
    ``initial_state`` names the basis state ``q0``; it is ``None`` only for
    diagonal sums, which are evaluated from both embedded initial states.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    accepting: frozenset[str]
    rejecting: frozenset[str]
    superoperators: Mapping[str, Superoperator]
    initial_state: str | None

    def __init__(self, states, alphabet, accepting, rejecting, superoperators, initial_state=None):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("states", tuple(states))
        set_("alphabet", tuple(alphabet))
        set_("accepting", frozenset(accepting))
        set_("rejecting", frozenset(rejecting))
        set_(
            "superoperators",
            {s: op if isinstance(op, Superoperator) else Superoperator(op) for s, op in superoperators.items()},
        )
        set_("initial_state", initial_state)

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def _symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def accept_mask(self) -> np.ndarray:
        return np.array([q in self.accepting for q in self.states])

    @cached_property
    def reject_mask(self) -> np.ndarray:
        return np.array([q in self.rejecting for q in self.states])

    @cached_property
    def go_mask(self) -> np.ndarray:
        return ~(self.accept_mask | self.reject_mask)

    @cached_property
    def projectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(P_a, P_g, P_r)``."""
        mk = lambda mask: linalg.as_matrix(np.diag(mask.astype(np.complex128)))
        return mk(self.accept_mask), mk(self.go_mask), mk(self.reject_mask)

    @property
    def initial_index(self) -> int:
        if self.initial_state is None:
            raise ValidationError("automaton has no initial state")
        return self.states.index(self.initial_state)

    def initial_density(self) -> np.ndarray:
        rho = np.zeros((self.size, self.size), dtype=np.complex128)
        i = self.initial_index
        rho[i, i] = 1.0
        return rho

    def encode(self, word: WordLike) -> tuple[int, ...]:
        return encode(self.alphabet, word, self._symbol_index)

    def accept_ops(self, symbol: str) -> list[np.ndarray]:
        """``P_a M_i`` for the Kraus operators of ``symbol``."""
        pa = self.projectors[0]
        return [pa @ k for k in self.superoperators[symbol].kraus]

    def go_ops(self, symbol: str) -> list[np.ndarray]:
        """``P_g M_i`` for the Kraus operators of ``symbol``."""
        pg = self.projectors[1]
        return [pg @ k for k in self.superoperators[symbol].kraus]

    def __repr__(self):
        return (
            f"E1QFA(states={self.states!r}, alphabet={self.alphabet!r}, "
            f"accepting={sorted(self.accepting)!r}, rejecting={sorted(self.rejecting)!r}, "
            f"initial_state={self.initial_state!r})"
        )


def validate_e(a: E1QFA, tol_valid: float = DEFAULT_TOL_VALID) -> None:
    """Raise the first :class:`ValidationError` that ``a`` triggers."""
    if len(a.states) == 0:
        raise ShapeMismatch("automaton has no states")
    if len(set(a.states)) != len(a.states):
        raise ValidationError("state names are not distinct")
    if len(set(a.alphabet)) != len(a.alphabet):
        raise ValidationError("alphabet symbols are not distinct")
    if RESERVED & set(a.alphabet):
        raise ValidationError("'#' and '$' are reserved and cannot be input symbols")
    unknown = (a.accepting | a.rejecting) - set(a.states)
    if unknown:
        raise ValidationError(f"accepting/rejecting sets name unknown states {sorted(unknown)}")
    overlap = a.accepting & a.rejecting
    if overlap:
        raise OverlappingPartition(f"states {sorted(overlap)} are both accepting and rejecting")
    for end in (LEFT_END, RIGHT_END):
        if end not in a.superoperators:
            raise MissingEndmarker(f"no superoperator for the end-marker {end!r}")
    missing = [s for s in a.alphabet if s not in a.superoperators]
    if missing:
        raise ShapeMismatch(f"no superoperator for symbols {missing}")
    extra = set(a.superoperators) - set(a.alphabet) - RESERVED
    if extra:
        raise ValidationError(f"superoperators for symbols outside the alphabet: {sorted(extra)}")
    m = a.size
    symbols = (LEFT_END,) + a.alphabet + (RIGHT_END,)
    for s in symbols:
        for k in a.superoperators[s].kraus:
            if k.shape != (m, m):
                raise ShapeMismatch(f"Kraus operator for {s!r} has shape {k.shape}, expected {(m, m)}")
    if a.initial_state is not None and a.initial_state not in a.states:
        raise ValidationError(f"initial state {a.initial_state!r} is not a state")
    for s in symbols:
        dev = a.superoperators[s].completeness_defect()
        if dev > tol_valid:
            raise IncompleteKraus(s, dev)


def _run(a: E1QFA, word: WordLike) -> list[float]:
    """Acceptance probability of every prefix of ``word``, shortest first."""
    idx = a.encode(word)
    pa, pg, _ = a.projectors
    end = a.superoperators[RIGHT_END]
    acc, go = a.accept_mask, a.go_mask

    def with_end(rho, halted):
        return halted + float(np.real(np.trace(pa @ apply_superop(end, rho) @ pa)))

    halted = 0.0
    rho = a.initial_density()
    out = []
    for k, s in enumerate((LEFT_END,) + tuple(a.alphabet[i] for i in idx)):
        rho = apply_superop(a.superoperators[s], rho)
        halted += float(np.real(np.sum(np.diag(rho)[acc])))
        rho = rho * np.outer(go, go)
        out.append(with_end(rho, halted))
    return out


def accept_prob_e(a: E1QFA, word: WordLike) -> float:
    """Probability that ``a`` accepts ``#word$``."""
    return _run(a, word)[-1]


def prefix_probs_e(a: E1QFA, word: WordLike) -> list[float]:
    return _run(a, word)


def noncumulative_e(a: E1QFA, word: WordLike, method: str = "difference") -> float:
    """Increment of the acceptance probability contributed by the last symbol.

    ``method="difference"`` subtracts consecutive prefix probabilities;
    ``method="reduced"`` evaluates the last step in closed form on the
    pre-measured state of the remaining prefix.
    """
    if method == "difference":
        probs = _run(a, word)
        return probs[0] if len(probs) == 1 else probs[-1] - probs[-2]
    if method != "reduced":
        raise ValueError(f"unknown method {method!r}")
    idx = a.encode(word)
    if not idx:
        return accept_prob_e(a, ())
    pa, pg, _ = a.projectors
    syms = [LEFT_END] + [a.alphabet[i] for i in idx]
    rho = a.initial_density()
    for s in syms[:-1]:
        rho = apply_projected(a.superoperators[s], pg, rho)
    last = a.superoperators[syms[-1]]
    end = a.superoperators[RIGHT_END]
    tr = lambda m: float(np.real(np.trace(m)))
    return (
        tr(apply_projected(last, pa, rho))
        + tr(apply_projected(end, pa, apply_projected(last, pg, rho)))
        - tr(apply_projected(end, pa, rho))
    )


def _conj_sum(ops: Sequence[np.ndarray], m: np.ndarray) -> np.ndarray:
    """``sum_i ops_i^H m ops_i``."""
    return sum(linalg.sandwich(b, m) for b in ops)


def end_accept_form(a: E1QFA) -> np.ndarray:
    """``sum_i (P_a M_i)^H (P_a M_i)`` over the Kraus operators of ``$``."""
    return sum(k.conj().T @ k for k in a.accept_ops(RIGHT_END))


def xi_e(a: E1QFA, x: str) -> np.ndarray:
    if x not in a._symbol_index:
        raise UnknownSymbol(x)
    end = end_accept_form(a)
    direct = sum(k.conj().T @ k for k in a.accept_ops(x))
    return direct + _conj_sum(a.go_ops(x), end) - end


def vartheta_e(a: E1QFA, word: WordLike) -> np.ndarray:
    """``xi`` of the last symbol pulled back through the go-branches of the earlier ones.

    The left end-marker is not included; see :func:`theta_e`.
    """
    idx = a.encode(word)
    if not idx:
        raise EmptyWord("vartheta is defined for non-empty words only")
    syms = [a.alphabet[i] for i in idx]
    m = xi_e(a, syms[-1])
    for s in reversed(syms[:-1]):
        m = _conj_sum(a.go_ops(s), m)
    return m


def theta_eps(a: E1QFA) -> np.ndarray:
    """Form whose value at ``q0`` is the acceptance probability of the empty word.

    Accept on ``#``, or pass ``#`` on the go-branch and accept on ``$``.
    """
    direct = sum(k.conj().T @ k for k in a.accept_ops(LEFT_END))
    return direct + _conj_sum(a.go_ops(LEFT_END), end_accept_form(a))


def theta_e(a: E1QFA, word: WordLike) -> np.ndarray:
    """Hermitian matrix whose ``(q0, q0)`` entry is ``noncumulative_e(a, word)``."""
    if not a.encode(word):
        return theta_eps(a)
    return _conj_sum(a.go_ops(LEFT_END), vartheta_e(a, word))


def _pad(kraus: tuple[np.ndarray, ...], count: int) -> list[np.ndarray]:
    d = kraus[0].shape[0]
    return list(kraus) + [np.zeros((d, d), dtype=np.complex128)] * (count - len(kraus))


def diag_sum_e(a1: E1QFA, a2: E1QFA) -> E1QFA:
    """Block-diagonal combination; Kraus lists are paired index-wise.

    The shorter Kraus list of a symbol is padded with zero matrices, which
    leaves ``sum M^H M`` unchanged.  The result has no initial state.
    """
    if set(a1.alphabet) != set(a2.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {a1.alphabet} vs {a2.alphabet}")
    ops = {}
    for s in (LEFT_END,) + a1.alphabet + (RIGHT_END,):
        k1, k2 = a1.superoperators[s].kraus, a2.superoperators[s].kraus
        n = max(len(k1), len(k2))
        ops[s] = Superoperator([linalg.diag_sum(e, z) for e, z in zip(_pad(k1, n), _pad(k2, n))])
    rename = lambda tag, names: [f"{tag}:{q}" for q in names]
    return E1QFA(
        states=rename(1, a1.states) + rename(2, a2.states),
        alphabet=a1.alphabet,
        accepting=rename(1, a1.accepting) + rename(2, a2.accepting),
        rejecting=rename(1, a1.rejecting) + rename(2, a2.rejecting),
        superoperators=ops,
        initial_state=None,
    )


def embedded_initials_e(a1: E1QFA, a2: E1QFA) -> tuple[np.ndarray, np.ndarray]:
    """Basis vectors of ``q0`` of each automaton inside the diagonal sum's state space."""
    n1, n2 = a1.size, a2.size
    phi = np.zeros(n1 + n2, dtype=np.complex128)
    psi = np.zeros(n1 + n2, dtype=np.complex128)
    phi[a1.initial_index] = 1.0
    psi[n1 + a2.initial_index] = 1.0
    return phi, psi


def permute_states_e(a: E1QFA, perm: Sequence[int]) -> E1QFA:
    """Relabel states so that new state ``i`` is old state ``perm[i]``."""
    perm = list(perm)
    p = np.eye(a.size, dtype=np.complex128)[perm]
    return E1QFA(
        states=[a.states[i] for i in perm],
        alphabet=a.alphabet,
        accepting=a.accepting,
        rejecting=a.rejecting,
        superoperators={s: [p @ k @ p.T for k in op.kraus] for s, op in a.superoperators.items()},
        initial_state=a.initial_state,
    )


def from_mm(a: MM1QFA, initial_state: str) -> E1QFA:
    """E-1QFA with identity ``#`` and singleton unitary Kraus sets taken from ``a``.

    ``a.initial`` is ignored.  The result reproduces the word function of
    ``a`` when ``a.initial`` is the basis vector of ``initial_state`` and that
    state is non-halting; otherwise the measurement after ``#`` already halts.
    """
    ops = {s: [u] for s, u in a.unitaries.items()}
    ops[LEFT_END] = [np.eye(a.size)]
    return E1QFA(a.states, a.alphabet, a.accepting, a.rejecting, ops, initial_state)
