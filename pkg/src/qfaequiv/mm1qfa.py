"""Measure-many one-way quantum finite automata.

An MM-1QFA applies ``U(x)`` for every input symbol, measures the accept / go /
reject observable, and continues only on "go".  After the input the end-marker
matrix ``U($)`` is applied and measured once more.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import (
    AlphabetMismatch,
    InitialNotUnit,
    MissingEndmarkMatrix,
    NonUnitary,
    OverlappingPartition,
    ShapeMismatch,
    UnknownSymbol,
    ValidationError,
)
from .words import RESERVED, RIGHT_END, Word, WordLike, encode

DEFAULT_TOL_VALID = 1e-8


@dataclass(frozen=True, eq=False)
class MMObservable:
    """The three diagonal 0/1 projectors of the accept / go / reject measurement."""

    accept: np.ndarray
    go: np.ndarray
    reject: np.ndarray

    @classmethod
    def from_masks(cls, acc_mask: np.ndarray, rej_mask: np.ndarray) -> "MMObservable":
        go_mask = ~(acc_mask | rej_mask)
        mk = lambda mask: linalg.as_matrix(np.diag(mask.astype(np.complex128)))
        return cls(mk(acc_mask), mk(go_mask), mk(rej_mask))


@dataclass(frozen=True, eq=False)
class MM1QFA:
    """An MM-1QFA over ``alphabet``.

    ``unitaries`` maps every symbol of ``alphabet`` and the end-marker ``"$"``
    to an ``m x m`` unitary, where ``m = len(states)``.  The instance is not
    validated on construction; call :func:`validate_mm` (the parsers and the
    decision procedures do).
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    accepting: frozenset[str]
    rejecting: frozenset[str]
    unitaries: Mapping[str, np.ndarray]
    initial: np.ndarray

    def __init__(
        self,
        states: Sequence[str],
        alphabet: Sequence[str],
        accepting,
        rejecting,
        unitaries: Mapping[str, object],
        initial,
    ):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("states", tuple(states))
        set_("alphabet", tuple(alphabet))
        set_("accepting", frozenset(accepting))
        set_("rejecting", frozenset(rejecting))
        set_("unitaries", {s: linalg.as_matrix(u, f"U({s})") for s, u in unitaries.items()})
        set_("initial", linalg.as_vector(initial, "initial vector"))

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
    def observable(self) -> MMObservable:
        return MMObservable.from_masks(self.accept_mask, self.reject_mask)

    def encode(self, word: WordLike) -> tuple[int, ...]:
        return encode(self.alphabet, word, self._symbol_index)

    def go_step(self, symbol: str) -> np.ndarray:
        """``A(symbol) = P(g) U(symbol)``."""
        if symbol not in self._symbol_index:
            raise UnknownSymbol(symbol)
        return self.observable.go @ self.unitaries[symbol]

    def __repr__(self):
        return (
            f"MM1QFA(states={self.states!r}, alphabet={self.alphabet!r}, "
            f"accepting={sorted(self.accepting)!r}, rejecting={sorted(self.rejecting)!r})"
        )


def validate_mm(a: MM1QFA, tol_valid: float = DEFAULT_TOL_VALID) -> None:
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
    if RIGHT_END not in a.unitaries:
        raise MissingEndmarkMatrix("no transition matrix for the end-marker '$'")
    missing = [s for s in a.alphabet if s not in a.unitaries]
    if missing:
        raise ShapeMismatch(f"no transition matrix for symbols {missing}")
    extra = set(a.unitaries) - set(a.alphabet) - {RIGHT_END}
    if extra:
        raise ValidationError(f"transition matrices for symbols outside the alphabet: {sorted(extra)}")
    m = a.size
    for s in a.alphabet + (RIGHT_END,):
        if a.unitaries[s].shape != (m, m):
            raise ShapeMismatch(f"U({s}) has shape {a.unitaries[s].shape}, expected {(m, m)}")
    if a.initial.shape != (m,):
        raise ShapeMismatch(f"initial vector has dimension {a.initial.shape[0]}, expected {m}")
    for s in a.alphabet + (RIGHT_END,):
        dev = linalg.unitarity_defect(a.unitaries[s])
        if dev > tol_valid:
            raise NonUnitary(s, dev)
    norm = float(np.linalg.norm(a.initial))
    if abs(norm - 1.0) > tol_valid:
        raise InitialNotUnit(f"initial vector has norm {norm!r}")


def _run(a: MM1QFA, word: WordLike) -> list[float]:
    """Acceptance probability of every prefix of ``word``, shortest first."""
    idx = a.encode(word)
    acc, go = a.accept_mask, a.go_mask
    u_end = a.unitaries[RIGHT_END]
    mats = [a.unitaries[s] for s in a.alphabet]

    def with_end(v, halted):
        w = u_end @ v
        return halted + float(np.sum(np.abs(w[acc]) ** 2))

    v = np.array(a.initial)
    halted = 0.0
    out = [with_end(v, halted)]
    for i in idx:
        v = mats[i] @ v
        halted += float(np.sum(np.abs(v[acc]) ** 2))
        v[~go] = 0.0
        out.append(with_end(v, halted))
    return out


def accept_prob_mm(a: MM1QFA, word: WordLike) -> float:
    """Probability that ``a`` accepts ``word`` (halting acceptance summed over all steps)."""
    return _run(a, word)[-1]


def prefix_probs_mm(a: MM1QFA, word: WordLike) -> list[float]:
    return _run(a, word)


def noncumulative_mm(a: MM1QFA, word: WordLike) -> float:
    """Increment of the acceptance probability contributed by the last symbol."""
    probs = _run(a, word)
    if len(probs) == 1:
        return probs[0]
    return probs[-1] - probs[-2]


def end_form_mm(a: MM1QFA) -> np.ndarray:
    """``U($)^H P(a) U($)``, the matrix whose form at the initial vector gives P(empty word)."""
    u = a.unitaries[RIGHT_END]
    return linalg.sandwich(u, a.observable.accept)


def delta_mm(a: MM1QFA, x: str) -> np.ndarray:
    if x not in a._symbol_index:
        raise UnknownSymbol(x)
    u = a.unitaries[x]
    end = end_form_mm(a)
    g = a.go_step(x)
    return linalg.sandwich(u, a.observable.accept) + linalg.sandwich(g, end) - end


def eta_mm(a: MM1QFA, word: WordLike) -> np.ndarray:
    """Hermitian matrix whose form at the initial vector is ``noncumulative_mm(a, word)``.

    Built from the last symbol's ``delta`` by conjugating with ``A(x)`` for the
    earlier symbols, innermost first.
    """
    idx = a.encode(word)
    if not idx:
        return end_form_mm(a)
    syms = [a.alphabet[i] for i in idx]
    m = delta_mm(a, syms[-1])
    for s in reversed(syms[:-1]):
        m = linalg.sandwich(a.go_step(s), m)
    return m


def diag_sum_mm(a1: MM1QFA, a2: MM1QFA, init=None) -> MM1QFA:
    """Block-diagonal combination of two automata over the same alphabet.

    State names become ``"1:<name>"`` and ``"2:<name>"``.  ``init`` defaults
    to the first automaton's initial vector padded with zeros.
    """
    if set(a1.alphabet) != set(a2.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {a1.alphabet} vs {a2.alphabet}")
    if init is None:
        init, _ = embedded_initials_mm(a1, a2)
    init = linalg.as_vector(init, "initial vector")
    if init.shape[0] != a1.size + a2.size:
        raise ShapeMismatch(f"initial vector must have dimension {a1.size + a2.size}")
    if abs(float(np.linalg.norm(init)) - 1.0) > DEFAULT_TOL_VALID:
        raise InitialNotUnit("initial vector of a diagonal sum must be a unit vector")
    rename = lambda tag, names: [f"{tag}:{q}" for q in names]
    return MM1QFA(
        states=rename(1, a1.states) + rename(2, a2.states),
        alphabet=a1.alphabet,
        accepting=rename(1, a1.accepting) + rename(2, a2.accepting),
        rejecting=rename(1, a1.rejecting) + rename(2, a2.rejecting),
        unitaries={
            s: linalg.diag_sum(a1.unitaries[s], a2.unitaries[s]) for s in a1.alphabet + (RIGHT_END,)
        },
        initial=init,
    )


def embedded_initials_mm(a1: MM1QFA, a2: MM1QFA) -> tuple[np.ndarray, np.ndarray]:
    """``(pi1, 0)`` and ``(0, pi2)`` in the state space of the diagonal sum."""
    n1, n2 = a1.size, a2.size
    phi = np.zeros(n1 + n2, dtype=np.complex128)
    psi = np.zeros(n1 + n2, dtype=np.complex128)
    phi[:n1] = a1.initial
    psi[n1:] = a2.initial
    return phi, psi


def permute_states_mm(a: MM1QFA, perm: Sequence[int]) -> MM1QFA:
    """Relabel states so that new state ``i`` is old state ``perm[i]``.

    Conjugating every matrix by the permutation leaves the word function
    unchanged.
    """
    perm = list(perm)
    p = np.eye(a.size, dtype=np.complex128)[perm]
    return MM1QFA(
        states=[a.states[i] for i in perm],
        alphabet=a.alphabet,
        accepting=a.accepting,
        rejecting=a.rejecting,
        unitaries={s: p @ u @ p.T for s, u in a.unitaries.items()},
        initial=p @ a.initial,
    )


def word_symbols(a: MM1QFA, word: WordLike) -> Word:
    return tuple(a.alphabet[i] for i in a.encode(word))
