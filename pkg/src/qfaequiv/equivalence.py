"""Equivalence checking for MM-1QFAs and E-1QFAs.

Two automata are equivalent iff their non-cumulative word functions agree on
every word.  On the diagonal sum both functions are bilinear forms of one
Hermitian matrix family evaluated at two embedded initial vectors, and that
family is closed under "prepend a symbol" by a fixed linear map.  A breadth
first closure therefore collects a basis of its span with at most
``n1**2 + n2**2`` members, and comparing the two forms on the basis decides
equivalence.

:func:`enumerate_equiv` is an independent brute-force check that compares
acceptance probabilities word by word up to a length bound.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import e1qfa as E
from . import linalg
from . import mm1qfa as M
from .errors import AlphabetMismatch, BoundExceeded, NoMismatch, ValidationError
from .words import LEFT_END, RIGHT_END, Word, WordLike


Automaton = Union[M.MM1QFA, E.E1QFA]


@dataclass(frozen=True)
class Tolerances:
    valid: float = M.DEFAULT_TOL_VALID
    eq: float = 1e-9
    span: float = linalg.DEFAULT_TOL_SPAN


DEFAULT_TOLERANCES = Tolerances()


class Verdict:
    """Base class of the three possible outcomes."""

    equivalent: bool
    basis_size: int | None
    method: str


@dataclass(frozen=True)
class Equivalent(Verdict):
    basis_size: int | None = None
    method: str = "closure"
    equivalent: bool = field(default=True, init=False)


@dataclass(frozen=True)
class NotEquivalent(Verdict):
    word: Word
    p1: float
    p2: float
    basis_size: int | None = None
    method: str = "closure"
    equivalent: bool = field(default=False, init=False)

    @property
    def gap(self) -> float:
        return abs(self.p1 - self.p2)


@dataclass(frozen=True)
class BoundedEquivalent(Verdict):
    """Agreement on every word of length at most ``t``, below the sound bound."""

    t: int
    basis_size: int | None = None
    method: str = "enumerate"
    equivalent: bool = field(default=True, init=False)


def sound_bound(n1: int, n2: int) -> int:
    """Word length up to which agreement implies equivalence."""
    return n1 * n1 + n2 * n2 - 1


# -- matrix systems on the diagonal sum ------------------------------------


@dataclass(frozen=True, eq=False)
class EtaSystem:
    """Everything the MM closure needs, taken from a diagonal-sum automaton."""

    alphabet: tuple[str, ...]
    go: dict[str, np.ndarray]  # A(y) = P(g) U(y)
    delta: dict[str, np.ndarray]
    eta_eps: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    n1: int
    n2: int

    @classmethod
    def build(cls, a1: M.MM1QFA, a2: M.MM1QFA) -> "EtaSystem":
        s = M.diag_sum_mm(a1, a2)
        phi, psi = M.embedded_initials_mm(a1, a2)
        return cls(
            alphabet=s.alphabet,
            go={y: s.go_step(y) for y in s.alphabet},
            delta={y: M.delta_mm(s, y) for y in s.alphabet},
            eta_eps=M.end_form_mm(s),
            phi=phi,
            psi=psi,
            n1=a1.size,
            n2=a2.size,
        )

    def seeds(self):
        return [((y,), self.delta[y]) for y in self.alphabet]

    def extend(self, y: str, m: np.ndarray) -> np.ndarray:
        return linalg.sandwich(self.go[y], m)

    def form(self, m: np.ndarray) -> tuple[float, float]:
        return linalg.bilinear(self.phi, m).real, linalg.bilinear(self.psi, m).real


@dataclass(frozen=True, eq=False)
class ThetaSystem:
    """Everything the E closure needs, taken from a diagonal-sum automaton."""

    alphabet: tuple[str, ...]
    go: dict[str, list[np.ndarray]]  # B_i = P_g M_i per symbol, end-markers included
    xi: dict[str, np.ndarray]
    theta_eps: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    n1: int
    n2: int

    @classmethod
    def build(cls, a1: E.E1QFA, a2: E.E1QFA) -> "ThetaSystem":
        s = E.diag_sum_e(a1, a2)
        phi, psi = E.embedded_initials_e(a1, a2)
        return cls(
            alphabet=s.alphabet,
            go={y: s.go_ops(y) for y in (LEFT_END,) + s.alphabet + (RIGHT_END,)},
            xi={y: E.xi_e(s, y) for y in s.alphabet},
            theta_eps=E.theta_eps(s),
            phi=phi,
            psi=psi,
            n1=a1.size,
            n2=a2.size,
        )

    def seeds(self):
        return [((y,), self.xi[y]) for y in self.alphabet]

    def extend(self, y: str, m: np.ndarray) -> np.ndarray:
        return E._conj_sum(self.go[y], m)

    def theta(self, vartheta: np.ndarray) -> np.ndarray:
        return E._conj_sum(self.go[LEFT_END], vartheta)

    def form(self, m: np.ndarray) -> tuple[float, float]:
        t = self.theta(m)
        return linalg.bilinear(self.phi, t).real, linalg.bilinear(self.psi, t).real


# -- closure ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClosureBasis:
    """Result of a span closure.

    ``words`` and ``matrices`` hold the admitted members of the extendable
    family in discovery order; ``span`` is their orthonormalisation.  The
    empty-word matrix is kept apart in ``eps_matrix``: it is compared but never
    extended, and it never takes part in pruning, since a family member that
    is only dependent on it would otherwise be dropped without its
    extensions being covered.
    """

    span: linalg.SpanBasis
    words: tuple[Word, ...]
    matrices: tuple[np.ndarray, ...]
    eps_matrix: np.ndarray
    size: int

    def __len__(self):
        return self.size


def _closure(system, tol_span: float, eps_in_family_space: bool) -> ClosureBasis:
    d = system.n1 + system.n2
    bound = system.n1**2 + system.n2**2
    span = linalg.SpanBasis.for_shape(d)
    words: list[Word] = []
    mats: list[np.ndarray] = []
    frontier: deque[tuple[Word, np.ndarray]] = deque()

    def admit(word, m):
        nonlocal span
        span, in_span = linalg.span_insert(span, m, tol_span, tag=word)
        if in_span:
            return
        if len(span) > bound:
            raise BoundExceeded(
                f"closure basis reached {len(span)} members, above the bound {bound}; "
                f"increase tol_span (currently {tol_span:g})"
            )
        words.append(word)
        mats.append(m)
        frontier.append((word, m))

    for word, m in system.seeds():
        admit(word, m)
    while frontier:
        word, m = frontier.popleft()
        for y in system.alphabet:
            admit((y,) + word, system.extend(y, m))

    eps = system.eta_eps if eps_in_family_space else system.theta_eps
    size = len(span)
    if eps_in_family_space:
        # the empty-word matrix lives in the same block-diagonal space
        size = len(linalg.span_insert(span, eps, tol_span)[0])
    return ClosureBasis(span, tuple(words), tuple(mats), eps, size)


def closure_mm(system: EtaSystem, tol_span: float = linalg.DEFAULT_TOL_SPAN) -> ClosureBasis:
    return _closure(system, tol_span, eps_in_family_space=True)


def closure_e(system: ThetaSystem, tol_span: float = linalg.DEFAULT_TOL_SPAN) -> ClosureBasis:
    return _closure(system, tol_span, eps_in_family_space=False)


# -- decision -------------------------------------------------------------------


def accept_prob(a: Automaton, word: WordLike) -> float:
    if isinstance(a, M.MM1QFA):
        return M.accept_prob_mm(a, word)
    return E.accept_prob_e(a, word)


def _validate_pair(a1: Automaton, a2: Automaton, tol: Tolerances) -> None:
    if type(a1) is not type(a2):
        raise TypeError("both automata must be of the same model")
    check = M.validate_mm if isinstance(a1, M.MM1QFA) else E.validate_e
    check(a1, tol.valid)
    check(a2, tol.valid)
    if set(a1.alphabet) != set(a2.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {a1.alphabet} vs {a2.alphabet}")


def _compare(system, basis: ClosureBasis, eps_form: tuple[float, float], tol_eq: float):
    """First word (empty word first, then discovery order) whose two forms differ."""
    f1, f2 = eps_form
    if abs(f1 - f2) > tol_eq:
        return ()
    for word, m in zip(basis.words, basis.matrices):
        f1, f2 = system.form(m)
        if abs(f1 - f2) > tol_eq:
            return word
    return None


def decide_mm(a1: M.MM1QFA, a2: M.MM1QFA, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    _validate_pair(a1, a2, tol)
    system = EtaSystem.build(a1, a2)
    basis = closure_mm(system, tol.span)
    eps_form = (linalg.bilinear(system.phi, system.eta_eps).real, linalg.bilinear(system.psi, system.eta_eps).real)
    word = _compare(system, basis, eps_form, tol.eq)
    if word is None:
        return Equivalent(basis_size=basis.size)
    w, p1, p2 = extract_counterexample(a1, a2, word, tol.eq)
    return NotEquivalent(w, p1, p2, basis_size=basis.size)


def decide_e(a1: E.E1QFA, a2: E.E1QFA, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    _validate_pair(a1, a2, tol)
    if a1.initial_state is None or a2.initial_state is None:
        raise ValidationError("both automata need an initial state")
    system = ThetaSystem.build(a1, a2)
    basis = closure_e(system, tol.span)
    eps_form = (linalg.bilinear(system.phi, system.theta_eps).real, linalg.bilinear(system.psi, system.theta_eps).real)
    word = _compare(system, basis, eps_form, tol.eq)
    if word is None:
        return Equivalent(basis_size=basis.size)
    w, p1, p2 = extract_counterexample(a1, a2, word, tol.eq)
    return NotEquivalent(w, p1, p2, basis_size=basis.size)


def decide(a1: Automaton, a2: Automaton, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    if isinstance(a1, M.MM1QFA):
        return decide_mm(a1, a2, tol)
    return decide_e(a1, a2, tol)


def extract_counterexample(
    a1: Automaton,
    a2: Automaton,
    word: WordLike,
    tol_eq: float = DEFAULT_TOLERANCES.eq,
    prob: Callable[[Automaton, WordLike], float] = accept_prob,
) -> tuple[Word, float, float]:
    """Turn a mismatch of the non-cumulative functions at ``word`` into a probability gap.

    Since the non-cumulative value is the difference of the probabilities of
    ``word`` and of ``word`` without its last symbol, one of the two must
    differ by more than ``tol_eq / 2``.  The shortest prefix of ``word`` with a
    gap above ``tol_eq`` is preferred; failing that, the larger of those two
    gaps is returned.
    """
    word = tuple(word)
    probs1 = [prob(a1, word[:k]) for k in range(len(word) + 1)]
    probs2 = [prob(a2, word[:k]) for k in range(len(word) + 1)]
    f = lambda ps, k: ps[0] if k == 0 else ps[k] - ps[k - 1]
    n = len(word)
    if abs(f(probs1, n) - f(probs2, n)) <= tol_eq:
        raise NoMismatch(f"no mismatch of the non-cumulative functions at {word!r}")
    for k in range(n + 1):
        if abs(probs1[k] - probs2[k]) > tol_eq:
            return word[:k], probs1[k], probs2[k]
    # both gaps lie in (tol_eq / 2, tol_eq]: report the larger one
    k = max((n - 1, n) if n else (0,), key=lambda i: abs(probs1[i] - probs2[i]))
    return word[:k], probs1[k], probs2[k]


# -- brute-force oracle -------------------------------------------------------


def _levels_mm(a: M.MM1QFA, order: Sequence[str], max_len: int):
    """Yield acceptance probabilities of all words of each length, in lexicographic order."""
    acc, go = a.accept_mask, a.go_mask
    u_end_t = a.unitaries[RIGHT_END].T
    mats_t = np.stack([a.unitaries[s].T for s in order])  # row-vector convention
    vecs = np.array(a.initial)[None, :]
    halted = np.zeros(1)
    for n in range(max_len + 1):
        tail = vecs @ u_end_t
        yield halted + np.sum(np.abs(tail[:, acc]) ** 2, axis=1)
        if n == max_len:
            return
        nxt = np.einsum("wi,sij->wsj", vecs, mats_t)
        halted = (halted[:, None] + np.sum(np.abs(nxt[..., acc]) ** 2, axis=2)).reshape(-1)
        nxt[..., ~go] = 0.0
        vecs = nxt.reshape(-1, a.size)


def _levels_e(a: E.E1QFA, order: Sequence[str], max_len: int):
    acc, go = a.accept_mask, a.go_mask
    keep = np.outer(go, go)

    def kraus(s):
        return np.stack(a.superoperators[s].kraus)

    def evolve(k, rhos):
        # rhos: (w, d, d); k: (r, d, d) -> (w, d, d)
        return np.einsum("rij,wjk,rlk->wil", k, rhos, k.conj())

    end = kraus(RIGHT_END)
    rhos = evolve(kraus(LEFT_END), a.initial_density()[None])
    halted = np.real(np.einsum("wii->w", rhos[:, acc][:, :, acc]))
    rhos = rhos * keep
    sym_kraus = [kraus(s) for s in order]
    for n in range(max_len + 1):
        tail = evolve(end, rhos)
        yield halted + np.real(np.einsum("wii->w", tail[:, acc][:, :, acc]))
        if n == max_len:
            return
        nxt = np.stack([evolve(k, rhos) for k in sym_kraus], axis=1)  # (w, s, d, d)
        gained = np.real(np.einsum("wsii->ws", nxt[:, :, acc][:, :, :, acc]))
        halted = (halted[:, None] + gained).reshape(-1)
        rhos = (nxt * keep).reshape(-1, a.size, a.size)


def _index_to_word(i: int, n: int, order: Sequence[str]) -> Word:
    k = len(order)
    out = []
    for _ in range(n):
        i, r = divmod(i, k)
        out.append(order[r])
    return tuple(reversed(out))


def enumerate_equiv(
    a1: Automaton,
    a2: Automaton,
    max_len: int | None = None,
    tol_eq: float = DEFAULT_TOLERANCES.eq,
    tol_valid: float = DEFAULT_TOLERANCES.valid,
) -> Verdict:
    """Compare acceptance probabilities on every word up to ``max_len``.

    Words are visited in length-then-lexicographic order (lexicographic with
    respect to the first automaton's alphabet order) and the first gap above
    ``tol_eq`` is reported.  ``max_len`` defaults to the sound bound
    ``n1**2 + n2**2 - 1``; agreement below that bound gives
    :class:`BoundedEquivalent`.
    """
    _validate_pair(a1, a2, Tolerances(valid=tol_valid, eq=tol_eq))
    bound = sound_bound(a1.size, a2.size)
    if max_len is None:
        max_len = bound
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    order = a1.alphabet
    levels = _levels_mm if isinstance(a1, M.MM1QFA) else _levels_e
    for n, (p1, p2) in enumerate(zip(levels(a1, order, max_len), levels(a2, order, max_len))):
        bad = np.flatnonzero(np.abs(p1 - p2) > tol_eq)
        if bad.size:
            i = int(bad[0])
            return NotEquivalent(_index_to_word(i, n, order), float(p1[i]), float(p2[i]), method="enumerate")
    if max_len >= bound:
        return Equivalent(method="enumerate")
    return BoundedEquivalent(max_len)
