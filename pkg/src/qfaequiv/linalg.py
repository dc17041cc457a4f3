"""Dense complex matrix helpers and an incremental orthonormal span basis.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Helpers in this
module never modify their inputs and hand back read-only arrays, so values can
be shared freely between automata and closure bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

import numpy as np

from .errors import InvalidShape

DEFAULT_TOL_SPAN = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def as_matrix(data: Any, name: str = "matrix") -> np.ndarray:
    """Coerce ``data`` to a read-only 2-d complex array with finite entries."""
    m = np.array(data, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidShape(f"{name} must be a non-empty 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidShape(f"{name} has non-finite entries")
    return _frozen(m)


def as_vector(data: Any, name: str = "vector") -> np.ndarray:
    v = np.array(data, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] < 1:
        raise InvalidShape(f"{name} must be a non-empty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidShape(f"{name} has non-finite entries")
    return _frozen(v)


def _require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidShape(f"{name} must be square, got shape {m.shape}")


def conj_transpose(m: np.ndarray) -> np.ndarray:
    return _frozen(np.array(np.asarray(m).conj().T, dtype=np.complex128))


def diag_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix ``[[a, 0], [0, b]]`` of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    _require_square(a, "left operand")
    _require_square(b, "right operand")
    m, n = a.shape[0], b.shape[0]
    out = np.zeros((m + n, m + n), dtype=np.complex128)
    out[:m, :m] = a
    out[m:, m:] = b
    return _frozen(out)


def trace(m: np.ndarray) -> complex:
    m = np.asarray(m)
    _require_square(m)
    return complex(np.trace(m))


def identity(n: int) -> np.ndarray:
    return _frozen(np.eye(n, dtype=np.complex128))


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of ``U^H U - I``."""
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])))


def is_unitary(u: np.ndarray, tol: float) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_defect(u) <= tol


def sandwich(op: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``op^H @ m @ op``."""
    return op.conj().T @ m @ op


def bilinear(vec: np.ndarray, m: np.ndarray) -> complex:
    """``<vec| m |vec>``."""
    return complex(np.vdot(vec, m @ vec))


@dataclass(frozen=True)
class SpanBasis:
    """Orthonormal basis of flattened matrices, each tagged with the key that produced it.

    Instances are immutable; :func:`span_insert` returns a new basis when a
    direction is added.
    """

    ambient_dim: int
    members: np.ndarray = field(default=None, repr=False)  # shape (r, ambient_dim)
    tags: tuple[Hashable, ...] = ()

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InvalidShape("ambient dimension must be positive")
        if self.members is None:
            object.__setattr__(
                self, "members", _frozen(np.zeros((0, self.ambient_dim), dtype=np.complex128))
            )

    def __len__(self) -> int:
        return self.members.shape[0]

    @classmethod
    def for_shape(cls, rows: int, cols: int | None = None) -> "SpanBasis":
        return cls(ambient_dim=rows * (rows if cols is None else cols))

    def residual(self, m: np.ndarray) -> np.ndarray:
        """Component of flattened ``m`` orthogonal to the basis (two Gram-Schmidt sweeps)."""
        v = np.asarray(m, dtype=np.complex128).reshape(-1)
        if v.shape[0] != self.ambient_dim:
            raise InvalidShape(
                f"matrix with {v.shape[0]} entries does not fit a basis of dimension {self.ambient_dim}"
            )
        r = v.copy()
        for _ in range(2):
            for b in self.members:
                r -= np.vdot(b, r) * b
        return r

    def contains(self, m: np.ndarray, tol_span: float = DEFAULT_TOL_SPAN) -> bool:
        r = self.residual(m)
        scale = max(1.0, float(np.linalg.norm(np.asarray(m))))
        return float(np.linalg.norm(r)) <= tol_span * scale

    def gram_defect(self) -> float:
        """Largest ``|<b_i, b_j> - delta_ij|`` over the members."""
        if len(self) == 0:
            return 0.0
        g = self.members.conj() @ self.members.T
        return float(np.max(np.abs(g - np.eye(len(self)))))


def span_insert(
    basis: SpanBasis,
    m: np.ndarray,
    tol_span: float = DEFAULT_TOL_SPAN,
    tag: Hashable = None,
) -> tuple[SpanBasis, bool]:
    """Try to extend ``basis`` by the matrix ``m``.

    Returns ``(basis, True)`` unchanged when ``m`` already lies in the span
    (relative residual at most ``tol_span``), else a new basis with the
    normalised residual appended and ``False``.
    """
    r = basis.residual(m)
    scale = max(1.0, float(np.linalg.norm(np.asarray(m))))
    norm = float(np.linalg.norm(r))
    if norm <= tol_span * scale:
        return basis, True
    members = np.vstack([basis.members, (r / norm)[None, :]])
    return SpanBasis(basis.ambient_dim, _frozen(members), basis.tags + (tag,)), False

