"""JSON automaton files.

A complex number is written ``[re, im]``, a vector is a list of complex
numbers and a matrix is a list of rows.  Example::

    {"model": "mm1qfa", "alphabet": ["a"], "states": ["q1", "q2"],
     "accepting": ["q2"], "rejecting": [],
     "initial": [[1.0, 0.0], [0.0, 0.0]],
     "transitions": {"a": [[...], [...]], "$": [[...], [...]]}}

E-1QFA files carry ``initial_state`` (a state name) and ``superoperators``
(symbol -> list of Kraus matrices, including ``"#"`` and ``"$"``) instead of
``initial`` and ``transitions``.
"""

from __future__ import annotations

import json
import numbers
from typing import Any, Union

import numpy as np

from .e1qfa import E1QFA, validate_e
from .errors import ParseError
from .mm1qfa import DEFAULT_TOL_VALID, MM1QFA, validate_mm
from .words import LEFT_END, RESERVED, RIGHT_END

Automaton = Union[MM1QFA, E1QFA]

MODELS = ("mm1qfa", "e1qfa")


def _number(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _complex(x: Any, where: str) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError(f"{where}: complex numbers are [re, im] pairs, got {x!r}")
        return complex(_number(x[0], where), _number(x[1], where))
    return complex(_number(x, where), 0.0)


def _vector(x: Any, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ParseError(f"{where}: expected a non-empty list of complex numbers")
    return np.array([_complex(e, f"{where}[{i}]") for i, e in enumerate(x)], dtype=np.complex128)


def _matrix(x: Any, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(x)]
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"{where}: rows have different lengths")
    return np.stack(rows)


def _names(x: Any, where: str) -> list[str]:
    if not isinstance(x, list) or not all(isinstance(s, str) for s in x):
        raise ParseError(f"{where}: expected a list of strings")
    return list(x)


def _field(doc: dict, key: str) -> Any:
    if key not in doc:
        raise ParseError(f"missing field {key!r}")
    return doc[key]


def from_dict(doc: Any) -> Automaton:
    """Build an automaton from a decoded JSON document without validating it."""
    if not isinstance(doc, dict):
        raise ParseError("automaton document must be a JSON object")
    model = _field(doc, "model")
    if model not in MODELS:
        raise ParseError(f"unknown model {model!r}; expected one of {MODELS}")
    alphabet = _names(_field(doc, "alphabet"), "alphabet")
    bad = RESERVED.intersection(alphabet)
    if bad:
        raise ParseError(f"reserved symbols {sorted(bad)} cannot appear in the alphabet")
    states = _names(_field(doc, "states"), "states")
    accepting = _names(_field(doc, "accepting"), "accepting")
    rejecting = _names(_field(doc, "rejecting"), "rejecting")
    if model == "mm1qfa":
        trans = _field(doc, "transitions")
        if not isinstance(trans, dict):
            raise ParseError("transitions must be an object mapping symbols to matrices")
        unitaries = {s: _matrix(m, f"transitions[{s!r}]") for s, m in trans.items()}
        initial = _vector(_field(doc, "initial"), "initial")
        return MM1QFA(states, alphabet, accepting, rejecting, unitaries, initial)
    ops = _field(doc, "superoperators")
    if not isinstance(ops, dict):
        raise ParseError("superoperators must be an object mapping symbols to Kraus lists")
    kraus = {}
    for s, ks in ops.items():
        if not isinstance(ks, list) or not ks:
            raise ParseError(f"superoperators[{s!r}]: expected a non-empty list of matrices")
        kraus[s] = [_matrix(k, f"superoperators[{s!r}][{i}]") for i, k in enumerate(ks)]
    q0 = _field(doc, "initial_state")
    if not isinstance(q0, str):
        raise ParseError("initial_state must be a state name")
    return E1QFA(states, alphabet, accepting, rejecting, kraus, q0)


def parse_automaton(text: str, tol_valid: float = DEFAULT_TOL_VALID) -> Automaton:
    """Parse and validate a JSON automaton document.

    Raises :class:`ParseError` for malformed documents and a
    :class:`~qfaequiv.errors.ValidationError` subclass for well-formed ones
    that describe an invalid automaton.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    a = from_dict(doc)
    if isinstance(a, MM1QFA):
        validate_mm(a, tol_valid)
    else:
        validate_e(a, tol_valid)
    return a


def load(path, tol_valid: float = DEFAULT_TOL_VALID) -> Automaton:
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read(), tol_valid)


def _enc_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _enc_matrix(m: np.ndarray) -> list:
    return [[_enc_complex(z) for z in row] for row in np.asarray(m)]


def to_dict(a: Automaton) -> dict:
    """Canonical dictionary form; state subsets follow state order."""
    doc = {
        "model": "mm1qfa" if isinstance(a, MM1QFA) else "e1qfa",
        "alphabet": list(a.alphabet),
        "states": list(a.states),
        "accepting": [q for q in a.states if q in a.accepting],
        "rejecting": [q for q in a.states if q in a.rejecting],
    }
    if isinstance(a, MM1QFA):
        doc["initial"] = [_enc_complex(z) for z in a.initial]
        doc["transitions"] = {s: _enc_matrix(a.unitaries[s]) for s in a.alphabet + (RIGHT_END,)}
    else:
        doc["initial_state"] = a.initial_state
        doc["superoperators"] = {
            s: [_enc_matrix(k) for k in a.superoperators[s].kraus]
            for s in (LEFT_END,) + a.alphabet + (RIGHT_END,)
        }
    return doc


def serialize_automaton(a: Automaton) -> str:
    """Canonical JSON text; floats use Python's shortest round-trip repr."""
    return _dump(to_dict(a)) + "\n"


def _dump(obj, indent: int = 0) -> str:
    # one complex number or matrix row per line keeps files readable
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_dump(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and obj and isinstance(obj[0], list) and not _is_row(obj):
        items = [f"{pad}  {_dump(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def _is_row(obj: list) -> bool:
    """A list of ``[re, im]`` pairs."""
    return all(isinstance(e, list) and len(e) == 2 and not isinstance(e[0], list) for e in obj)
