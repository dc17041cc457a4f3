"""Command line interface.

Exit codes: 0 success / equivalent, 1 not equivalent, 2 invalid input
(validation failures, bad words, refused enumerations), 3 I/O or parse
failure.  Diagnostics go to standard error, results to standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import equivalence as eq
from .e1qfa import E1QFA, prefix_probs_e
from .errors import ParseError, QFAError, UnknownSymbol, ValidationError
from .generate import random_e, random_mm
from .io import load, serialize_automaton
from .mm1qfa import DEFAULT_TOL_VALID, MM1QFA, prefix_probs_mm
from .words import format_word, parse_word

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INVALID = 2
EXIT_IO = 3

ENUMERATION_LIMIT = 10**7


def _note(message: str) -> None:
    print(message, file=sys.stderr)


@dataclass(frozen=True)
class RunReport:
    word: tuple[str, ...]
    probability: float
    prefix_probabilities: tuple[float, ...]  # index k: prefix of length k


def run_report(a, word) -> RunReport:
    probs = prefix_probs_mm(a, word) if isinstance(a, MM1QFA) else prefix_probs_e(a, word)
    return RunReport(tuple(word), probs[-1], tuple(probs))


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str, tol_valid: float):
    try:
        return load(path, tol_valid)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise _Fail(EXIT_IO, f"{path}: parse error: {exc}") from None
    except (ValidationError, QFAError) as exc:
        raise _Fail(EXIT_INVALID, f"{path}: invalid automaton: {type(exc).__name__}: {exc}") from None


def cmd_validate(args) -> int:
    a = _load(args.file, args.tol_valid)
    print(f"ok: {type(a).__name__} with {a.size} states over {{{', '.join(a.alphabet)}}}")
    return EXIT_OK


def cmd_run(args) -> int:
    a = _load(args.file, args.tol_valid)
    word = parse_word(args.word, a.alphabet)
    try:
        report = run_report(a, word)
    except UnknownSymbol as exc:
        raise _Fail(EXIT_INVALID, str(exc)) from None
    if args.json:
        print(
            json.dumps(
                {
                    "word": format_word(report.word, a.alphabet),
                    "probability": report.probability,
                    "prefix_probabilities": list(report.prefix_probabilities),
                }
            )
        )
        return EXIT_OK
    shown = lambda w: format_word(w, a.alphabet) or "ε"
    print(f"word: {shown(report.word)}")
    print(f"probability: {report.probability:.12g}")
    print("prefix  probability")
    for k, p in enumerate(report.prefix_probabilities):
        print(f"{shown(report.word[:k]):<7} {p:.12g}")
    return EXIT_OK


def cmd_equiv(args) -> int:
    a1 = _load(args.file1, args.tol_valid)
    a2 = _load(args.file2, args.tol_valid)
    if type(a1) is not type(a2):
        raise _Fail(EXIT_INVALID, "cannot compare an MM-1QFA with an E-1QFA")
    if set(a1.alphabet) != set(a2.alphabet):
        raise _Fail(EXIT_INVALID, f"alphabets differ: {list(a1.alphabet)} vs {list(a2.alphabet)}")
    tol = eq.Tolerances(valid=args.tol_valid, eq=args.tol_eq, span=args.tol_span)
    if isinstance(a1, E1QFA) and (a1.initial_state is None or a2.initial_state is None):
        raise _Fail(EXIT_INVALID, "both E-1QFAs need an initial_state")
    bound = eq.sound_bound(a1.size, a2.size)
    if args.method == "closure":
        verdict = eq.decide(a1, a2, tol)
    else:
        max_len = bound if args.max_len is None else args.max_len
        words = len(a1.alphabet) ** max_len
        if words > ENUMERATION_LIMIT:
            _note(f"warning: enumeration up to length {max_len} visits about {float(words):.3g} words")
            if not args.force:
                raise _Fail(EXIT_INVALID, "refusing to enumerate more than 1e7 words; pass --force to proceed")
        verdict = eq.enumerate_equiv(a1, a2, max_len, tol.eq, tol.valid)

    fmt = lambda w: format_word(w, a1.alphabet)
    if args.json:
        out = {
            "equivalent": verdict.equivalent,
            "counterexample": None,
            "p1": None,
            "p2": None,
            "basis_size": verdict.basis_size,
            "method": args.method,
        }
        if isinstance(verdict, eq.NotEquivalent):
            out.update(counterexample=fmt(verdict.word), p1=verdict.p1, p2=verdict.p2)
        if isinstance(verdict, eq.BoundedEquivalent):
            out["bounded_length"] = verdict.t
        print(json.dumps(out))
    elif isinstance(verdict, eq.NotEquivalent):
        print("NotEquivalent")
        print(f"counterexample: {fmt(verdict.word) or 'ε'!s}")
        print(f"p1: {verdict.p1!r}")
        print(f"p2: {verdict.p2!r}")
    elif isinstance(verdict, eq.BoundedEquivalent):
        print(f"Equivalent up to length {verdict.t}")
    else:
        print("Equivalent")
    if isinstance(verdict, eq.BoundedEquivalent):
        _note(f"warning: length {verdict.t} is below the sound bound {bound}; equivalence is not proven")
    if args.verbose and verdict.basis_size is not None:
        _note(f"closure basis size {verdict.basis_size} (bound {bound + 1})")
    return EXIT_NOT_EQUIVALENT if isinstance(verdict, eq.NotEquivalent) else EXIT_OK


def cmd_random(args) -> int:
    if args.states < 1 or args.alphabet < 1:
        raise _Fail(EXIT_INVALID, "--states and --alphabet must be positive")
    if args.model == "mm1qfa":
        a = random_mm(args.states, args.alphabet, args.seed)
    else:
        a = random_e(args.states, args.alphabet, args.seed, args.max_kraus)
    text = serialize_automaton(a)
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"{args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfaequiv", description="Evaluate and compare measure-many and enhanced one-way QFAs."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="report closure details on standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    def tol_valid(p):
        p.add_argument("--tol-valid", type=float, default=DEFAULT_TOL_VALID, help="validation tolerance")

    p = sub.add_parser("validate", help="check an automaton file")
    p.add_argument("file")
    tol_valid(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="acceptance probability of a word and of its prefixes")
    p.add_argument("file")
    p.add_argument("--word", required=True, help='symbols, concatenated or comma-separated; "" is the empty word')
    p.add_argument("--json", action="store_true")
    tol_valid(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("equiv", help="decide whether two automata accept every word with equal probability")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--method", choices=("closure", "enumerate"), default="closure")
    p.add_argument("--max-len", type=int, default=None, help="enumeration length (default: the sound bound)")
    p.add_argument("--tol-eq", type=float, default=eq.DEFAULT_TOLERANCES.eq)
    p.add_argument("--tol-span", type=float, default=eq.DEFAULT_TOLERANCES.span)
    p.add_argument("--json", action="store_true", help="print a machine-readable verdict")
    p.add_argument("--force", action="store_true", help="allow enumerations above 1e7 words")
    tol_valid(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("random", help="write a seeded random automaton")
    p.add_argument("--model", choices=("mm1qfa", "e1qfa"), default="mm1qfa")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-kraus", type=int, default=2, help="e1qfa only")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_random)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except QFAError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
