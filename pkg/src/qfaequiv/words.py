"""Word handling shared by both automaton models."""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import UnknownSymbol

LEFT_END = "#"
RIGHT_END = "$"
RESERVED = frozenset({LEFT_END, RIGHT_END})

Word = tuple[str, ...]
WordLike = Union[str, Sequence[str]]


def as_word(word: WordLike) -> Word:
    """Turn a word into a tuple of symbols.

    A plain string is split into characters, which is the natural reading for
    single-character alphabets; anything else is taken as a sequence of
    symbols.
    """
    return tuple(word)


def encode(alphabet: Sequence[str], word: WordLike, index: dict[str, int] | None = None) -> tuple[int, ...]:
    """Map a word to alphabet indices, rejecting unknown and reserved symbols."""
    if index is None:
        index = {s: i for i, s in enumerate(alphabet)}
    out = []
    for s in as_word(word):
        i = index.get(s)
        if i is None:
            raise UnknownSymbol(s)
        out.append(i)
    return tuple(out)


def format_word(word: Iterable[str], alphabet: Sequence[str] | None = None) -> str:
    """Render a word the way the command line accepts it.

    Symbols are concatenated when every symbol of ``alphabet`` (or of the word
    itself when no alphabet is given) is a single character, and joined by
    commas otherwise.
    """
    word = tuple(word)
    pool = word if alphabet is None else alphabet
    if all(len(s) == 1 for s in pool):
        return "".join(word)
    return ",".join(word)


def parse_word(text: str, alphabet: Sequence[str]) -> Word:
    if text == "":
        return ()
    if all(len(s) == 1 for s in alphabet) and "," not in text:
        return tuple(text)
    return tuple(text.split(","))


def all_words(alphabet: Sequence[str], max_len: int):
    """Yield every word of length at most ``max_len`` in length-then-lexicographic order."""
    level: list[Word] = [()]
    for n in range(max_len + 1):
        yield from level
        if n < max_len:
            level = [w + (s,) for w in level for s in alphabet]
