"""Alphabets, encoded sequences and sequence files."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AlphabetError, SequenceError


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            dup = next(s for s in self.symbols if self.symbols.count(s) > 1)
            raise AlphabetError(f"duplicate symbol {dup!r} in alphabet")
        if len(self.symbols) < 2:
            raise AlphabetError("alphabet needs at least 2 symbols")

    @property
    def m(self) -> int:
        return len(self.symbols)

    def code(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise AlphabetError(f"symbol {symbol!r} not in alphabet {self.spec!r}") from None

    @property
    def spec(self) -> str:
        return "".join(self.symbols)

    def encode(self, text: str) -> list[int]:
        lookup = {s: i for i, s in enumerate(self.symbols)}
        return [lookup[ch] for ch in text]

    def decode(self, codes) -> str:
        return "".join(self.symbols[int(c)] for c in codes)


def parse_alphabet(spec: str) -> Alphabet:
    """Build an alphabet from a string of single-character symbols, e.g. ``"01"``."""
    if not spec:
        raise AlphabetError("empty alphabet specification")
    if any(ch.isspace() for ch in spec):
        raise AlphabetError("whitespace cannot be an alphabet symbol")
    return Alphabet(tuple(spec))


class Sequence:
    """An immutable sequence of symbol codes over an alphabet."""

    __slots__ = ("codes", "alphabet")

    def __init__(self, codes, alphabet: Alphabet):
        arr = np.array(codes, dtype=np.int64).reshape(-1)
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.m):
            bad = int(arr[(arr < 0) | (arr >= alphabet.m)][0])
            raise SequenceError(f"code {bad} out of range for alphabet of size {alphabet.m}")
        arr.flags.writeable = False
        self.codes = arr
        self.alphabet = alphabet

    @property
    def n(self) -> int:
        return int(self.codes.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.codes, other.codes)

    def __repr__(self):
        head = self.alphabet.decode(self.codes[:20])
        more = "..." if self.n > 20 else ""
        return f"Sequence(n={self.n}, {head}{more})"

    def to_text(self) -> str:
        return self.alphabet.decode(self.codes)


def load_sequence(path, alphabet: Alphabet, format: str = "chars") -> Sequence:
    """Read a sequence file.

    ``chars``: one character per symbol, whitespace ignored.
    ``csv-int``: comma/newline separated integer codes.
    """
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8")
    if format == "chars":
        lookup = {s: i for i, s in enumerate(alphabet.symbols)}
        codes = []
        offset = 0
        for ch in text:
            if ch in lookup:
                codes.append(lookup[ch])
            elif not ch.isspace():
                raise SequenceError(
                    f"{path}: unknown symbol {ch!r} at byte offset {offset}"
                )
            offset += len(ch.encode("utf-8"))
        return Sequence(codes, alphabet)
    if format == "csv-int":
        codes = []
        for lineno, line in enumerate(text.splitlines(), 1):
            for tok in line.split(","):
                tok = tok.strip()
                if not tok:
                    continue
                try:
                    v = int(tok)
                except ValueError:
                    raise SequenceError(f"{path}:{lineno}: not an integer: {tok!r}") from None
                if not 0 <= v < alphabet.m:
                    raise SequenceError(
                        f"{path}:{lineno}: integer {v} out of range 0..{alphabet.m - 1}"
                    )
                codes.append(v)
        return Sequence(codes, alphabet)
    raise SequenceError(f"unknown sequence format {format!r}")


def write_sequence(seq: Sequence, path) -> None:
    Path(path).write_text(seq.to_text(), encoding="utf-8")
