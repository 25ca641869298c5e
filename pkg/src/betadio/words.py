"""Finite digit words, eventually periodic words, and lazy digit streams.

Finite words over bases up to 256 are packed into ``bytes`` so that
multi-megabyte words stay cheap to store and scan; larger alphabets fall
back to tuples.  Positions are 0-based in code; run/schedule indices that
follow the 1-based convention of the expansion literature say so explicitly.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence


class DigitWord(Sequence[int]):
    """Immutable finite word over the alphabet {0, ..., base-1}."""

    __slots__ = ("base", "_data")

    def __init__(self, base: int, digits: Iterable[int]):
        if base < 2:
            raise ValueError("base must be >= 2")
        self.base = base
        data = bytes(digits) if base <= 256 else tuple(digits)
        mx = max(data, default=0)
        if mx >= base:
            raise ValueError(f"digit {mx} out of range for base {base}")
        self._data = data

    @staticmethod
    def from_bytes(base: int, data: bytes) -> "DigitWord":
        w = DigitWord.__new__(DigitWord)
        w.base = base
        w._data = data
        return w

    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return DigitWord.from_bytes(self.base, self._data[i]) \
                if isinstance(self._data, bytes) else DigitWord(self.base, self._data[i])
        return self._data[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self._data)

    def __eq__(self, other):
        return (isinstance(other, DigitWord) and self.base == other.base
                and tuple(self._data) == tuple(other._data))

    def __hash__(self):
        return hash((self.base, bytes(self._data) if not isinstance(self._data, bytes) else self._data))

    def __repr__(self):
        shown = " ".join(str(d) for d in itertools.islice(self, 24))
        tail = " ..." if len(self) > 24 else ""
        return f"DigitWord(base={self.base}, [{shown}{tail}], len={len(self)})"

    def concat(self, other: "DigitWord") -> "DigitWord":
        return DigitWord(self.base, list(self._data) + list(other._data))

    @property
    def data(self):
        return self._data

    def digits(self) -> tuple[int, ...]:
        return tuple(self._data)


class PeriodicWord:
    """Eventually periodic infinite word: preperiod then a repeated period.

    An empty period means the word continues with zeros, which is how a
    finite word is promoted to an infinite one.
    """

    __slots__ = ("pre", "per")

    def __init__(self, pre: Iterable[int], per: Iterable[int] = ()):
        self.pre = tuple(pre)
        self.per = tuple(per)

    @staticmethod
    def from_finite(digits: Iterable[int]) -> "PeriodicWord":
        return PeriodicWord(tuple(digits), ())

    def __getitem__(self, i: int) -> int:
        if i < len(self.pre):
            return self.pre[i]
        if not self.per:
            return 0
        return self.per[(i - len(self.pre)) % len(self.per)]

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self[i] for i in range(n))

    def shift(self, k: int) -> "PeriodicWord":
        if k <= len(self.pre):
            return PeriodicWord(self.pre[k:], self.per)
        if not self.per:
            return PeriodicWord((), ())
        r = (k - len(self.pre)) % len(self.per)
        return PeriodicWord((), self.per[r:] + self.per[:r])

    def normalized(self) -> "PeriodicWord":
        """Minimal period, shortest preperiod, zero tails dropped."""
        pre, per = list(self.pre), list(self.per)
        if per:
            p = len(per)
            for d in range(1, p):
                if p % d == 0 and all(per[i] == per[i % d] for i in range(p)):
                    per = per[:d]
                    break
            while pre and per and pre[-1] == per[-1]:
                per = [per[-1]] + per[:-1]
                pre.pop()
        if all(v == 0 for v in per):
            per = []
            while pre and pre[-1] == 0:
                pre.pop()
        return PeriodicWord(tuple(pre), tuple(per))

    @property
    def is_finite(self) -> bool:
        return not self.per or all(v == 0 for v in self.per)

    def __eq__(self, other):
        if not isinstance(other, PeriodicWord):
            return NotImplemented
        return compare_words(self, other) == 0

    def __hash__(self):
        n = self.normalized()
        return hash((n.pre, n.per))

    def __repr__(self):
        head = " ".join(map(str, self.pre[:16]))
        if self.per:
            return f"PeriodicWord({head} ({' '.join(map(str, self.per))})^oo)"
        return f"PeriodicWord({head} 0^oo)"


def compare_words(s: PeriodicWord, t: PeriodicWord) -> int:
    """Lexicographic three-way comparison of eventually periodic words.

    A finite scan up to the combined preperiod plus one period lcm decides
    equality, so the comparison always terminates.
    """
    import math as _math
    qs = len(s.per) if s.per else 1
    qt = len(t.per) if t.per else 1
    bound = max(len(s.pre), len(t.pre)) + _math.lcm(qs, qt)
    for i in range(bound):
        a, b = s[i], t[i]
        if a != b:
            return -1 if a < b else 1
    return 0


def word_cmp_prefix(w: Sequence[int], d: PeriodicWord) -> int:
    """Compare the finite word w against the first len(w) symbols of d."""
    for i, a in enumerate(w):
        b = d[i]
        if a != b:
            return -1 if a < b else 1
    return 0


class DigitStream:
    """Pull-based infinite digit source with a cached prefix."""

    def __init__(self, gen: Iterator[int], base: int):
        self.base = base
        self._gen = gen
        self._cache: list[int] = []

    def __getitem__(self, i: int) -> int:
        while len(self._cache) <= i:
            self._cache.append(next(self._gen))
        return self._cache[i]

    def prefix(self, n: int) -> DigitWord:
        self[n - 1] if n else None
        return DigitWord(self.base, self._cache[:n])


# ---------------------------------------------------------------------------
# digit-sequence file format: header line `base=<b>`, then digits separated
# by whitespace.


def write_digit_file(stream, base: int, digits: Iterable[int], per_line: int = 40) -> None:
    stream.write(f"base={base}\n")
    line: list[str] = []
    for d in digits:
        line.append(str(d))
        if len(line) == per_line:
            stream.write(" ".join(line) + "\n")
            line.clear()
    if line:
        stream.write(" ".join(line) + "\n")


def read_digit_file(stream) -> DigitWord:
    header = stream.readline().strip()
    if not header.startswith("base="):
        raise ValueError("missing `base=<b>` header line")
    base = int(header.split()[0][5:])
    digits = [int(tok) for tok in stream.read().split()]
    return DigitWord(base, digits)
