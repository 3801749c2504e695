"""Cyclic permutations of 1..n and their k-consecutive window sums.

Positions are 1-based in docs and error messages; storage is a 0-based tuple.
Entry ``i`` of a permutation of length n is taken cyclically, so position
n+1 is position 1 again.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .halfint import HalfInt


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


class InvalidPermutation(ValueError):
    def __init__(self, n: int, missing: list[int], duplicates: list[int], line: int | None = None):
        self.n = n
        self.missing = missing
        self.duplicates = duplicates
        self.line = line
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if duplicates:
            parts.append(f"duplicated {duplicates}")
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}not a permutation of 1..{n}: " + ", ".join(parts))


@dataclass(frozen=True)
class Permutation:
    entries: tuple[int, ...]

    def __init__(self, entries: Iterable[int]):
        entries = tuple(int(x) for x in entries)
        n = len(entries)
        if n < 2:
            raise DomainError(f"permutation needs n >= 2, got n={n}")
        if sorted(entries) != list(range(1, n + 1)):
            counts = Counter(entries)
            missing = [v for v in range(1, n + 1) if v not in counts]
            dups = sorted(v for v, c in counts.items() if c > 1 or not 1 <= v <= n)
            raise InvalidPermutation(n, missing, dups)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        """1-based cyclic access: ``p[n + 1] == p[1]``."""
        return self.entries[(i - 1) % len(self.entries)]

    def __str__(self) -> str:
        return " ".join(map(str, self.entries))


@dataclass(frozen=True)
class WindowProfile:
    k: int
    sums: tuple[int, ...]
    mean: HalfInt

    @property
    def max_sum(self) -> int:
        return max(self.sums)

    @property
    def min_sum(self) -> int:
        return min(self.sums)


@dataclass(frozen=True)
class DiffSeq:
    k: int
    d: tuple[int, ...]


def _check_k(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise DomainError(f"window length must satisfy 1 <= k < n, got k={k}, n={n}")


def window_profile(p: Permutation, k: int) -> WindowProfile:
    n = p.n
    _check_k(n, k)
    e = p.entries
    s = sum(e[:k])
    sums = [s]
    for i in range(n - 1):
        s += e[(i + k) % n] - e[i]
        sums.append(s)
    return WindowProfile(k, tuple(sums), HalfInt(k * (n + 1)))


def msum_of(p: Permutation, k: int) -> HalfInt:
    """Largest window sum minus the mean k(n+1)/2."""
    prof = window_profile(p, k)
    return HalfInt(2 * prof.max_sum) - prof.mean


def disc_of(p: Permutation, k: int) -> HalfInt:
    """Largest absolute deviation of a window sum from the mean."""
    prof = window_profile(p, k)
    return max(abs(HalfInt(2 * s) - prof.mean) for s in (prof.max_sum, prof.min_sum))


def diff_sequence(p: Permutation, k: int) -> DiffSeq:
    n = p.n
    _check_k(n, k)
    e = p.entries
    return DiffSeq(k, tuple(e[(i + k) % n] - e[i] for i in range(n)))


def sums_from_diffs(s1: int, d: DiffSeq) -> tuple[int, ...]:
    """Rebuild s_1..s_n from s_1 and the difference sequence."""
    out = [s1]
    for step in d.d[:-1]:
        out.append(out[-1] + step)
    return tuple(out)


def complement(p: Permutation) -> Permutation:
    n = p.n
    return Permutation(n + 1 - v for v in p.entries)


def rotate(p: Permutation, r: int) -> Permutation:
    n = p.n
    if not 0 <= r < n:
        raise DomainError(f"rotation offset must satisfy 0 <= r < n, got r={r}, n={n}")
    return Permutation(p.entries[r:] + p.entries[:r])


def reverse(p: Permutation) -> Permutation:
    return Permutation(reversed(p.entries))


def canonical_rotation(p: Permutation) -> Permutation:
    """Rotate so that the value n sits at position 1."""
    return rotate(p, p.entries.index(p.n))


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(r"[^\s,]+")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, token: str):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: not an integer: {token!r}")


def parse_permutation_line(text: str, line_no: int = 1) -> Permutation:
    values = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(line_no, m.start() + 1, tok) from None
    try:
        return Permutation(values)
    except InvalidPermutation as exc:
        raise InvalidPermutation(exc.n, exc.missing, exc.duplicates, line=line_no) from None


def parse_permutations(text: str) -> list[Permutation]:
    """One permutation per non-blank line; ``#`` starts a comment."""
    perms = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            perms.append(parse_permutation_line(line, line_no))
    return perms


def format_permutation(p: Permutation | Sequence[int], sep: str = " ") -> str:
    return sep.join(map(str, p))
