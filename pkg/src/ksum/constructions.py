"""Explicit permutation families with small maximal k-consecutive sums.

Three builders:

* ``construct_mod_plus1(k, m)``  -- n = mk + 1, k odd >= 5
* ``construct_mod_minus1(k, m)`` -- n = mk - 1, k odd >= 5, derived from the above
* ``construct_even_even(n, k)``  -- n, k even, via a (q+1) x k box filling
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .perm import DomainError, Permutation


class ConstructionError(RuntimeError):
    """The box-filling procedure reached a state it should never reach."""


class Family(Enum):
    MOD_PLUS1_ODD_K = "ModPlus1OddK"
    MOD_MINUS1_ODD_K = "ModMinus1OddK"
    EVEN_EVEN = "EvenEven"


@dataclass(frozen=True)
class ConstructionId:
    tag: Family
    n: int
    k: int
    m: Optional[int] = None
    q: Optional[int] = None
    r: Optional[int] = None

    def __str__(self) -> str:
        if self.tag is Family.EVEN_EVEN:
            return f"{self.tag.value}(n={self.n},k={self.k},q={self.q},r={self.r})"
        return f"{self.tag.value}(k={self.k},m={self.m})"


def _check_odd_k(k: int, m: int, min_m: int) -> None:
    if k % 2 == 0:
        raise DomainError(f"k must be odd, got k={k}")
    if k < 5:
        raise DomainError(f"k >= 5 required (column formulas use k-5 >= 0), got k={k}")
    if m < min_m:
        raise DomainError(f"m >= {min_m} required, got m={m}")


def mod_plus1_rows(k: int, m: int) -> list[list[int]]:
    """The m x k configuration read row by row; the trailing entry 1 is omitted."""
    _check_odd_k(k, m, 2)
    even = m % 2 == 0
    rows = []
    for i in range(m):
        row = []
        for j in range(1, k + 1):
            if j == 1:
                v = m + 1 - i
            elif j == 2:
                if even:
                    v = 3 * m // 2 + i + 2 if i <= m // 2 - 1 else m // 2 + i + 2
                else:
                    v = (3 * m + 3) // 2 + i if i <= (m - 1) // 2 else (m + 3) // 2 + i
            elif j == 3:
                if even:
                    v = 3 * m - 2 * i + 1 if i <= m // 2 - 1 else 4 * m - 2 * i
                else:
                    v = 3 * m - 2 * i + 1 if i <= (m - 1) // 2 else 4 * m - 2 * i + 1
            elif j == 4:
                v = 3 * m + i + 2
            elif j % 2 == 1:
                v = (j - 1) * m + 2 + i
            else:
                v = j * m + 1 - i
            row.append(v)
        rows.append(row)
    return rows


def construct_mod_plus1(k: int, m: int) -> Permutation:
    """Permutation of 1..mk+1 with msum (k+1)/2 for even m, k/2 for odd m."""
    rows = mod_plus1_rows(k, m)
    return Permutation([v for row in rows for v in row] + [1])


def construct_mod_minus1(k: int, m: int) -> Permutation:
    """Permutation of 1..mk-1: drop the last two entries of the mk+1 family, shift down by one."""
    _check_odd_k(k, m, 3)
    base = construct_mod_plus1(k, m).entries
    return Permutation(v - 1 for v in base[: m * k - 1])


def expected_mod_msum_doubled(k: int, m: int) -> int:
    """Twice the msum these two families attain: k+1 for even m, k for odd m."""
    return k + 1 if m % 2 == 0 else k


# -- even n, even k ----------------------------------------------------------


@dataclass
class BoxGrid:
    """(q+1) x k boxes; row 1 keeps only its first r boxes.

    Rows and columns are 1-based. Columns wrap modulo k and rows modulo q+1.
    """

    q: int
    k: int
    r: int
    cells: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def rows(self) -> int:
        return self.q + 1

    @property
    def cols(self) -> int:
        return self.k

    def exists(self, a: int, b: int) -> bool:
        a = (a - 1) % (self.q + 1) + 1
        b = (b - 1) % self.k + 1
        return a != 1 or b <= self.r

    def wrap(self, a: int, b: int) -> tuple[int, int]:
        return (a - 1) % (self.q + 1) + 1, (b - 1) % self.k + 1

    def get(self, a: int, b: int) -> Optional[int]:
        return self.cells.get(self.wrap(a, b))

    def put(self, a: int, b: int, value: int) -> None:
        a, b = self.wrap(a, b)
        if not self.exists(a, b):
            raise ConstructionError(f"box ({a},{b}) was removed; cannot place {value}")
        if (a, b) in self.cells:
            raise ConstructionError(f"box ({a},{b}) already holds {self.cells[(a, b)]}")
        self.cells[(a, b)] = value

    def row(self, a: int) -> list[Optional[int]]:
        """Row ``a`` with ``None`` for removed boxes."""
        return [self.cells.get((a, b)) if self.exists(a, b) else None for b in range(1, self.k + 1)]

    def linearize(self) -> list[int]:
        """Read rows from the bottom (row q+1) up to row 1."""
        out = []
        for i in range(self.q + 1):
            a = self.q + 1 - i
            for b in range(1, self.k + 1):
                if self.exists(a, b):
                    out.append(self.cells[(a, b)])
        return out

    def render(self, removed: str = "*") -> str:
        width = len(str(self.q * self.k + self.r))
        lines = []
        for a in range(1, self.q + 2):
            if a == 1 and self.r == 0:
                continue
            cells = self.row(a)
            lines.append(" ".join((removed if v is None else str(v)).rjust(width) for v in cells))
        return "\n".join(lines)


def _next_box(grid: BoxGrid, a: int, b: int) -> tuple[int, int]:
    q, k, r = grid.q, grid.k, grid.r
    if a < q + 1:
        return a + 1, b
    c = (b + r - 1) % k + 1
    # row 1 keeps columns 1..r, so wrapped targets in that range go to row 1
    target_row = 1 if c <= r else 2
    if grid.get(target_row, c) is None:
        return target_row, c
    c2 = (c + 2 - 1) % k + 1
    if not grid.exists(target_row, c2) or grid.get(target_row, c2) is not None:
        raise ConstructionError(
            f"both ({target_row},{c}) and ({target_row},{c2}) unavailable after ({a},{b})"
        )
    return target_row, c2


def fill_even_even(n: int, k: int) -> BoxGrid:
    if n % 2 or k % 2:
        raise DomainError(f"n and k must both be even, got n={n}, k={k}")
    if k < 2:
        raise DomainError(f"k >= 2 required, got k={k}")
    if k >= n:
        raise DomainError(f"k < n required, got k={k}, n={n}")
    if n < 2 * k:
        raise DomainError(f"n >= 2k required (reduce k to n-k first), got n={n}, k={k}")
    q, r = divmod(n, k)
    grid = BoxGrid(q, k, r)
    top = 1 if r > 0 else 2  # with r == 0 the first row is entirely removed

    a, b = top, 2
    grid.put(a, b, 1)
    for t in range(2, n // 2 + 1):
        a, b = _next_box(grid, a, b)
        grid.put(a, b, t)

    a, b = top, 1
    grid.put(a, b, n)
    for t in range(n - 1, n // 2, -1):
        a, b = _next_box(grid, a, b)
        grid.put(a, b, t)

    if len(grid.cells) != n:
        raise ConstructionError(f"filled {len(grid.cells)} boxes, expected {n}")
    return grid


def construct_even_even(n: int, k: int) -> Permutation:
    """Permutation of 1..n (n, k even, n >= 2k) with msum exactly 1."""
    return Permutation(fill_even_even(n, k).linearize())


def construction_id(family: Family, **params: int) -> ConstructionId:
    if family is Family.EVEN_EVEN:
        n, k = params["n"], params["k"]
        q, r = divmod(n, k)
        return ConstructionId(family, n, k, q=q, r=r)
    k, m = params["k"], params["m"]
    n = m * k + 1 if family is Family.MOD_PLUS1_ODD_K else m * k - 1
    return ConstructionId(family, n, k, m=m)


def build(cid: ConstructionId) -> Permutation:
    if cid.tag is Family.MOD_PLUS1_ODD_K:
        return construct_mod_plus1(cid.k, cid.m)
    if cid.tag is Family.MOD_MINUS1_ODD_K:
        return construct_mod_minus1(cid.k, cid.m)
    return construct_even_even(cid.n, cid.k)
