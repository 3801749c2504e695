"""Checkable forms of the combinatorial inequalities behind the n = mk lower bounds.

* cyclic peaks of distinct integers, and two inequalities they control
* run counts of cyclic two-symbol sequences, and the bound for their
  column-major interleaving when the number of rows is odd
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from .perm import DomainError, Permutation, window_profile


@dataclass(frozen=True)
class PeakProfile:
    a: tuple[int, ...]
    alpha: int


@dataclass(frozen=True)
class MaxInequality:
    lhs_i: int
    rhs_i: int
    lhs_ii: int
    rhs_ii: int

    @property
    def holds(self) -> bool:
        return self.lhs_i >= self.rhs_i and self.lhs_ii >= self.rhs_ii


@dataclass(frozen=True)
class NestCheck:
    f_p: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.f_p <= self.bound


def _check_distinct(a: Sequence[int]) -> tuple[int, ...]:
    a = tuple(int(x) for x in a)
    if len(a) < 2:
        raise DomainError(f"need at least 2 entries, got {len(a)}")
    if len(set(a)) != len(a):
        raise DomainError(f"entries must be distinct: {a}")
    if min(a) < 0:
        raise DomainError(f"entries must be nonnegative: {a}")
    return a


def peak_count(a: Sequence[int]) -> int:
    """Number of cyclic strict local maxima."""
    a = _check_distinct(a)
    m = len(a)
    return sum(1 for i in range(m) if a[i - 1] < a[i] > a[(i + 1) % m])


def peak_profile(a: Sequence[int]) -> PeakProfile:
    return PeakProfile(_check_distinct(a), peak_count(a))


def check_max_inequality(a: Sequence[int]) -> MaxInequality:
    """Evaluate both sides of

    (i)  sum max(a_i, a_{i+1}) >= sum a_i + max a - min a + (alpha - 1)
    (ii) sum |a_i - a_{i+1}|   >= 2(m - 1) + 2(alpha - 1)

    with cyclic indexing.
    """
    a = _check_distinct(a)
    m = len(a)
    alpha = peak_count(a)
    nxt = [a[(i + 1) % m] for i in range(m)]
    lhs_i = sum(max(x, y) for x, y in zip(a, nxt))
    rhs_i = sum(a) + max(a) - min(a) + (alpha - 1)
    lhs_ii = sum(abs(x - y) for x, y in zip(a, nxt))
    rhs_ii = 2 * (m - 1) + 2 * (alpha - 1)
    return MaxInequality(lhs_i, rhs_i, lhs_ii, rhs_ii)


def run_count(x: Sequence[Hashable]) -> int:
    """Cyclic count of adjacent unequal pairs, x_{M+1} = x_1."""
    m = len(x)
    if m < 1:
        raise DomainError("sequence must be nonempty")
    return sum(1 for i in range(m) if x[i] != x[(i + 1) % m])


def _check_binary(seqs: Sequence[Sequence[Hashable]]) -> None:
    symbols = {s for seq in seqs for s in seq}
    if len(symbols) > 2:
        raise DomainError(f"more than two symbols: {sorted(map(str, symbols))}")


def nest(seqs: Sequence[Sequence[Hashable]]) -> list[Hashable]:
    """Column-major interleave: a_{1,1}, a_{2,1}, ..., a_{k,1}, a_{1,2}, ..., a_{k,m}."""
    m = len(seqs[0])
    if any(len(s) != m for s in seqs):
        raise DomainError(f"sequences must share one length, got {[len(s) for s in seqs]}")
    return [seqs[i][j] for j in range(m) for i in range(len(seqs))]


def nest_and_check(seqs: Sequence[Sequence[Hashable]], require_odd: bool = True) -> NestCheck:
    """f(P) against (k-1)m + min f(A_i) for the nested sequence P of k rows."""
    k = len(seqs)
    if require_odd and (k < 3 or k % 2 == 0):
        raise DomainError(f"number of sequences must be odd and >= 3, got {k}")
    if k < 1 or len(seqs[0]) < 1:
        raise DomainError("need at least one nonempty sequence")
    _check_binary(seqs)
    p = nest(seqs)
    m = len(seqs[0])
    return NestCheck(run_count(p), (k - 1) * m + min(run_count(s) for s in seqs))


def window_step_identity(p: Permutation, k: int, j: int) -> tuple[int, int]:
    """Both sides of sum_i |s_{ik+j} - s_{ik+j+1}| = sum_i |pi_{ik+j} - pi_{(i+1)k+j}| for n = mk."""
    n = p.n
    if n % k:
        raise DomainError(f"need k | n, got n={n}, k={k}")
    m = n // k
    s = window_profile(p, k).sums

    def S(t: int) -> int:
        return s[(t - 1) % n]

    left = sum(abs(S(i * k + j) - S(i * k + j + 1)) for i in range(m))
    right = sum(abs(p[i * k + j] - p[(i + 1) * k + j]) for i in range(m))
    return left, right


# -- seeded generators -------------------------------------------------------


def random_distinct(rng: random.Random, m_range=(2, 12), value_range=(0, 100)) -> list[int]:
    m = rng.randint(*m_range)
    return rng.sample(range(value_range[0], value_range[1] + 1), m)


def random_binary_family(rng: random.Random, k: int, m: int, symbols=("A", "B")) -> list[list[str]]:
    return [[rng.choice(symbols) for _ in range(m)] for _ in range(k)]


@dataclass
class SuiteResult:
    name: str
    cases: int
    passed: int
    counterexample: Optional[object] = None

    @property
    def ok(self) -> bool:
        return self.passed == self.cases


def run_max_inequality_suite(seed: int, cases: int) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("max-inequality", cases, 0)
    for _ in range(cases):
        a = random_distinct(rng)
        if check_max_inequality(a).holds:
            res.passed += 1
        elif res.counterexample is None:
            res.counterexample = a
    return res


def run_nesting_suite(seed: int, cases: int) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("run-nesting", cases, 0)
    for _ in range(cases):
        k = rng.choice((3, 5, 7))
        seqs = random_binary_family(rng, k, rng.randint(1, 8))
        if nest_and_check(seqs).holds:
            res.passed += 1
        elif res.counterexample is None:
            res.counterexample = seqs
    return res


def run_evenness_suite(seed: int, cases: int) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("run-count-even", cases, 0)
    for _ in range(cases):
        x = [rng.choice("AB") for _ in range(rng.randint(1, 20))]
        if run_count(x) % 2 == 0:
            res.passed += 1
        elif res.counterexample is None:
            res.counterexample = x
    return res


def even_k_probe(seed: int, cases: int) -> Optional[list[list[str]]]:
    """Look for an even number of rows that breaks the nesting bound; None if none found."""
    rng = random.Random(seed)
    for _ in range(cases):
        k = rng.choice((2, 4, 6))
        seqs = random_binary_family(rng, k, rng.randint(1, 6))
        if not nest_and_check(seqs, require_odd=False).holds:
            return seqs
    return None
