"""Exact msum(n, k) and disc(n, k) by threshold-ascending branch and bound.

For a threshold T the question "is there a permutation whose every window sum
lies in [mean - T, mean + T] (or just <= mean + T for msum)?" is decided by a
depth-first placement of values into positions 1..n. The first feasible T,
stepping by 1 from a proven lower bound, is the exact value.

Symmetry breaking: the value n sits at position 1 (rotations), and
optionally pi_2 < pi_n (reflection).
"""

from __future__ import annotations

import bisect
import itertools
import logging
import multiprocessing as mp
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import bounds
from .bounds import Quantity
from .halfint import HalfInt
from .perm import DomainError, Permutation, complement, disc_of, msum_of

if TYPE_CHECKING:
    from .cache import ResultCache

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


class Status(str, Enum):
    EXACT = "Exact"
    LOWER_BOUND_ONLY = "LowerBoundOnly"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int = DEFAULT_BUDGET  # 0 means unlimited
    thread_count: int = 1
    break_reflection: bool = True
    start_lower: Optional[HalfInt] = None
    # stop after this threshold is refuted; the outcome is then LowerBoundOnly
    max_threshold: Optional[HalfInt] = None

    def __post_init__(self) -> None:
        if self.node_budget < 0:
            raise DomainError("node_budget must be >= 0")
        if self.thread_count < 1:
            raise DomainError("thread_count must be >= 1")


@dataclass
class SearchOutcome:
    n: int
    k: int
    quantity: Quantity
    status: Status
    value: HalfInt
    witness: Optional[Permutation] = None
    nodes_visited: int = 0
    thresholds_tested: list[tuple[HalfInt, bool]] = field(default_factory=list)
    from_cache: bool = False


class BudgetExhausted(Exception):
    def __init__(self, nodes: int):
        super().__init__(f"node budget exhausted after {nodes} nodes")
        self.nodes = nodes


class WitnessMismatch(RuntimeError):
    """A witness returned by the search failed re-evaluation."""


# -- core search -------------------------------------------------------------


class _Search:
    """One feasibility question: window sums within [lo, hi], pi_1 = n."""

    def __init__(self, n: int, k: int, hi: int, lo: Optional[int], reflect: bool, budget: int):
        self.n, self.k, self.hi = n, k, hi
        self.lo = lo
        # with n = 2 positions 2 and n coincide, so there is no reflection to break
        self.reflect = reflect and n >= 3
        self.budget = budget
        self.nodes = 0
        self.perm = [0] * n
        self.wsum = [0] * n
        self.wcnt = [0] * n
        self.unused = list(range(1, n + 1))
        self.unused_total = n * (n + 1) // 2
        # pre[i] = pi_1 + ... + pi_i over the assigned prefix
        self.pre = [0] * (n + 1)
        # windows that contain position p start at p, p-1, ..., p-k+1 (cyclically)
        self.covering = [[(p - j) % n for j in range(k)] for p in range(n)]
        self.mid2 = n + 1  # twice the mean value of a single entry

    def _place(self, p: int, v: int) -> None:
        self.perm[p] = v
        del self.unused[bisect.bisect_left(self.unused, v)]
        self.unused_total -= v
        self.pre[p + 1] = self.pre[p] + v
        wsum, wcnt = self.wsum, self.wcnt
        for w in self.covering[p]:
            wsum[w] += v
            wcnt[w] += 1

    def _unplace(self, p: int, v: int) -> None:
        bisect.insort(self.unused, v)
        self.unused_total += v
        wsum, wcnt = self.wsum, self.wcnt
        for w in self.covering[p]:
            wsum[w] -= v
            wcnt[w] -= 1
        self.perm[p] = 0

    def _ok(self, p: int) -> bool:
        k, hi, lo = self.k, self.hi, self.lo
        unused = self.unused
        acc = None
        total = 0
        for w in self.covering[p]:
            c = self.wcnt[w]
            s = self.wsum[w]
            if c == k:
                if s > hi or (lo is not None and s < lo):
                    return False
                continue
            if acc is None:
                acc = list(itertools.accumulate(unused))
                total = acc[-1] if acc else 0
            need = k - c
            if s + acc[need - 1] > hi:
                return False
            if lo is not None:
                rest = len(acc) - need
                top = total - (acc[rest - 1] if rest > 0 else 0)
                if s + top < lo:
                    return False
        return self._tiling_ok(p)

    def _tiling_ok(self, p: int) -> bool:
        """Runs of t whole windows that cover every open position.

        Such a run holds all unused values plus some assigned ones, and its
        total is at most t * hi (at least t * lo).
        """
        n, k, hi, lo = self.n, self.k, self.hi, self.lo
        rem = n - 1 - p
        if rem == 0:
            return True
        pre = self.pre
        base = self.unused_total
        done = pre[p + 1]
        t = -(-rem // k)
        while t * k <= n:
            length = t * k
            # start a in [n - length, p + 1]; the run wraps onto positions 0..a+length-n-1
            amax = -1
            amin = None
            for a in range(n - length, p + 2):
                part = done - pre[a] + pre[a + length - n]
                if part > amax:
                    amax = part
                if amin is None or part < amin:
                    amin = part
            if base + amin > t * hi:
                return False
            if lo is not None and base + amax < t * lo:
                return False
            t += 1
        return True

    def seed(self, prefix: list[int]) -> bool:
        """Place a fixed prefix at positions 0..len-1; False if it is already infeasible."""
        for p, v in enumerate(prefix):
            self._place(p, v)
            if not self._ok(p):
                return False
        return True

    def _order(self, p: int) -> list[int]:
        """Candidate values for position p, in trial order.

        A value is dropped early when some window through p could not stay
        within the caps even if its other open slots took the most favourable
        unused values (the candidate itself included, so this never cuts a
        feasible branch).
        """
        k, hi, lo = self.k, self.hi, self.lo
        unused = self.unused
        acc = list(itertools.accumulate(unused))
        total = acc[-1]
        size = len(acc)
        vmax = unused[-1]
        vmin = unused[0]
        excess2 = None
        for w in self.covering[p]:
            s = self.wsum[w]
            c = self.wcnt[w]
            after = k - c - 1
            cap = hi - s - (acc[after - 1] if after > 0 else 0)
            if cap < vmax:
                vmax = cap
            if lo is not None:
                top = total - acc[size - after - 1] if after > 0 else 0
                floor = lo - s - top
                if floor > vmin:
                    vmin = floor
            e = 2 * s - c * self.mid2
            if excess2 is None or e > excess2:
                excess2 = e
        if vmin > vmax:
            return []
        lo_i = bisect.bisect_left(unused, vmin)
        hi_i = bisect.bisect_right(unused, vmax)
        cands = unused[lo_i:hi_i]
        # heavily loaded windows get small values first
        return cands if excess2 >= 0 else cands[::-1]

    def run(self, start: int) -> bool:
        if start == self.n:
            return self._final_ok()
        return self._rec(start)

    def _final_ok(self) -> bool:
        return not self.reflect or self.perm[1] < self.perm[self.n - 1]

    def _rec(self, p: int) -> bool:
        n = self.n
        last = p == n - 1
        for v in self._order(p):
            self.nodes += 1
            if self.budget and self.nodes > self.budget:
                raise BudgetExhausted(self.nodes)
            if self.reflect:
                # pi_n must exceed pi_2 when everything is placed
                if last and v < self.perm[1]:
                    continue
                if p == 1 and v == self.unused[-1]:
                    continue
            self._place(p, v)
            if self._ok(p):
                if last or self._rec(p + 1):
                    return True
            self._unplace(p, v)
        return False


def _caps(n: int, k: int, t: HalfInt, two_sided: bool) -> tuple[int, Optional[int]]:
    mean2 = k * (n + 1)
    hi2 = mean2 + t.doubled
    if hi2 % 2:
        raise DomainError(f"threshold {t} is outside the parity class of (n={n}, k={k})")
    lo = (mean2 - t.doubled) // 2 if two_sided else None
    return hi2 // 2, lo


def _check_instance(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got n={n}, k={k}")


def _feasible_serial(n, k, t, two_sided, reflect, budget):
    hi, lo = _caps(n, k, t, two_sided)
    s = _Search(n, k, hi, lo, reflect, budget)
    if not s.seed([n]):
        return None, 0, False
    try:
        found = s.run(1)
    except BudgetExhausted:
        return None, s.nodes, True
    return (Permutation(s.perm) if found else None), s.nodes, False


# parallel workers: top two placement levels become independent tasks

_cancel = None


def _init_worker(event) -> None:
    global _cancel
    _cancel = event


class _CancellableSearch(_Search):
    def _rec(self, p: int) -> bool:
        if self.nodes & 0x3FF == 0 and _cancel is not None and _cancel.is_set():
            raise BudgetExhausted(self.nodes)
        return super()._rec(p)


def _run_task(n, k, hi, lo, reflect, budget, prefix):
    s = _CancellableSearch(n, k, hi, lo, reflect, budget)
    if not s.seed(prefix):
        return None, 0, False
    # pi_2 < pi_n is impossible when pi_2 is the largest value left after n
    if reflect and n >= 3 and len(prefix) >= 2 and prefix[1] == n - 1:
        return None, 0, False
    try:
        found = s.run(len(prefix))
    except BudgetExhausted:
        return None, s.nodes, True
    return (list(s.perm) if found else None), s.nodes, False


def _feasible_parallel(n, k, t, two_sided, reflect, budget, workers):
    hi, lo = _caps(n, k, t, two_sided)
    rest = list(range(1, n))
    prefixes = [[n, a, b] for a, b in itertools.permutations(rest, 2)] if n >= 4 else [[n]]
    ctx = mp.get_context("spawn")
    event = ctx.Manager().Event()
    nodes = 0
    exhausted = False
    witness = None
    per_task = budget  # each task is individually capped; the sum is re-checked below
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx, initializer=_init_worker, initargs=(event,)) as ex:
        pending = {ex.submit(_run_task, n, k, hi, lo, reflect, per_task, p) for p in prefixes}
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                w, cnt, ex_flag = fut.result()
                nodes += cnt
                if w is not None and witness is None:
                    witness = w
                    event.set()
                elif ex_flag and witness is None:
                    exhausted = True
            if witness is not None or (budget and nodes > budget) or exhausted:
                event.set()
                for f in pending:
                    f.cancel()
                for f in pending:
                    if not f.cancelled():
                        w, cnt, _ = f.result()
                        nodes += cnt
                        if w is not None and witness is None:
                            witness = w
                break
    if witness is not None:
        return Permutation(witness), nodes, False
    if exhausted or (budget and nodes > budget):
        return None, nodes, True
    return None, nodes, False


def _feasible(n, k, t, two_sided, cfg: SearchConfig):
    if cfg.thread_count > 1 and n >= 6:
        return _feasible_parallel(n, k, t, two_sided, cfg.break_reflection, cfg.node_budget, cfg.thread_count)
    return _feasible_serial(n, k, t, two_sided, cfg.break_reflection, cfg.node_budget)


def feasible_msum(n: int, k: int, t: HalfInt, cfg: SearchConfig = SearchConfig()) -> Optional[Permutation]:
    """A permutation with every window sum <= k(n+1)/2 + t, or None if none exists.

    Raises BudgetExhausted if the node budget runs out first.
    """
    _check_instance(n, k)
    w, nodes, exhausted = _feasible(n, k, HalfInt.of(t), False, cfg)
    if exhausted:
        raise BudgetExhausted(nodes)
    return w


def feasible_disc(n: int, k: int, t: HalfInt, cfg: SearchConfig = SearchConfig()) -> Optional[Permutation]:
    """A permutation with every window sum within t of k(n+1)/2, or None."""
    _check_instance(n, k)
    w, nodes, exhausted = _feasible(n, k, HalfInt.of(t), True, cfg)
    if exhausted:
        raise BudgetExhausted(nodes)
    return w


# -- threshold ascent --------------------------------------------------------


def _solve(n: int, k: int, quantity: Quantity, cfg: SearchConfig, cache: Optional[ResultCache]) -> SearchOutcome:
    _check_instance(n, k)
    if cache is not None:
        hit = cache.lookup(n, k, quantity)
        if hit is not None:
            return SearchOutcome(n, k, quantity, Status.EXACT, hit.value, hit.witness, hit.nodes, [], from_cache=True)

    nr, kr = bounds.reduce_instance(n, k)
    evaluate = msum_of if quantity is Quantity.MSUM else disc_of
    two_sided = quantity is Quantity.DISC
    report = bounds.bound_report(nr, kr, quantity)
    t = cfg.start_lower if cfg.start_lower is not None else report.lower
    t = HalfInt.of(t)
    if t > report.lower:
        # starting above a proven bound would make the first feasible T meaningless
        raise DomainError(f"start_lower {t} exceeds the proven lower bound {report.lower}")
    floor = bounds.parity_floor(nr, kr)
    if t < floor:
        t = floor
    if (t.doubled - floor.doubled) % 2:
        raise DomainError(f"start threshold {t} is outside the parity class of (n={n}, k={k})")

    tested: list[tuple[HalfInt, bool]] = []
    nodes = 0
    remaining = cfg.node_budget
    while True:
        if cfg.max_threshold is not None and t > cfg.max_threshold:
            return SearchOutcome(n, k, quantity, Status.LOWER_BOUND_ONLY, t, None, nodes, tested)
        run_cfg = SearchConfig(
            node_budget=remaining, thread_count=cfg.thread_count, break_reflection=cfg.break_reflection
        )
        w, used, exhausted = _feasible(nr, kr, t, two_sided, run_cfg)
        nodes += used
        if exhausted:
            log.info("%s(%d,%d): budget exhausted at T=%s", quantity.value, n, k, t)
            return SearchOutcome(n, k, quantity, Status.BUDGET_EXHAUSTED, t, None, nodes, tested)
        if cfg.node_budget:
            remaining = max(cfg.node_budget - nodes, 1)
        tested.append((t, w is not None))
        log.debug("%s(%d,%d): T=%s %s after %d nodes", quantity.value, n, k, t, "feasible" if w else "infeasible", nodes)
        if w is not None:
            break
        if t >= report.upper:
            raise bounds.BoundsInconsistency(f"{quantity.value}({n},{k}): T={t} refuted but the proven upper bound is {report.upper}")
        t = t + 1

    if kr != k:
        # the reduced instance's witness, complemented, works for the original window length
        w = complement(w)
    if evaluate(w, k) != t:
        raise WitnessMismatch(f"witness {w} evaluates to {evaluate(w, k)}, expected {t}")
    out = SearchOutcome(n, k, quantity, Status.EXACT, t, w, nodes, tested)
    if cache is not None:
        cache.store(out)
    return out


def solve_msum(n: int, k: int, cfg: SearchConfig = SearchConfig(), cache: Optional[ResultCache] = None) -> SearchOutcome:
    """Exact msum(n, k) with a witness, unless the budget or max_threshold stops it."""
    return _solve(n, k, Quantity.MSUM, cfg, cache)


def solve_disc(n: int, k: int, cfg: SearchConfig = SearchConfig(), cache: Optional[ResultCache] = None) -> SearchOutcome:
    return _solve(n, k, Quantity.DISC, cfg, cache)


def solve(n: int, k: int, quantity: Quantity | str, cfg: SearchConfig = SearchConfig(), cache=None) -> SearchOutcome:
    return _solve(n, k, Quantity(quantity), cfg, cache)


# -- brute-force oracle ------------------------------------------------------

BRUTE_FORCE_MAX_N = 10


def _all_window_sums(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    if not 2 <= n <= BRUTE_FORCE_MAX_N:
        raise DomainError(f"brute force is limited to 2 <= n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    _check_instance(n, k)
    perms = np.array([(n, *p) for p in itertools.permutations(range(1, n))], dtype=np.int64)
    sums = np.zeros_like(perms)
    for j in range(k):
        sums += np.roll(perms, -j, axis=1)
    return perms, sums


def brute_force_msum(n: int, k: int) -> tuple[HalfInt, Permutation]:
    """Minimum msum over all (n-1)! permutations with pi_1 = n; no pruning."""
    perms, sums = _all_window_sums(n, k)
    excess2 = 2 * sums.max(axis=1) - k * (n + 1)
    i = int(excess2.argmin())
    return HalfInt(int(excess2[i])), Permutation(perms[i].tolist())


def brute_force_disc(n: int, k: int) -> tuple[HalfInt, Permutation]:
    perms, sums = _all_window_sums(n, k)
    mean2 = k * (n + 1)
    dev2 = np.maximum(2 * sums.max(axis=1) - mean2, mean2 - 2 * sums.min(axis=1))
    i = int(dev2.argmin())
    return HalfInt(int(dev2[i])), Permutation(perms[i].tolist())
