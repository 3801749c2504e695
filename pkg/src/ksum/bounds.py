"""Lower/upper bounds and known values of msum(n, k) and disc(n, k).

Each published fact is a guarded rule: a predicate on (n, k) yielding a bound
on one quantity. Rules are evaluated on both (n, k) and (n, n - k), since both
quantities are invariant under k -> n - k. Aggregation then

* rounds every bound into the parity class of (n, k) (strict bounds step past
  their value),
* lets disc upper bounds cap msum and msum lower bounds lift disc, never the
  reverse,
* keeps every fact that attains the final value as provenance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .constructions import ConstructionId, Family, construction_id
from .halfint import HalfInt, ceil_in_class, floor_in_class, parity_is_half
from .perm import DomainError


class Quantity(str, Enum):
    MSUM = "msum"
    DISC = "disc"


class Side(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    EXACT = "exact"


class Tag(str, Enum):
    PARITY_CLASS = "parity-class"
    COMPLEMENT = "complement-k"
    MK_PLUS1_AVERAGE = "mk+1-averaging"
    MK_MINUS1_AVERAGE = "mk-1-averaging"
    MK_PEAKS = "mk-peak-count"
    MK_ODD_RUNS = "mk-odd-run-count"
    ODD_K_HALF_RESIDUE = "odd-k-residue-(k+1)/2"
    K5_RESIDUE_2 = "k5-residue-2"
    EVEN_K_PM1 = "even-k-residue-pm1"
    ODD_K_EXACT = "odd-k-residue-0-pm1"
    EVEN_N_EVEN_K = "even-n-even-k"
    EVEN_K_HALF_RESIDUE = "even-k-residue-k/2"
    K4_RESIDUE_2_DISC = "k4-residue-2-disc"
    CITED_2K_3K = "cited:n=2k,3k"
    CITED_K2 = "cited:k2"
    CITED_K3_UPPER = "cited:k3-upper"
    CITED_DIVISIBLE = "cited:k-divides-n"
    CITED_GCD_UPPER = "cited:gcd-upper"
    CITED_ODD_GCD = "cited:odd-gcd-recursion"
    CITED_COPRIME_LOWER = "cited:coprime-lower"
    CITED_EVEN_K_PM1 = "cited:even-k-pm1"
    CITED_2KT = "cited:n=2kt"
    CITED_K3_6T3 = "cited:k3-n=6t+3"
    CITED_2KM_PM2 = "cited:n=2km+-2"
    CITED_DISC_15_3 = "cited:disc(15,3)"
    CITED_MSUM_21_3 = "cited:msum(21,3)"
    TABLE_MSUM = "table:msum-k3-6"
    TABLE_DISC = "table:disc-k3-6"
    CONSTRUCTION = "construction"
    SOLVER = "solver-certificate"
    K1 = "k1"
    TRIVIAL_RANGE = "trivial-range"


@dataclass(frozen=True)
class Provenance:
    tag: Tag
    note: str = ""
    construction: Optional[ConstructionId] = None

    def __str__(self) -> str:
        if self.construction is not None:
            return f"Construction({self.construction})"
        return self.tag.value


@dataclass(frozen=True)
class Fact:
    quantity: Quantity
    side: Side
    value: Fraction
    tag: Tag
    strict: bool = False
    note: str = ""
    construction: Optional[ConstructionId] = None
    via: Optional[tuple[int, int]] = None  # orientation the rule fired on, if not the input's

    def provenance(self) -> Provenance:
        return Provenance(self.tag, self.note, self.construction)


class BoundsInconsistency(RuntimeError):
    """The facts database produced lower > upper: a transcription bug."""


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    quantity: Quantity
    lower: HalfInt
    lower_provenance: tuple[Provenance, ...]
    upper: HalfInt
    upper_provenance: tuple[Provenance, ...]
    facts: tuple[Fact, ...] = field(default=(), compare=False, repr=False)

    @property
    def exact(self) -> Optional[HalfInt]:
        return self.lower if self.lower == self.upper else None

    @property
    def lower_tags(self) -> set[Tag]:
        return {p.tag for p in self.lower_provenance}

    @property
    def upper_tags(self) -> set[Tag]:
        return {p.tag for p in self.upper_provenance}

    def to_json(self) -> dict:
        exact = self.exact
        return {
            "n": self.n,
            "k": self.k,
            "quantity": self.quantity.value,
            "lower": {"doubled": self.lower.doubled, "text": str(self.lower)},
            "upper": {"doubled": self.upper.doubled, "text": str(self.upper)},
            "exact": None if exact is None else {"doubled": exact.doubled, "text": str(exact)},
            "lower_provenance": [str(p) for p in self.lower_provenance],
            "upper_provenance": [str(p) for p in self.upper_provenance],
        }

    def markdown_row(self) -> str:
        exact = "" if self.exact is None else str(self.exact)
        return (
            f"| {self.n} | {self.k} | {self.quantity.value} | {self.lower} | {self.upper} | {exact} "
            f"| {', '.join(map(str, self.lower_provenance))} "
            f"| {', '.join(map(str, self.upper_provenance))} |"
        )


MARKDOWN_HEADER = (
    "| n | k | quantity | lower | upper | exact | lower provenance | upper provenance |\n"
    "|---|---|---|---|---|---|---|---|"
)


def _check(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got n={n}, k={k}")


def reduce_instance(n: int, k: int) -> tuple[int, int]:
    """Equivalent instance with window length at most n/2."""
    _check(n, k)
    return n, min(k, n - k)


def parity_floor(n: int, k: int) -> HalfInt:
    """1/2 when k is odd and n even, else 1."""
    _check(n, k)
    return HalfInt(1) if parity_is_half(n, k) else HalfInt(2)


def coprime_step(n: int, k: int) -> int:
    """Smallest s >= 1 with r*s = +-1 (mod k), where r = n mod k; needs gcd(n, k) = 1."""
    r = n % k
    for s in range(1, k + 1):
        if (r * s) % k in (1, k - 1):
            return s
    raise DomainError(f"no s for n={n}, k={k}")


F = Fraction
M, D = Quantity.MSUM, Quantity.DISC
LO, UP, EX = Side.LOWER, Side.UPPER, Side.EXACT


def _small_k_msum_rows(n: int, k: int) -> Iterable[tuple[Side, Fraction]]:
    # literal rows of the k = 3..6 table; only meaningful for n >= 2k
    if k == 3:
        if n == 6:
            yield EX, F(1, 2)
        elif n in (9, 15):
            yield EX, F(1)
        elif n % 2 == 0 and n >= 8:
            yield EX, F(3, 2)
        elif n % 2 == 1 and n >= 7:
            yield EX, F(2)
    elif k == 4:
        yield EX, F(2) if n % 2 else F(1)
    elif k == 5:
        r = n % 10
        if n == 10:
            yield EX, F(1, 2)
        elif r == 0 and n >= 20:
            yield EX, F(3, 2)
        elif r == 5 and n >= 65:
            yield EX, F(2)
        elif r in (4, 6):
            yield EX, F(5, 2)
        elif r in (1, 9):
            yield EX, F(3)
        elif r in (2, 8):
            yield LO, F(3, 2)
        elif r in (3, 7):
            yield LO, F(2)
    elif k == 6:
        yield EX, F(3) if n % 6 in (1, 5) else F(1)


def _small_k_disc_rows(n: int, k: int) -> Iterable[tuple[Side, Fraction]]:
    if k == 3:
        yield from _small_k_msum_rows(n, k)
    elif k == 4:
        if n % 2:
            yield EX, F(2)
        elif n % 4 == 0:
            yield EX, F(1)
        else:
            yield UP, F(2)
    elif k == 5:
        if n == 10:
            yield EX, F(1, 2)
        elif n == 15:
            yield EX, F(1)
        elif n % 10 == 0 and n >= 20:
            yield EX, F(3, 2)
        if n % 10 == 5:
            yield UP, F(2)
        if n % 5 in (1, 4):
            yield LO, F(5, 2)
        elif n % 5 in (2, 3):
            yield LO, F(5, 4)
    elif k == 6:
        if n % 6 in (1, 5):
            yield EX, F(3)
        elif n % 6 in (0, 3):
            yield EX, F(1)
        else:
            yield UP, F(2)


def orientation_facts(n: int, k: int) -> list[Fact]:
    """All non-recursive facts whose hypotheses hold for (n, k) as given."""
    _check(n, k)
    out: list[Fact] = []

    def add(qs, side, value, tag, **kw):
        for q in (qs if isinstance(qs, tuple) else (qs,)):
            out.append(Fact(q, side, F(value), tag, **kw))

    both = (M, D)
    half = parity_is_half(n, k)
    add(both, LO, F(1, 2) if half else 1, Tag.PARITY_CLASS)
    add(both, UP, F(k * (n - k), 2), Tag.TRIVIAL_RANGE, note="every window lies between the k smallest and k largest values")
    if k == 1:
        add(both, EX, F(n - 1, 2), Tag.K1)
        return out

    m, rem = divmod(n, k)
    odd_k = k % 2 == 1
    g = math.gcd(n, k)

    # lower bounds on msum
    if rem == 1 and m >= 2:
        add(M, LO, F(k, 2), Tag.MK_PLUS1_AVERAGE)
    if (n + 1) % k == 0 and (n + 1) // k >= 3:
        add(M, LO, F(k, 2), Tag.MK_MINUS1_AVERAGE)
    if odd_k and rem == 0 and m >= 2:
        add(M, LO, 1 - F(1, m), Tag.MK_PEAKS)
    if odd_k and k >= 3 and rem == 0 and m % 2 == 1 and m >= 2 * k + 3:
        add(M, LO, 2, Tag.MK_ODD_RUNS)
    if odd_k and k >= 5 and rem == (k + 1) // 2:
        add(M, LO, 1, Tag.ODD_K_HALF_RESIDUE, strict=True, note="msum > 1")
    if k == 5 and rem == 2 and n >= 12:
        add(M, LO, 1, Tag.K5_RESIDUE_2, strict=True, note="msum > 1")

    # exact msum values
    if not odd_k and rem in (1, k - 1):
        add(M, EX, F(k, 2), Tag.EVEN_K_PM1)
    if odd_k and k >= 3:
        plus = rem == 1 and m >= 2
        minus = (n + 1) % k == 0 and (n + 1) // k >= 3
        if plus or minus:
            val = F(k, 2) if n % 2 == 0 else F(k + 1, 2)
            add(M, EX, val, Tag.ODD_K_EXACT)
            if k >= 5:
                fam = Family.MOD_PLUS1_ODD_K if plus else Family.MOD_MINUS1_ODD_K
                mm = m if plus else (n + 1) // k
                cid = construction_id(fam, k=k, m=mm)
                add(M, UP, val, Tag.CONSTRUCTION, construction=cid)
        if rem == 0:
            if n == 2 * k:
                add(M, EX, F(1, 2), Tag.ODD_K_EXACT)
            elif n % 2 == 0 and m >= 4:
                add(M, EX, F(3, 2), Tag.ODD_K_EXACT)
            elif n % 2 == 1 and n >= k * (2 * k + 3):
                add(M, EX, 2, Tag.ODD_K_EXACT)
    if n % 2 == 0 and not odd_k:
        add(M, EX, 1, Tag.EVEN_N_EVEN_K)
        if n >= 2 * k:
            add(M, UP, 1, Tag.CONSTRUCTION, construction=construction_id(Family.EVEN_EVEN, n=n, k=k))
    if not odd_k and rem == k // 2:
        add(M, EX, 1, Tag.EVEN_K_HALF_RESIDUE)
        if n % 2 == 1:
            add(D, EX, 1, Tag.EVEN_K_HALF_RESIDUE)
    if k == 4 and rem == 2 and n >= 10:
        add(D, EX, 2, Tag.K4_RESIDUE_2_DISC)

    # cited disc results
    if odd_k and n == 2 * k:
        add(D, EX, F(1, 2), Tag.CITED_2K_3K)
    if odd_k and n == 3 * k:
        add(D, EX, 1, Tag.CITED_2K_3K)
    if k == 2 and n >= 3:
        add(D, EX, 1, Tag.CITED_K2)
    if k == 3 and n >= 6:
        add(D, UP, 2, Tag.CITED_K3_UPPER)
    if rem == 0 and m >= 2:
        if odd_k:
            add(D, UP, 2, Tag.CITED_DIVISIBLE)
        else:
            add(D, EX, 1, Tag.CITED_DIVISIBLE)
    if g > 1:
        add(D, UP, 2 if g % 2 == 0 else F(7, 2), Tag.CITED_GCD_UPPER)
    if g == 1 and n >= 2 * k:
        s = coprime_step(n, k)
        add(D, LO, F(k, 2 * s), Tag.CITED_COPRIME_LOWER, note=f"r={rem}, s={s}")
    if not odd_k and rem in (1, k - 1):
        add(D, EX, F(k, 2), Tag.CITED_EVEN_K_PM1)
    if odd_k and n % (2 * k) == 0 and n // (2 * k) > 1:
        add(both, EX, F(3, 2), Tag.CITED_2KT)
    if k == 3 and n % 6 == 3 and n > 15:
        add(D, EX, 2, Tag.CITED_K3_6T3)
    if not odd_k and any((n + e) % k == 0 and (n + e) // k > 2 for e in (-2, 2)):
        add(M, EX, 1, Tag.CITED_2KM_PM2)
    if (n, k) == (15, 3):
        add(D, EX, 1, Tag.CITED_DISC_15_3, note="disc(15,3)=1")
    if (n, k) == (21, 3):
        add(M, EX, 2, Tag.CITED_MSUM_21_3, note="msum(21,3)=2")

    # small-k summary tables, for n >= 2k only
    if n >= 2 * k:
        for side, val in _small_k_msum_rows(n, k):
            add(M, side, val, Tag.TABLE_MSUM)
        for side, val in _small_k_disc_rows(n, k):
            add(D, side, val, Tag.TABLE_DISC)
    return out


def _collect(n: int, k: int) -> list[Fact]:
    n, kr = reduce_instance(n, k)
    facts = list(orientation_facts(n, kr))
    if n - kr != kr:
        for f in orientation_facts(n, n - kr):
            facts.append(Fact(f.quantity, f.side, f.value, f.tag, f.strict, f.note, f.construction, via=(n, n - kr)))
    g = math.gcd(n, kr)
    if g > 1 and g % 2 == 1:
        sub = _bounds(n // g, kr // g, Quantity.DISC, ())
        facts.append(Fact(D, UP, sub.upper.to_fraction(), Tag.CITED_ODD_GCD, note=f"disc({n // g},{kr // g}) <= {sub.upper}"))
    return facts


def _tighten(fact: Fact, half: bool) -> tuple[HalfInt, list[Provenance]]:
    prov = [fact.provenance()]
    if fact.via is not None:
        prov.append(Provenance(Tag.COMPLEMENT, note=f"via ({fact.via[0]},{fact.via[1]})"))
    if fact.side is Side.UPPER:
        v = floor_in_class(fact.value, half)
        if v.to_fraction() != fact.value:
            prov.append(Provenance(Tag.PARITY_CLASS))
        return v, prov
    v = ceil_in_class(fact.value, half, strict=fact.strict)
    # a strict bound stepping by 1/2 needs nothing beyond the half-integer grid
    gap = v.to_fraction() - fact.value
    if (fact.strict and gap > F(1, 2)) or (not fact.strict and gap != 0):
        prov.append(Provenance(Tag.PARITY_CLASS))
    return v, prov


def _pick(cands: list[tuple[HalfInt, list[Provenance]]], best) -> tuple[HalfInt, tuple[Provenance, ...]]:
    value = best(v for v, _ in cands)
    prov: list[Provenance] = []
    for v, ps in cands:
        if v == value:
            for p in ps:
                if p not in prov:
                    prov.append(p)
    return value, tuple(prov)


Certificates = Mapping[tuple[int, int, str], HalfInt]


def _bounds(n: int, k: int, quantity: Quantity, certs: tuple) -> BoundReport:
    return _bounds_cached(n, k, Quantity(quantity), certs)


@lru_cache(maxsize=4096)
def _bounds_cached(n: int, k: int, quantity: Quantity, certs: tuple) -> BoundReport:
    facts = _collect(n, k)
    nr, kr = reduce_instance(n, k)
    for (cn, ck, cq), val in certs:
        if cn == nr and min(ck, cn - ck) == kr:
            facts.append(Fact(Quantity(cq), EX, val.to_fraction(), Tag.SOLVER))
    half = parity_is_half(n, k)

    def usable(f: Fact, side: Side) -> bool:
        if f.side not in (side, EX):
            return False
        if f.quantity is quantity:
            return True
        # msum <= disc: msum lower bounds lift disc, disc upper bounds cap msum
        if side is LO:
            return quantity is D and f.quantity is M
        return quantity is M and f.quantity is D

    lows = [_tighten(Fact(f.quantity, LO, f.value, f.tag, f.strict, f.note, f.construction, f.via), half)
            for f in facts if usable(f, LO)]
    ups = [_tighten(Fact(f.quantity, UP, f.value, f.tag, f.strict, f.note, f.construction, f.via), half)
           for f in facts if usable(f, UP)]
    lower, lprov = _pick(lows, max)
    upper, uprov = _pick(ups, min)
    if lower > upper:
        raise BoundsInconsistency(
            f"{quantity.value}({n},{k}): lower {lower} {[str(p) for p in lprov]} exceeds "
            f"upper {upper} {[str(p) for p in uprov]}"
        )
    return BoundReport(n, k, quantity, lower, lprov, upper, uprov, tuple(facts))


def bound_report(
    n: int,
    k: int,
    quantity: Quantity | str = Quantity.MSUM,
    certificates: Optional[Certificates] = None,
) -> BoundReport:
    """Combined lower/upper bounds for msum(n, k) or disc(n, k).

    ``certificates`` maps (n, k, quantity) to solver-verified exact values and
    adds them as SolverCertificate facts.
    """
    _check(n, k)
    certs = tuple(sorted(((key[0], key[1], str(Quantity(key[2]).value)), v) for key, v in (certificates or {}).items()))
    return _bounds(n, k, Quantity(quantity), certs)


def msum_lower_bound(n: int, k: int) -> tuple[HalfInt, tuple[Provenance, ...]]:
    r = bound_report(n, k, M)
    return r.lower, r.lower_provenance


def msum_upper_bound(n: int, k: int) -> tuple[HalfInt, tuple[Provenance, ...]]:
    r = bound_report(n, k, M)
    return r.upper, r.upper_provenance


def known_msum(n: int, k: int) -> Optional[tuple[HalfInt, tuple[Provenance, ...]]]:
    """Exact msum(n, k) when the facts pin it down, else None."""
    r = bound_report(n, k, M)
    if r.exact is None:
        return None
    return r.exact, tuple(dict.fromkeys(r.lower_provenance + r.upper_provenance))


def known_disc(n: int, k: int) -> BoundReport:
    return bound_report(n, k, D)
