"""Exact half-integer scalars.

Every msum/disc value is either an integer or an odd multiple of 1/2, so a
value is stored as twice itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, "HalfInt"]


@dataclass(frozen=True, order=True)
class HalfInt:
    doubled: int

    def __post_init__(self) -> None:
        if not isinstance(self.doubled, int) or isinstance(self.doubled, bool):
            raise TypeError(f"doubled must be int, got {type(self.doubled).__name__}")

    @classmethod
    def of(cls, value: Number) -> HalfInt:
        """Build from an int, a HalfInt, or a Fraction with denominator 1 or 2."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, int):
            return cls(2 * value)
        frac = Fraction(value)
        twice = 2 * frac
        if twice.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(twice))

    @classmethod
    def parse(cls, text: str) -> HalfInt:
        text = text.strip()
        if text.endswith("/2"):
            return cls(int(text[:-2]))
        return cls(2 * int(text))

    @property
    def is_integer(self) -> bool:
        return self.doubled % 2 == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __add__(self, other: Number) -> HalfInt:
        return HalfInt(self.doubled + HalfInt.of(other).doubled)

    __radd__ = __add__

    def __sub__(self, other: Number) -> HalfInt:
        return HalfInt(self.doubled - HalfInt.of(other).doubled)

    def __rsub__(self, other: Number) -> HalfInt:
        return HalfInt(HalfInt.of(other).doubled - self.doubled)

    def __neg__(self) -> HalfInt:
        return HalfInt(-self.doubled)

    def __abs__(self) -> HalfInt:
        return HalfInt(abs(self.doubled))

    def __str__(self) -> str:
        if self.doubled % 2 == 0:
            return str(self.doubled // 2)
        return f"{self.doubled}/2"

    def __repr__(self) -> str:
        return f"HalfInt(doubled={self.doubled})"


def parity_is_half(n: int, k: int) -> bool:
    """True when window excesses over the mean are odd multiples of 1/2."""
    return k % 2 == 1 and n % 2 == 0


def ceil_in_class(value: Fraction | int, half: bool, strict: bool = False) -> HalfInt:
    """Smallest member of the parity class that is >= value (> value if strict).

    The class is {1/2, 3/2, ...} when ``half`` else the integers.
    """
    value = Fraction(value)
    if half:
        # members are (2j+1)/2
        j = math.floor((value - Fraction(1, 2)))
        cand = Fraction(2 * j + 1, 2)
        while cand < value or (strict and cand == value):
            cand += 1
        return HalfInt.of(cand)
    cand = Fraction(math.floor(value))
    while cand < value or (strict and cand == value):
        cand += 1
    return HalfInt.of(cand)


def floor_in_class(value: Fraction | int, half: bool) -> HalfInt:
    """Largest member of the parity class that is <= value."""
    value = Fraction(value)
    if half:
        j = math.ceil(value - Fraction(1, 2))
        cand = Fraction(2 * j + 1, 2)
        while cand > value:
            cand -= 1
        return HalfInt.of(cand)
    return HalfInt.of(math.floor(value))
