from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ksum.halfint import HalfInt, parity_is_half
from ksum.perm import (
    DomainError,
    InvalidPermutation,
    ParseError,
    Permutation,
    canonical_rotation,
    complement,
    diff_sequence,
    disc_of,
    format_permutation,
    msum_of,
    parse_permutations,
    reverse,
    rotate,
    sums_from_diffs,
    window_profile,
)


@st.composite
def perm_and_k(draw, max_n=14):
    n = draw(st.integers(2, max_n))
    p = Permutation(draw(st.permutations(range(1, n + 1))))
    k = draw(st.integers(1, n - 1))
    return p, k


def test_window_sums_by_hand():
    p = Permutation([1, 2, 3, 4])
    prof = window_profile(p, 2)
    assert prof.sums == (3, 5, 7, 5)
    assert prof.mean == HalfInt.of(5)
    assert msum_of(p, 2) == HalfInt.of(2)
    assert disc_of(p, 2) == HalfInt.of(2)


def test_cyclic_indexing():
    p = Permutation([3, 1, 2])
    assert p[1] == 3 and p[4] == 3 and p[0] == 2


def test_invalid_reports_missing_and_duplicates():
    with pytest.raises(InvalidPermutation) as exc:
        Permutation([1, 2, 2, 5])
    assert exc.value.missing == [3, 4]
    assert exc.value.duplicates == [2, 5]


def test_rejects_short_and_bad_k():
    with pytest.raises(DomainError):
        Permutation([1])
    p = Permutation([2, 1, 3])
    with pytest.raises(DomainError):
        window_profile(p, 3)
    with pytest.raises(DomainError):
        window_profile(p, 0)


def test_parse_text_format():
    text = "# header\n1, 2 3\n\n 2 1 # trailing\n"
    assert [q.entries for q in parse_permutations(text)] == [(1, 2, 3), (2, 1)]


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_permutations("1 2 3\n1 2 x3\n")
    assert (exc.value.line, exc.value.column, exc.value.token) == (2, 5, "x3")


def test_parse_invalid_carries_line():
    with pytest.raises(InvalidPermutation) as exc:
        parse_permutations("1 2\n1 1 3\n")
    assert exc.value.line == 2


def test_format_roundtrip():
    p = Permutation([4, 1, 3, 2])
    assert parse_permutations(format_permutation(p, ", "))[0] == p


def test_canonical_rotation():
    p = canonical_rotation(Permutation([2, 5, 1, 3, 4]))
    assert p.entries == (5, 1, 3, 4, 2)
    with pytest.raises(DomainError):
        rotate(p, 5)


@given(perm_and_k())
def test_sum_of_window_sums(pk):
    p, k = pk
    n = p.n
    assert sum(window_profile(p, k).sums) == k * n * (n + 1) // 2


@given(perm_and_k())
def test_msum_at_most_disc(pk):
    p, k = pk
    assert msum_of(p, k) <= disc_of(p, k)


@given(perm_and_k())
def test_per_permutation_parity(pk):
    p, k = pk
    half = parity_is_half(p.n, k)
    assert (msum_of(p, k).doubled % 2 == 1) == half
    assert (disc_of(p, k).doubled % 2 == 1) == half


@given(perm_and_k(), st.data())
def test_rotation_and_reversal_invariance(pk, data):
    p, k = pk
    r = data.draw(st.integers(0, p.n - 1))
    for q in (rotate(p, r), reverse(p)):
        assert msum_of(q, k) == msum_of(p, k)
        assert disc_of(q, k) == disc_of(p, k)


@given(perm_and_k())
def test_diff_sequence_telescopes(pk):
    p, k = pk
    prof = window_profile(p, k)
    assert sums_from_diffs(prof.sums[0], diff_sequence(p, k)) == prof.sums
    assert sum(diff_sequence(p, k).d) == 0


@given(perm_and_k())
def test_complement_duality_sampled(pk):
    p, k = pk
    n = p.n
    assert msum_of(p, n - k) == msum_of(complement(p), k)
    assert disc_of(p, n - k) == disc_of(p, k)


@pytest.mark.parametrize("n", range(2, 7))
def test_complement_duality_exhaustive(n):
    for entries in permutations(range(1, n + 1)):
        p = Permutation(entries)
        c = complement(p)
        for k in range(1, n):
            assert msum_of(p, n - k) == msum_of(c, k)
            assert disc_of(p, n - k) == disc_of(p, k)
