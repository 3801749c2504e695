import pytest

from conftest import load_fixture
from ksum.constructions import (
    Family,
    build,
    construct_even_even,
    construct_mod_minus1,
    construct_mod_plus1,
    construction_id,
    expected_mod_msum_doubled,
    fill_even_even,
)
from ksum.halfint import HalfInt
from ksum.perm import DomainError, msum_of, window_profile
from ksum.solver import SearchConfig, solve_msum
from ksum.bounds import parity_floor

ODD_K = (5, 7, 9, 11)


@pytest.mark.parametrize("case", load_fixture("examples.json"), ids=lambda c: c["name"])
def test_golden_examples(case):
    make = construct_mod_plus1 if case["family"] == "mod+1" else construct_mod_minus1
    p = make(case["k"], case["m"])
    assert list(p.entries) == case["permutation"]


def test_box_grid_48_18():
    fx = load_fixture("grid_48_18.json")
    grid = fill_even_even(fx["n"], fx["k"])
    assert (grid.q, grid.r) == (fx["q"], fx["r"])
    assert [grid.row(a) for a in (1, 2, 3)] == fx["rows"]
    p = construct_even_even(48, 18)
    assert p.entries[:4] == (46, 3, 38, 11) and p.entries[-1] == 22
    assert "*" in grid.render().splitlines()[0]


@pytest.mark.parametrize("k", ODD_K)
@pytest.mark.parametrize("m", range(2, 7))
def test_mod_plus1_family(k, m):
    p = construct_mod_plus1(k, m)
    assert p.n == m * k + 1
    assert p.entries[-1] == 1
    assert msum_of(p, k) == HalfInt(expected_mod_msum_doubled(k, m))


@pytest.mark.parametrize("k", ODD_K)
@pytest.mark.parametrize("m", range(3, 7))
def test_mod_minus1_family(k, m):
    p = construct_mod_minus1(k, m)
    assert p.n == m * k - 1
    assert msum_of(p, k) == HalfInt(expected_mod_msum_doubled(k, m))


@pytest.mark.parametrize("k", range(4, 13, 2))
def test_even_even_family(k):
    for n in range(2 * k, 61, 2):
        p = construct_even_even(n, k)
        prof = window_profile(p, k)
        assert msum_of(p, k) == HalfInt.of(1), (n, k)
        target = k * (n + 1) // 2
        assert all(prof.sums[j] == target for j in range(0, n, 2)), (n, k)


@pytest.mark.parametrize("n,k", [(8, 4), (12, 4), (12, 6), (16, 4)])
def test_even_even_divisible_case(n, k):
    assert n % k == 0
    assert msum_of(construct_even_even(n, k), k) == HalfInt.of(1)


def test_domain_errors():
    with pytest.raises(DomainError):
        construct_mod_plus1(3, 4)
    with pytest.raises(DomainError):
        construct_mod_plus1(6, 4)
    with pytest.raises(DomainError):
        construct_mod_minus1(5, 2)
    with pytest.raises(DomainError):
        construct_even_even(10, 3)
    with pytest.raises(DomainError):
        construct_even_even(10, 6)


def test_build_by_id():
    cid = construction_id(Family.EVEN_EVEN, n=48, k=18)
    assert (cid.q, cid.r) == (2, 12)
    assert build(cid) == construct_even_even(48, 18)
    cid = construction_id(Family.MOD_MINUS1_ODD_K, k=5, m=5)
    assert cid.n == 24 and build(cid) == construct_mod_minus1(5, 5)


@pytest.mark.parametrize("n,k", [(8, 4), (10, 4), (11, 5), (12, 4), (12, 6)])
def test_construction_is_optimal_where_solver_finishes(n, k):
    if k % 2 == 0:
        p = construct_even_even(n, k)
    else:
        p = construct_mod_plus1(k, (n - 1) // k)
    got = solve_msum(n, k, SearchConfig(start_lower=parity_floor(n, k)))
    assert msum_of(p, k) == got.value
