"""Minimal maximal k-consecutive sums of cyclic permutations of 1..n."""

__version__ = "0.1.0"

from .bounds import BoundReport, Quantity, bound_report, known_disc, known_msum, reduce_instance  # noqa: E402
from .constructions import construct_even_even, construct_mod_minus1, construct_mod_plus1  # noqa: E402
from .halfint import HalfInt  # noqa: E402
from .perm import (  # noqa: E402
    Permutation,
    complement,
    diff_sequence,
    disc_of,
    msum_of,
    reverse,
    rotate,
    window_profile,
)
from .solver import SearchConfig, SearchOutcome, brute_force_disc, brute_force_msum, solve_disc, solve_msum  # noqa: E402

__all__ = [
    "BoundReport",
    "HalfInt",
    "Permutation",
    "Quantity",
    "SearchConfig",
    "SearchOutcome",
    "bound_report",
    "brute_force_disc",
    "brute_force_msum",
    "complement",
    "construct_even_even",
    "construct_mod_minus1",
    "construct_mod_plus1",
    "diff_sequence",
    "disc_of",
    "known_disc",
    "known_msum",
    "msum_of",
    "reduce_instance",
    "reverse",
    "rotate",
    "solve_disc",
    "solve_msum",
    "window_profile",
]
