"""Input validation helpers used by the estimators and the functional API."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .errors import InputError


def check_rng(random_state) -> np.random.Generator:
    """Coerce ``random_state`` (None, int, or Generator) to a Generator.

    None draws fresh OS entropy; an int seeds deterministically; a Generator
    is passed through unchanged.
    """
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return np.random.default_rng(random_state)
    if isinstance(random_state, np.random.Generator):
        return random_state
    raise InputError(
        f"random_state must be None, an int, or a numpy Generator, got {type(random_state).__name__}"
    )


def check_ordering(n: int, perm: Sequence[int]) -> tuple[int, ...]:
    """Validate that ``perm`` is a permutation of 0..n-1 and return it as a tuple."""
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise InputError(f"not a permutation of 0..{n - 1}: {perm!r}")
    return perm


def check_graphs(graphs: Iterable, allow_empty: bool = False) -> list:
    """Validate a corpus argument: an iterable of Graph values."""
    from .graphs import Graph

    out = list(graphs)
    if not out and not allow_empty:
        raise InputError("expected a non-empty collection of graphs")
    for i, g in enumerate(out):
        if not isinstance(g, Graph):
            raise InputError(f"item {i} is not a Graph: {type(g).__name__}")
    return out


def check_finite(name: str, *arrays: np.ndarray) -> None:
    """Raise NumericError if any array contains NaN or infinity."""
    from .errors import NumericError

    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"non-finite values in {name}")
