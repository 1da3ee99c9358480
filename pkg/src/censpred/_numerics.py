"""Root bracketing, vectorized bisection and signed summation."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .exceptions import NumericalError

MAX_DOUBLINGS = 60


def expand_upper(
    f: Callable[[np.ndarray], np.ndarray],
    target,
    start,
    max_doublings: int = MAX_DOUBLINGS,
) -> np.ndarray:
    """Double ``start`` elementwise until ``f(hi) >= target``.

    ``f`` must be nondecreasing. Raises NumericalError when some element is
    still below target after ``max_doublings`` doublings.
    """
    hi = np.array(start, dtype=float, copy=True)
    target = np.broadcast_to(np.asarray(target, dtype=float), hi.shape)
    for _ in range(max_doublings + 1):
        short = f(hi) < target
        if not np.any(short):
            return hi
        hi = np.where(short, 2.0 * hi, hi)
    raise NumericalError(
        f"root not bracketed after {max_doublings} doublings"
    )


def bisect_increasing(
    f: Callable[[np.ndarray], np.ndarray],
    target,
    lo,
    hi,
    rtol: float = 1e-12,
    atol: float = 0.0,
    maxiter: int = 200,
) -> np.ndarray:
    """Solve ``f(x) = target`` for nondecreasing ``f`` on ``[lo, hi]``.

    Works elementwise on arrays, so a batch of independent monotone
    equations is solved in one pass. Iteration stops once every bracket
    satisfies ``hi - lo <= atol + rtol * |hi|``.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    for _ in range(maxiter):
        if np.all(hi - lo <= atol + rtol * np.abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def signed_sum(terms: np.ndarray, axis: int = -1) -> np.ndarray:
    """Sum signed terms in descending magnitude along ``axis``.

    numpy reduces contiguous axes pairwise, so ordering by magnitude first
    keeps the large cancelling terms together.
    """
    terms = np.moveaxis(np.asarray(terms, dtype=float), axis, -1)
    order = np.argsort(-np.abs(terms), axis=-1)
    ordered = np.ascontiguousarray(np.take_along_axis(terms, order, axis=-1))
    return ordered.sum(axis=-1)
