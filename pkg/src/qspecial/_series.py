"""Truncated summation of eventually-geometric series."""

from __future__ import annotations

from typing import Callable

from .errors import ConvergenceError
from .params import TruncationPolicy

EPS = 2.220446049250313e-16


def sum_geometric(
    term: Callable[[int], float],
    ratio: float,
    policy: TruncationPolicy,
    start: int = 0,
    offset: float = 0.0,
    what: str = "series",
) -> tuple[float, float, int]:
    """Sum ``term(k)`` for k = start, start+1, ... whose tail decays like ``ratio**k``.

    Stops once ``policy.stop_run`` consecutive terms give a geometric tail
    bound ``|t| * ratio / (1 - ratio)`` below ``rel_tol * max(|offset + s|, |offset|)``.

    The last term extrapolated geometrically is added to the returned sum;
    the tail bound stays in the error estimate. Returns
    ``(sum, tail_bound, terms_used)``. ``offset`` only enters the stop rule.
    """
    factor = ratio / (1.0 - ratio)
    floor = abs(offset)
    s = 0.0
    abs_sum = 0.0
    run = 0
    n = 0
    k = start
    while n < policy.max_terms:
        t = term(k)
        s += t
        abs_sum += abs(t)
        n += 1
        k += 1
        tail = abs(t) * factor
        if tail <= policy.rel_tol * max(abs(offset + s), floor):
            run += 1
            if run >= policy.stop_run:
                return s + t * factor, tail + EPS * abs_sum, n
        else:
            run = 0
    raise ConvergenceError(f"{what}: no convergence within {policy.max_terms} terms")
