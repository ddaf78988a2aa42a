"""Per-job interval index sets on a fixed discretization."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..core import Instance
from ..timegrid import Discretization, check_grid


@dataclass(frozen=True)
class IntervalSets:
    """Index sets for every job arc ``a`` (1-based interval indices).

    ``S[a]``: intervals where the job can start; ``T[a]``: intervals it can
    touch; ``Q[a, i]``: intervals affected by a start in ``i``; ``P[a, i]`` and
    ``Pstar[a, i]``: start intervals that can affect (or fully close) ``i``;
    ``mu_plus``/``mu_minus[a, k, i]``: bounds on the processing time inside
    ``i`` for a start in ``k``; ``E[a, i]``: intervals where the job can end
    when it starts in ``i``.  With ``lower=True`` the start-on-breakpoint
    reading is used for ``P`` and both ``mu`` bounds equal the interval length.
    """

    grid: Discretization
    lower: bool
    S: dict
    T: dict
    Q: dict
    P: dict
    Pstar: dict
    mu_plus: dict
    mu_minus: dict
    E: dict


def interval_sets(inst: Instance, grid: Discretization, lower: bool = False) -> IntervalSets:
    check_grid(inst, grid)
    t = grid.points
    n = grid.n
    S, T, Q, P, Pstar, mup, mum, E = {}, {}, {}, {}, {}, {}, {}, {}
    for job in inst.jobs:
        a, r, d, p = job.arc, job.release, job.deadline, job.processing
        S[a] = tuple(i for i in range(1, n + 1) if r < t[i] and d - p >= t[i - 1])
        T[a] = tuple(i for i in range(1, n + 1) if d > t[i - 1] and r < t[i])
        if not S[a]:
            raise AssertionError(f"job {a} has no start interval on the grid")
        for i in S[a]:
            Q[a, i] = tuple(k for k in T[a] if k >= i and t[i] + p > t[k - 1])
            E[a, i] = tuple(k for k in range(1, n + 1) if t[i - 1] + p <= t[k] and t[i] + p > t[k - 1])
        for i in T[a]:
            if lower:
                P[a, i] = tuple(k for k in S[a] if k <= i and t[k - 1] + p >= t[i])
                Pstar[a, i] = P[a, i]
                for k in P[a, i]:
                    mup[a, k, i] = mum[a, k, i] = t[i] - t[i - 1]
                continue
            P[a, i] = tuple(k for k in S[a] if t[k - 1] <= t[i - 1] < t[k] + p)
            Pstar[a, i] = tuple(k for k in P[a, i] if max(t[k - 1], r) + p >= min(t[i], d))
            for k in P[a, i]:
                mup[a, k, i] = min(t[i], d, t[k] + p) - max(t[i - 1], r)
                if k == i:
                    lo = max(Fraction(0), min(t[k], d) - (d - p))
                elif k in Pstar[a, i]:
                    lo = min(t[i], d) - max(t[i - 1], r)
                else:
                    lo = max(Fraction(0), max(t[k - 1], r) + p - t[i - 1])
                mum[a, k, i] = lo
    return IntervalSets(grid, lower, S, T, Q, P, Pstar, mup, mum, E)
