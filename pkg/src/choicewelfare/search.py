"""Choice-set enumeration, rationality sweeps, envelopes, and crossings.

Welfare of every non-empty subset of actions is evaluated on a grid of the
logit rationality parameter q; the outer envelope names the best subset at
each q. Because welfare orderings of subsets can reverse as q rises (and
reverse back), crossings of welfare curves are located for every subset pair
by sign-change detection on the grid plus bisection refinement. Crossing
detection is quadratic in the number of subsets, i.e. O(4^|actions|) pairs;
the |actions| <= 20 enumeration guard keeps sweeps themselves feasible but
large action sets make the pair scan the dominant cost.
"""

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from numpy.typing import NDArray

from ._kernels import logit_welfare_curve
from .models import ChoiceModel, _validate_available
from .scenario import ActionSet, Population
from .welfare import policy_welfare

MAX_ACTIONS = 20

# |difference| at or below this is "touching", not a sign change.
TOUCH_TOL = 1e-12
BISECT_INTERVAL_TOL = 1e-6
BISECT_VALUE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Strictly increasing, finite, non-negative q values."""

    q_values: NDArray[np.float64]

    def __post_init__(self):
        q = np.array(self.q_values, dtype=np.float64)
        q.setflags(write=False)
        if q.ndim != 1 or q.shape[0] == 0:
            raise ValueError("grid must be a non-empty 1-d vector")
        if not np.all(np.isfinite(q)):
            raise ValueError("grid values must be finite")
        if np.any(q < 0.0):
            raise ValueError("grid values must be >= 0")
        if q.shape[0] > 1 and np.any(np.diff(q) <= 0.0):
            raise ValueError("grid values must be strictly increasing")
        object.__setattr__(self, "q_values", q)

    def __eq__(self, other):
        if not isinstance(other, SweepGrid):
            return NotImplemented
        return np.array_equal(self.q_values, other.q_values)

    @classmethod
    def from_range(
        cls, q_min: float = 0.0, q_max: float = 10.0, q_step: float = 0.05
    ) -> "SweepGrid":
        """Inclusive arithmetic grid; the defaults bracket every crossing the
        bundled scenarios exhibit, with margin."""
        q_min, q_max, q_step = float(q_min), float(q_max), float(q_step)
        if q_step <= 0.0 or not np.isfinite(q_step):
            raise ValueError("q_step must be positive and finite")
        if q_max < q_min:
            raise ValueError("q_max must be >= q_min")
        span = q_max - q_min
        n = int(np.floor(span / q_step + 1e-9))
        values = q_min + q_step * np.arange(n + 1)
        if values[-1] > q_max:
            values = values[:-1]
        return cls(q_values=values)


@dataclass(frozen=True)
class Crossing:
    """One located welfare crossing between two subsets."""

    subset_a: tuple[int, ...]
    subset_b: tuple[int, ...]
    q_star: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Welfare of every subset at every grid q, plus envelope and crossings.

    `welfare[s, qi]` is subset s's welfare at grid point qi; `envelope[qi]`
    is the index (into `subsets`) of the best subset there, ties broken
    toward the smaller subset then lexicographically (the enumeration order
    makes the first argmax exactly that).
    """

    grid: SweepGrid
    subsets: tuple[tuple[int, ...], ...]
    welfare: NDArray[np.float64]
    envelope: NDArray[np.int64]
    crossings: tuple[Crossing, ...]


def enumerate_choice_sets(actions: ActionSet) -> list[tuple[int, ...]]:
    """All 2^n - 1 non-empty subsets, ordered by size then lexicographically."""
    n = len(actions)
    if n > MAX_ACTIONS:
        raise ValueError(
            f"action set of size {n} exceeds the enumeration guard ({MAX_ACTIONS})"
        )
    out: list[tuple[int, ...]] = []
    for size in range(1, n + 1):
        out.extend(itertools.combinations(range(n), size))
    return out


def _subset_welfare_curve(
    pop: Population, subset: tuple[int, ...], q_values: NDArray[np.float64]
) -> NDArray[np.float64]:
    matrix = np.ascontiguousarray(pop.utility_matrix[:, list(subset)])
    return logit_welfare_curve(pop.weights, matrix, q_values)


def sweep_logit(pop: Population, grid: Optional[SweepGrid] = None) -> SweepResult:
    """Evaluate every subset under Logit(q) across the grid.

    The default grid is 0..10 in steps of 0.05. Crossings are located for
    every unordered subset pair.
    """
    if grid is None:
        grid = SweepGrid.from_range()
    subsets = tuple(enumerate_choice_sets(pop.actions))
    qs = grid.q_values
    welfare = np.empty((len(subsets), qs.shape[0]))
    for si, subset in enumerate(subsets):
        welfare[si] = _subset_welfare_curve(pop, subset, qs)
    envelope = np.argmax(welfare, axis=0).astype(np.int64)
    crossings = []
    for ia, ib in itertools.combinations(range(len(subsets)), 2):
        roots = _refine_sign_changes(
            qs,
            welfare[ia] - welfare[ib],
            lambda q, a=subsets[ia], b=subsets[ib]: _difference_at(pop, a, b, q),
        )
        crossings.extend(
            Crossing(subset_a=subsets[ia], subset_b=subsets[ib], q_star=r)
            for r in roots
        )
    welfare.setflags(write=False)
    envelope.setflags(write=False)
    return SweepResult(
        grid=grid,
        subsets=subsets,
        welfare=welfare,
        envelope=envelope,
        crossings=tuple(crossings),
    )


def find_crossings(
    pop: Population,
    subset_a: Iterable[int],
    subset_b: Iterable[int],
    grid: Optional[SweepGrid] = None,
) -> list[float]:
    """q values where the two subsets' welfare curves cross, in increasing
    order.

    Sign changes of the difference between adjacent grid points are refined
    by bisection until the bracket is narrower than 1e-6 and the welfare gap
    at the reported point is at most 1e-8. Grid points where the difference
    is within 1e-12 of zero count as touching, not crossing, unless the sign
    differs on the two flanking sides. Crossings that lie entirely between
    two grid points with equal signs are invisible at the grid resolution.
    """
    if grid is None:
        grid = SweepGrid.from_range()
    sub_a = _validate_available(subset_a, pop.n_actions)
    sub_b = _validate_available(subset_b, pop.n_actions)
    qs = grid.q_values
    diff = _subset_welfare_curve(pop, sub_a, qs) - _subset_welfare_curve(
        pop, sub_b, qs
    )
    return _refine_sign_changes(
        qs, diff, lambda q: _difference_at(pop, sub_a, sub_b, q)
    )


def _difference_at(pop, sub_a, sub_b, q: float) -> float:
    qarr = np.array([q])
    return float(
        _subset_welfare_curve(pop, sub_a, qarr)[0]
        - _subset_welfare_curve(pop, sub_b, qarr)[0]
    )


def _refine_sign_changes(qs, diff, diff_fn) -> list[float]:
    signs = np.where(np.abs(diff) <= TOUCH_TOL, 0.0, np.sign(diff))
    nonzero = np.nonzero(signs)[0]
    roots: list[float] = []
    for left, right in zip(nonzero[:-1], nonzero[1:]):
        if signs[left] == signs[right]:
            continue
        roots.append(
            _bisect(diff_fn, float(qs[left]), float(qs[right]), float(diff[left]))
        )
    return roots


def _bisect(diff_fn, lo: float, hi: float, f_lo: float) -> float:
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = diff_fn(mid)
        if f_mid == 0.0 or ((hi - lo) <= BISECT_INTERVAL_TOL and abs(f_mid) <= BISECT_VALUE_TOL):
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo = mid
            f_lo = f_mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class OptimizeResult:
    """Welfare-maximizing choice subset for a fixed behavior model."""

    subset: tuple[int, ...]
    welfare: float


def optimize_choice_set(pop: Population, model: ChoiceModel) -> OptimizeResult:
    """Exhaustive argmax of policy welfare over all non-empty subsets.

    Ties resolve to the first subset in (size, lexicographic) order. The
    reported welfare is exactly policy_welfare's value for the winner.
    """
    best_subset: Optional[tuple[int, ...]] = None
    best_welfare = -np.inf
    for subset in enumerate_choice_sets(pop.actions):
        welfare = policy_welfare(pop, subset, model).welfare
        if welfare > best_welfare:
            best_welfare = welfare
            best_subset = subset
    assert best_subset is not None
    return OptimizeResult(subset=best_subset, welfare=best_welfare)
