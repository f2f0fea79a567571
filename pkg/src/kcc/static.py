"""Static k-center routines: greedy maximal independent sets, the bottleneck
binary search 2-approximation, farthest-first traversal, and an exhaustive
optimum for small instances.

All "arbitrary" choices are resolved by ascending point id.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import OracleSizeExceeded, TooFewPoints
from .metric import MetricInstance, PointId, solution_cost, sorted_distinct_distances

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class StaticSolution:
    centers: tuple[PointId, ...]
    radius: float


def is_independent(inst: MetricInstance, S: Sequence[PointId], r: float, strict: bool = True) -> bool:
    """Pairwise distances in ``S`` are all ``> r`` (``>= r`` when not strict)."""
    if len(S) < 2:
        return True
    D = inst.distances(S, S)[np.triu_indices(len(S), 1)]
    return bool(np.all(D > r) if strict else np.all(D >= r))


def is_dominating(inst: MetricInstance, S: Sequence[PointId], r: float) -> bool:
    if len(inst) == 0:
        return True
    if len(S) == 0:
        return False
    return bool(inst.distances_to(list(S)).min(axis=1).max() <= r)


def maximal_independent_set(inst: MetricInstance, r: float) -> list[PointId]:
    """Greedy maximal distance-``r`` independent set in ascending id order.

    Scanning ids upward and keeping ``p`` iff it is farther than ``r`` from
    everything kept so far is the same as repeatedly taking the smallest
    uncovered id and covering its closed ``r``-ball, which is what runs here.
    """
    ids = inst.sorted_ids()
    if not ids:
        return []
    covered = np.zeros(len(ids), dtype=bool)
    taken: list[PointId] = []
    while not covered.all():
        idx = int(np.argmin(covered))
        taken.append(ids[idx])
        covered |= inst.distances([ids[idx]], ids)[0] <= r
    return taken


def hochbaum_shmoys(inst: MetricInstance, k: int) -> StaticSolution:
    """Binary search over the sorted pairwise distances for the smallest
    radius whose greedy maximal independent set has at most ``k`` points.

    The greedy set size is not monotone in ``r``, but every radius at or above
    the largest distance not exceeding ``2 R*`` admits at most ``k`` points, so
    the search's "last failing / first passing" boundary still lands at a
    radius ``<= 2 R*``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = len(inst)
    if n == 0:
        raise TooFewPoints("empty point set")
    if k >= n:
        return StaticSolution(tuple(inst.sorted_ids()), 0.0)
    D = sorted_distinct_distances(inst)
    lo, hi = -1, len(D) - 1
    best = maximal_independent_set(inst, float(D[hi]))
    while hi - lo > 1:
        mid = (lo + hi) // 2
        cand = maximal_independent_set(inst, float(D[mid]))
        if len(cand) <= k:
            hi, best = mid, cand
        else:
            lo = mid
    return StaticSolution(tuple(best), solution_cost(inst, best))


def gonzalez(
    inst: MetricInstance,
    k: int,
    seed: PointId,
    universe: Iterable[PointId] | None = None,
) -> list[PointId]:
    """Farthest-first traversal of ``universe`` (default: all of ``P``)."""
    pool = sorted(universe) if universe is not None else inst.sorted_ids()
    inst.require(seed)
    if k > len(pool):
        raise TooFewPoints(f"cannot pick {k} points from {len(pool)}")
    if seed not in pool:
        raise ValueError(f"seed {seed!r} is not in the universe")
    order = [seed]
    D = inst.distances(pool, [seed])[:, 0]
    chosen = np.zeros(len(pool), dtype=bool)
    chosen[pool.index(seed)] = True
    while len(order) < k:
        masked = np.where(chosen, -np.inf, D)
        # pool is sorted, so argmax returns the smallest id among ties
        idx = int(np.argmax(masked))
        chosen[idx] = True
        order.append(pool[idx])
        D = np.minimum(D, inst.distances(pool, [pool[idx]])[:, 0])
    return order


def brute_force_opt(inst: MetricInstance, k: int, limit: int = BRUTE_FORCE_LIMIT) -> StaticSolution:
    """Exact optimum by enumerating every center set of size ``min(k, |P|)``."""
    n = len(inst)
    if n > limit:
        raise OracleSizeExceeded(f"{n} points exceed the exhaustive-search limit {limit}")
    if n == 0:
        raise TooFewPoints("empty point set")
    ids = inst.sorted_ids()
    m = min(k, n)
    if m == n:
        return StaticSolution(tuple(ids), 0.0)
    D = inst.distances(ids, ids)
    best_cost, best = np.inf, None
    combos = np.array(list(itertools.combinations(range(n), m)), dtype=np.intp)
    for start in range(0, len(combos), 4096):
        chunk = combos[start : start + 4096]
        # (chunk, n, m) -> nearest chosen center per point -> worst point
        costs = D[:, chunk].transpose(1, 0, 2).min(axis=2).max(axis=1)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost, best = float(costs[i]), chunk[i]
    return StaticSolution(tuple(ids[j] for j in best), best_cost)


def optimal_radius(inst: MetricInstance, k: int, limit: int = BRUTE_FORCE_LIMIT) -> float:
    return brute_force_opt(inst, k, limit).radius
