"""Insertion-only consistent k-center: cost within ``6 R*``, recourse 1.

No clusters are kept.  The radius doubles per extension level,
``r = base * 2**delta``, and the level never decreases.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .engine import INF, Engine, RecourseDelta, grow_to_k, set_change
from .errors import UnsupportedOperation
from .metric import MetricInstance, PointId
from .static import gonzalez


class IncrementalKCenter(Engine):
    """Insertions only.

    Parameters
    ----------
    inst : MetricInstance
        Initial point set; preprocessing runs as soon as it holds more than
        ``k`` points.
    k : int
        Number of centers.
    """

    algorithm = "incremental"
    growth = 2.0

    def __init__(self, inst: MetricInstance, k: int):
        super().__init__(inst, k)
        self.base = 0.0
        self.delta = 0
        if len(inst) > k:
            self.preprocess()
        else:
            self.centers = inst.sorted_ids()

    def r(self, level: int | None = None) -> float:
        return self.base * self.growth ** (self.delta if level is None else level)

    def radius(self) -> float:
        return self.r()

    def independence_radius(self) -> float:
        return self.r(self.delta - 1)

    def level_value(self) -> int:
        return self.delta

    def preprocess(self) -> None:
        S, r = grow_to_k(self.inst, self.k, self.growth)
        self._require_distinct(r)
        self.centers, self.base, self.delta = S, r, 0
        self.degenerate = False
        self.last_cases = ["preprocess"]

    def delete(self, pid: PointId) -> RecourseDelta:
        raise UnsupportedOperation("the incremental engine does not accept deletions", step=self.step + 1)

    def insert(self, pid: PointId, coords: Sequence[float] | None = None) -> RecourseDelta:
        self._check_new(pid)
        before = self.center_set()
        self.inst.add(pid, coords)
        self.step += 1
        self.last_cases = []
        if self.degenerate:
            if len(self.inst) > self.k:
                self.preprocess()
            else:
                self.centers.append(pid)
                self.last_cases = ["degenerate"]
        else:
            self._insert(pid)
        return set_change(before, self.center_set())

    def _insert(self, p: PointId) -> None:
        if self._dist_to_centers(p) <= self.r():
            self.last_cases.append("covered")
            return
        i, sep = self._closest_center_slot()
        if sep <= self.r():
            self.centers[i] = p
            self.last_cases.append("C1")
            return
        self.doubling_op(p)
        self.gonzalez_op()
        if self._dist_to_centers(p) > self.r():
            i, _ = self._closest_center_slot()
            self.centers[i] = p
            self.last_cases.append("C1-after-C2")
        else:
            self.last_cases.append("C2")

    def _dist_to_centers(self, p: PointId) -> float:
        return float(self.inst.distances([p], self.centers)[0].min())

    def _closest_center_slot(self) -> tuple[int, float]:
        """Largest slot whose center attains the minimum pairwise distance."""
        if len(self.centers) < 2:
            return len(self.centers) - 1, INF
        D = self.inst.distances(self.centers, self.centers)
        np.fill_diagonal(D, INF)
        near = D.min(axis=1)
        best = near.min()
        return int(np.flatnonzero(near == best)[-1]), float(best)

    def doubling_op(self, p: PointId) -> int:
        _, sep = self._closest_center_slot()
        d = self._dist_to_centers(p)
        while sep > self.r() and d > self.r():
            self.delta += 1
        return self.delta

    def gonzalez_op(self) -> list:
        self.centers = gonzalez(self.inst, len(self.centers), self.centers[0], universe=self.centers)
        return list(self.centers)

    def assignment(self) -> dict:
        """Nearest-center map (ties to the lower slot), computed on demand."""
        D = self.inst.distances_to(self.centers)
        return {q: self.centers[j] for q, j in zip(self.inst.ids(), D.argmin(axis=1))}


def inc_preprocess(inst: MetricInstance, k: int) -> IncrementalKCenter:
    return IncrementalKCenter(inst, k)


def inc_insert(state: IncrementalKCenter, p: PointId, coords=None) -> RecourseDelta:
    return state.insert(p, coords)


def doubling_op(state: IncrementalKCenter, p: PointId) -> int:
    return state.doubling_op(p)


def gonzalez_op(state: IncrementalKCenter) -> list:
    return state.gonzalez_op()
