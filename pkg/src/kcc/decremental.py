"""Deletion-only consistent k-center: cost within ``6 R*``, recourse 1.

The radius ``r_hat`` is continuous: it starts at a pairwise distance of the
initial point set and afterwards only ever drops to the exact current cost.
Clusters are Regular (within ``r_hat``) or Zombie (within ``3 r_hat``).
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np

from .engine import ClusteredEngine, ClusterState, RecourseDelta, interleave_sequence, set_change
from .errors import UnsupportedOperation
from .metric import MetricInstance, PointId, sorted_distinct_distances
from .static import hochbaum_shmoys

R, Z = ClusterState.REGULAR, ClusterState.ZOMBIE


class DecrementalKCenter(ClusteredEngine):
    """Deletions only; preprocessing runs on the point set handed in.

    Parameters
    ----------
    inst : MetricInstance
        Initial point set.  With ``k`` or fewer points the engine starts (and
        stays) in degenerate mode.
    k : int
        Number of centers.
    """

    algorithm = "decremental"

    def __init__(self, inst: MetricInstance, k: int):
        super().__init__(inst, k)
        self.r_hat = 0.0
        if len(inst) > k:
            self.preprocess()
        else:
            self._enter_degenerate()

    def radius(self) -> float:
        return self.r_hat

    def independence_radius(self) -> float:
        return self.r_hat

    def preprocess(self) -> None:
        inst = self.inst
        D = sorted_distinct_distances(inst)
        S = list(hochbaum_shmoys(inst, self.k).centers)
        r1 = float(inst.distances_to(S).min(axis=1).max())
        self._require_distinct(r1)
        pos = bisect_left(D, r1)
        ids = inst.sorted_ids()
        while len(S) < self.k:
            d = inst.distances(ids, S).min(axis=1)
            hit = np.flatnonzero(d >= D[pos])
            if hit.size:
                S.append(ids[int(hit[0])])
            else:
                pos -= 1
        cost = float(inst.distances_to(S).min(axis=1).max())
        self.r_hat = float(D[bisect_left(D, cost)])
        self._assign_fresh(S, self.r_hat)
        self.last_cases = ["preprocess"]

    def insert(self, pid: PointId, coords=None) -> RecourseDelta:
        raise UnsupportedOperation("the decremental engine does not accept insertions", step=self.step + 1)

    def delete(self, pid: PointId) -> RecourseDelta:
        self._check_present(pid)
        before = self.center_set()
        self.step += 1
        self.last_cases = []
        if self.degenerate or len(self.inst) - 1 <= self.k:
            self.inst.remove(pid)
            self._enter_degenerate()
            self.last_cases = ["degenerate"]
        else:
            self._delete(pid)
        return set_change(before, self.center_set())

    def _delete(self, p: PointId) -> None:
        j = self._detach(p)
        self.inst.remove(p)
        if self.centers[j] != p:
            self.last_cases.append("non-center")
        else:
            self.centers[j] = None
            self.states[j] = Z
            self.last_cases.append(self._replace(j, self.r_hat, zombie_only=False))
        self.regulating_op()

    def regulating_op(self) -> float:
        table = self._table()
        cost = self._cost_of(table[3])
        if cost <= self.r_hat:
            self._regularize_all()
            self.r_hat = cost
        self._cleanup(table, self.r_hat, {R})
        return self.r_hat

    def find_sequence(self, n: int):
        seq = self._find_sequence(n, self.r_hat, zombie_only=False)
        return None if seq is None else interleave_sequence(*seq, self.centers)

    def reassigning_op(self, seed) -> None:
        self._reassign(sorted(seed), self.r_hat)

    def replace(self, n: int) -> str:
        return self._replace(n, self.r_hat, zombie_only=False)


def dec_preprocess(inst: MetricInstance, k: int) -> DecrementalKCenter:
    return DecrementalKCenter(inst, k)


def dec_delete(state: DecrementalKCenter, p: PointId) -> RecourseDelta:
    return state.delete(p)


def regulating_op(state: DecrementalKCenter) -> float:
    return state.regulating_op()


def dec_find_sequence(state: DecrementalKCenter, n: int):
    return state.find_sequence(n)


def dec_reassigning_op(state: DecrementalKCenter, seed) -> None:
    state.reassigning_op(seed)
