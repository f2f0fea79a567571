"""Fully dynamic consistent k-center with worst-case recourse 1.

Centers live in ``k`` ordered slots.  Each slot's cluster is Regular (points
within ``r`` of the center), Extended (within ``2r``, after absorbing a merged
neighbor) or Zombie (within ``5r``, after its center was replaced).  The
working radius is ``r = base * 5**delta`` for an integer extension level.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .engine import INF, ClusteredEngine, ClusterState, RecourseDelta, argbest, grow_to_k, interleave_sequence, set_change
from .errors import IllegalState
from .metric import MetricInstance, PointId, min_pairwise

R, E, Z = ClusterState.REGULAR, ClusterState.EXTENDED, ClusterState.ZOMBIE
_NON_ZOMBIE = {R, E}


class FullyDynamicKCenter(ClusteredEngine):
    """Insertions and deletions; cost stays within ``50 R*``.

    Parameters
    ----------
    inst : MetricInstance
        Point set to start from; the engine owns it afterwards.
    k : int
        Number of centers.

    Notes
    -----
    While ``|P| <= k`` every point is its own center ("degenerate mode").
    The first time ``|P|`` exceeds ``k`` the static preprocessing runs.
    """

    algorithm = "fully"
    growth = 5.0

    def __init__(self, inst: MetricInstance, k: int):
        super().__init__(inst, k)
        self.base = 0.0
        self.delta = 0
        if len(inst) > k:
            self.preprocess()
        else:
            self._enter_degenerate()

    # --- radii -----------------------------------------------------------
    def r(self, level: int | None = None) -> float:
        return self.base * self.growth ** (self.delta if level is None else level)

    def radius(self) -> float:
        return self.r()

    def independence_radius(self) -> float:
        return self.r(self.delta - 1)

    def level_value(self) -> int:
        return self.delta

    # --- preprocessing ---------------------------------------------------
    def preprocess(self) -> None:
        S, r = grow_to_k(self.inst, self.k, self.growth)
        self._require_distinct(r)
        self.base, self.delta = r, 0
        self._assign_fresh(S, r)
        self.last_cases = ["preprocess"]

    # --- updates ---------------------------------------------------------
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
                self._enter_degenerate()
                self.last_cases = ["degenerate"]
        else:
            self._insert(pid)
        return set_change(before, self.center_set())

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

    def _insert(self, p: PointId) -> None:
        r = self.r()
        slots, centers = self._live()
        d = self.inst.distances([p], centers)[0]
        nz = [c for c, j in enumerate(slots) if self.states[j] in _NON_ZOMBIE and d[c] <= r]
        if nz:
            self._move(p, slots[nz[0]])
            self.last_cases.append("join")
            self.decreasing_op()
            return
        pair = self._merge_pair(r)
        if pair is not None:
            s, i = pair
            self._merge(s, i)
            slots, centers = self._live()
            d = self.inst.distances([p], centers)[0]
            if d.min() <= r:
                self._case_c3a(p, slots, centers, d, i, r)
            else:
                self._install(i, p, R)
                self.last_cases.append("C3b")
        else:
            if self.cost() > r:
                self.increasing_op()
            r = self.r()
            ids, slots, centers, D = self._table()
            near = D.min(axis=1)
            far = argbest(near, ids, largest=True)
            if near[far] > r:
                q = ids[far]
                pair = self._merge_pair(r)
                if pair is None:
                    raise IllegalState("no center pair within radius after the increasing operation")
                s, i = pair
                self._merge(s, i)
                self._install(i, q, R)
                self.last_cases.append("C3b-after-C4")
                if q != p:
                    self._join_nearest(p)
            else:
                self._join_nearest(p)
                self.last_cases.append("C4")
        self.decreasing_op()

    def _case_c3a(self, p, slots, centers, d, i, r) -> None:
        best = d.min()
        zombies = [centers[c] for c in np.flatnonzero(d == best) if self.states[slots[c]] is Z]
        if not zombies:
            raise IllegalState(f"nearest center to {p!r} is not a zombie")
        cz = min(zombies)
        z = self._slot_of[cz]
        members = sorted(self.clusters[z]) + [p]
        dz = self.inst.distances(members, [cz])[:, 0]
        self.centers[z] = None
        self.centers[i] = cz
        self.states[i] = R
        for q, x in zip(members, dz):
            if x <= r:
                self._move(q, i)
            elif q == p:
                self._move(q, z)
        self.last_cases.append("C3a")
        self.last_cases.append(self._replace(z, r, zombie_only=True))

    def _merge_pair(self, r: float):
        """``(s, i)``: ``s`` the lowest slot with another center within ``r``,
        ``c_i`` its partner with the smallest id."""
        slots, centers = self._live()
        if len(centers) < 2:
            return None
        D = self.inst.distances(centers, centers)
        np.fill_diagonal(D, INF)
        close = D <= r
        rows = np.flatnonzero(close.any(axis=1))
        if rows.size == 0:
            return None
        a = int(rows[0])
        partner = min(centers[b] for b in np.flatnonzero(close[a]))
        return slots[a], self._slot_of[partner]

    def _merge(self, s: int, i: int) -> None:
        for q in list(self.clusters[i]):
            self._move(q, s)
        self.centers[i] = None
        self.states[s] = E

    def _join_nearest(self, p: PointId) -> None:
        slots, centers = self._live()
        d = self.inst.distances([p], centers)[0]
        self._move(p, slots[argbest(d, centers, largest=False)])

    def _delete(self, p: PointId) -> None:
        j = self._slot_of[p]
        if self.centers[j] != p:
            self._detach(p)
            self.inst.remove(p)
            self.last_cases.append("non-center")
            self.decreasing_op()
            return
        self._detach(p)
        self.inst.remove(p)
        self.centers[j] = None
        self.states[j] = Z
        self.decreasing_op()
        self.last_cases.append(self._replace(j, self.r(), zombie_only=True))
        self.decreasing_op()

    # --- operations ------------------------------------------------------
    def increasing_op(self) -> int:
        self._regularize_all()
        centers = self._live()[1]
        sep = min_pairwise(self.inst, centers) if len(centers) > 1 else INF
        cost = self.cost()
        while sep > self.r() and cost > self.r():
            self.delta += 1
        return self.delta

    def decreasing_op(self) -> int:
        table = self._table()
        cost = self._cost_of(table[3])
        if cost <= self.r():
            self._regularize_all()
            if cost > 0:
                while cost <= self.r(self.delta - 1):
                    self.delta -= 1
        self._cleanup(table, self.r(), _NON_ZOMBIE)
        return self.delta

    def reassigning_op(self, seed) -> None:
        self._reassign(sorted(seed), self.r())

    def find_sequence(self, n: int):
        seq = self._find_sequence(n, self.r(), zombie_only=True)
        return None if seq is None else interleave_sequence(*seq, self.centers)

    def replace(self, n: int) -> str:
        return self._replace(n, self.r(), zombie_only=True)


# functional surface ---------------------------------------------------------


def fully_preprocess(inst: MetricInstance, k: int) -> FullyDynamicKCenter:
    return FullyDynamicKCenter(inst, k)


def fully_insert(state: FullyDynamicKCenter, p: PointId, coords=None) -> RecourseDelta:
    return state.insert(p, coords)


def fully_delete(state: FullyDynamicKCenter, p: PointId) -> RecourseDelta:
    return state.delete(p)


def replace(state: FullyDynamicKCenter, n: int) -> RecourseDelta:
    before = state.center_set()
    state.replace(n)
    return set_change(before, state.center_set())


def find_sequence(state: FullyDynamicKCenter, n: int):
    return state.find_sequence(n)


def increasing_op(state: FullyDynamicKCenter) -> int:
    return state.increasing_op()


def decreasing_op(state: FullyDynamicKCenter) -> int:
    return state.decreasing_op()


def reassigning_op(state: FullyDynamicKCenter, seed) -> None:
    state.reassigning_op(seed)
