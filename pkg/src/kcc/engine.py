"""Machinery shared by the three consistent k-center engines.

An engine owns a :class:`~kcc.metric.MetricInstance` and an ordered list of
center slots.  The clustered engines (fully dynamic, decremental) also keep a
cluster per slot and a state tag per slot.  Everything that two engines do the
same way lives here: cluster moves, the alternating-path search used when a
center is lost, the queue-driven reassignment, center replacement, and the
``|P| <= k`` degenerate mode.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import IdAlreadyPresent, IdNotPresent, IllegalState, MetricError
from .metric import MetricInstance, PointId
from .static import hochbaum_shmoys

INF = float("inf")
_engine_ids = itertools.count(1)


class ClusterState(enum.Enum):
    REGULAR = "regular"
    EXTENDED = "extended"
    ZOMBIE = "zombie"


@dataclass(frozen=True)
class RecourseDelta:
    """Change of the center *set* caused by one update (slot order ignored)."""

    removed: PointId | None = None
    added: PointId | None = None

    @property
    def recourse(self) -> int:
        return int(self.removed is not None or self.added is not None)


def recourse(prev: Sequence[PointId] | set, nxt: Sequence[PointId] | set) -> int:
    """Half the symmetric difference of two center sets, rounded up."""
    return math.ceil(len(set(prev) ^ set(nxt)) / 2)


def set_change(prev, nxt) -> RecourseDelta:
    gone = set(prev) - set(nxt)
    new = set(nxt) - set(prev)
    if len(gone) > 1 or len(new) > 1:
        raise IllegalState(f"center set changed by more than one point: -{gone} +{new}")
    return RecourseDelta(next(iter(gone), None), next(iter(new), None))


@dataclass(frozen=True)
class EngineSnapshot:
    """Read-only view of an engine after an update completed.

    ``radius`` is the covering scale (``r^(delta)`` or ``r_hat``);
    ``independence_radius`` is the scale of the independence certificate
    (``r^(delta-1)``, or ``r_hat`` for the decremental engine).
    """

    algorithm: str
    engine_id: int
    step: int
    k: int
    degenerate: bool
    centers: tuple
    states: tuple | None
    clusters: tuple | None
    level: int | None
    radius: float | None
    independence_radius: float | None
    n_points: int
    inst: MetricInstance = field(compare=False, repr=False)

    def center_set(self) -> frozenset:
        return frozenset(self.centers)

    def census(self) -> dict[ClusterState, int]:
        out = {s: 0 for s in ClusterState}
        for s in self.states or ():
            out[s] += 1
        return out


def interleave_sequence(points, slots, centers) -> list:
    """``[p_t1, c_t2, p_t2, ..., c_tl, p_tl]`` from a path found by the
    sequence search; ``centers`` is the slot list before any shift."""
    out = [points[0]]
    for p, t in zip(points[1:], slots[1:]):
        out += [centers[t], p]
    return out


def argbest(values: np.ndarray, ids: Sequence[Hashable], largest: bool) -> int:
    """Index of the extreme value; ties go to the smallest id."""
    target = values.max() if largest else values.min()
    tied = np.flatnonzero(values == target)
    if tied.size == 1:
        return int(tied[0])
    return int(min(tied, key=lambda i: ids[i]))


def grow_to_k(inst: MetricInstance, k: int, factor: float) -> tuple[list, float]:
    """Static seed, padded to ``k`` centers, radius shrunk by ``factor`` while
    the centers still cover everything at the smaller radius."""
    hs = hochbaum_shmoys(inst, k)
    S, r = list(hs.centers), hs.radius
    if r <= 0:
        return S, r
    ids = inst.sorted_ids()
    while len(S) < k:
        d = inst.distances(ids, S).min(axis=1)
        hit = np.flatnonzero(d > r / factor)
        if hit.size:
            S.append(ids[int(hit[0])])
        else:
            r /= factor
    cost = float(inst.distances_to(S).min(axis=1).max())
    while cost <= r / factor:
        r /= factor
    return S, r


class Engine:
    """Common surface: ``insert``, ``delete``, ``snapshot``."""

    algorithm = "base"

    def __init__(self, inst: MetricInstance, k: int):
        if k < 1:
            raise ValueError("k must be a positive integer")
        self.inst = inst
        self.k = k
        self.centers: list[PointId | None] = []
        self.degenerate = True
        self.step = 0
        self.engine_id = next(_engine_ids)
        self.last_cases: list[str] = []

    def center_set(self) -> frozenset:
        return frozenset(c for c in self.centers if c is not None)

    def _check_new(self, pid: PointId) -> None:
        if pid in self.inst:
            raise IdAlreadyPresent(pid)

    def _check_present(self, pid: PointId) -> None:
        if pid not in self.inst:
            raise IdNotPresent(pid)

    # subclasses fill these in
    def radius(self) -> float | None:
        raise NotImplementedError

    def independence_radius(self) -> float | None:
        raise NotImplementedError

    def level_value(self) -> int | None:
        return None

    def snapshot(self) -> EngineSnapshot:
        return EngineSnapshot(
            algorithm=self.algorithm,
            engine_id=self.engine_id,
            step=self.step,
            k=self.k,
            degenerate=self.degenerate,
            centers=tuple(self.centers),
            states=self._states_view(),
            clusters=self._clusters_view(),
            level=None if self.degenerate else self.level_value(),
            radius=None if self.degenerate else self.radius(),
            independence_radius=None if self.degenerate else self.independence_radius(),
            n_points=len(self.inst),
            inst=self.inst,
        )

    def _states_view(self):
        return None

    def _clusters_view(self):
        return None

    def _require_distinct(self, r: float) -> None:
        if r <= 0:
            raise MetricError(
                f"{self.algorithm} engine needs at least k+1={self.k + 1} distinct locations to leave degenerate mode"
            )


class ClusteredEngine(Engine):
    """Slots with clusters and state tags."""

    def __init__(self, inst: MetricInstance, k: int):
        super().__init__(inst, k)
        self.states: list[ClusterState] = []
        self.clusters: list[set] = []
        self._slot_of: dict[PointId, int] = {}

    def _states_view(self):
        return tuple(self.states)

    def _clusters_view(self):
        return tuple(frozenset(c) for c in self.clusters)

    # --- bookkeeping ------------------------------------------------------
    def slot_of(self, pid: PointId) -> int:
        return self._slot_of[pid]

    def _live(self) -> tuple[list[int], list[PointId]]:
        slots = [j for j, c in enumerate(self.centers) if c is not None]
        return slots, [self.centers[j] for j in slots]

    def _move(self, q: PointId, j: int) -> None:
        old = self._slot_of.get(q)
        if old is not None:
            self.clusters[old].discard(q)
        self.clusters[j].add(q)
        self._slot_of[q] = j

    def _detach(self, q: PointId) -> int:
        j = self._slot_of.pop(q)
        self.clusters[j].discard(q)
        return j

    def _install(self, j: int, c: PointId, state: ClusterState) -> None:
        self.centers[j] = c
        self.states[j] = state
        if self._slot_of.get(c) != j:
            self._move(c, j)

    def _regularize_all(self) -> None:
        for j, c in enumerate(self.centers):
            if c is not None:
                self.states[j] = ClusterState.REGULAR

    def _table(self):
        """(row ids, live slots, live centers, distance table rows x centers)."""
        slots, centers = self._live()
        return self.inst.ids(), slots, centers, self.inst.distances_to(centers)

    @staticmethod
    def _cost_of(D: np.ndarray) -> float:
        if D.shape[0] == 0:
            return 0.0
        if D.shape[1] == 0:
            return INF
        return float(D.min(axis=1).max())

    def cost(self) -> float:
        return self._cost_of(self._table()[3])

    def _cleanup(self, table, r: float, movable_targets: set[ClusterState]) -> None:
        """Regularize clusters that fit in radius ``r`` around their center, then
        move every point that is farther than ``r`` from its own center into the
        lowest slot whose center (in one of ``movable_targets``) covers it.

        A centerless slot counts as infinitely far from its members.
        """
        ids, slots, centers, D = table
        n = len(ids)
        if n == 0:
            return
        col_of = np.full(len(self.centers), -1, dtype=np.intp)
        col_of[slots] = np.arange(len(slots))
        slot_arr = np.fromiter((self._slot_of[q] for q in ids), dtype=np.intp, count=n)
        cols = col_of[slot_arr]
        own = np.full(n, INF)
        has = cols >= 0
        own[has] = D[np.flatnonzero(has), cols[has]]

        worst = np.full(len(self.centers), -INF)
        np.maximum.at(worst, slot_arr, own)
        for j in slots:
            if worst[j] <= r:
                self.states[j] = ClusterState.REGULAR

        targets = [c for c, j in enumerate(slots) if self.states[j] in movable_targets]
        rows = np.flatnonzero(own > r)
        if rows.size == 0 or not targets:
            return
        ok = D[np.ix_(rows, targets)] <= r
        hit = ok.any(axis=1)
        first = ok.argmax(axis=1)
        for row, h, f in zip(rows, hit, first):
            if h:
                self._move(ids[row], slots[targets[f]])

    # --- center loss: sequence search, reassignment, replacement -----------
    def _find_sequence(self, n: int, r: float, zombie_only: bool):
        """Alternating path from the centerless slot ``n``.

        Graph: point -> center when within ``r`` (zombie centers only if
        ``zombie_only``); center -> member of its own cluster farther than
        ``r``.  DFS in ascending id order from the points of cluster ``n``
        toward any point farther than ``r`` from all centers.

        Returns ``(points, slots)`` with ``points = [p_t1, ..., p_tl]`` and
        ``slots = [n, t2, ..., tl]``, or ``None``.
        """
        start = sorted(self.clusters[n])
        slots, centers = self._live()
        if not start:
            return None
        center_set = set(centers)
        far: dict[int, list] = {}
        for j in slots:
            if zombie_only and self.states[j] is not ClusterState.ZOMBIE:
                continue
            mem = sorted(q for q in self.clusters[j] if q not in center_set)
            if not mem:
                continue
            d = self.inst.distances(mem, [self.centers[j]])[:, 0]
            fj = [q for q, x in zip(mem, d) if x > r]
            if fj:
                far[j] = fj
        targets = sorted(far, key=lambda j: self.centers[j])
        pts = list(start) + [q for j in targets for q in far[j]]
        row = {q: i for i, q in enumerate(pts)}
        to_targets = self.inst.distances(pts, [self.centers[j] for j in targets]) if targets else np.zeros((len(pts), 0))
        if centers:
            sink = self.inst.distances(pts, centers).min(axis=1) > r
        else:
            sink = np.ones(len(pts), dtype=bool)

        def point_nbrs(q):
            hits = np.flatnonzero(to_targets[row[q]] <= r)
            return iter([("s", targets[h]) for h in hits])

        seen_p: set = set()
        seen_s: set = set()
        for s0 in start:
            if s0 in seen_p:
                continue
            seen_p.add(s0)
            if sink[row[s0]]:
                return [s0], [n]
            stack = [(("p", s0), point_nbrs(s0))]
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    stack.pop()
                    continue
                kind, val = nxt
                if kind == "s":
                    if val in seen_s:
                        continue
                    seen_s.add(val)
                    stack.append((nxt, iter([("p", q) for q in far[val]])))
                    continue
                if val in seen_p:
                    continue
                seen_p.add(val)
                if sink[row[val]]:
                    path = [f[0] for f in stack] + [nxt]
                    return [v for kd, v in path if kd == "p"], [n] + [v for kd, v in path if kd == "s"]
                stack.append((nxt, point_nbrs(val)))
        return None

    def _reassign(self, seed: Sequence[PointId], r: float) -> None:
        """FIFO reassignment: each queued point joins the lowest slot whose
        center is within ``r``; that cluster turns regular and its members
        farther than ``r`` from its center join the queue."""
        slots, centers = self._live()
        queue = deque(seed)
        queued = set(seed)
        expanded: set[int] = set()
        while queue:
            q = queue.popleft()
            queued.discard(q)
            d = self.inst.distances([q], centers)[0] if centers else np.zeros(0)
            ok = np.flatnonzero(d <= r)
            if ok.size == 0:
                raise IllegalState(f"reassignment found no center within {r} of point {q!r}")
            j = slots[int(ok[0])]
            self._move(q, j)
            self.states[j] = ClusterState.REGULAR
            if j in expanded:
                continue
            # later arrivals are within r of c_j, so one scan per target suffices
            expanded.add(j)
            mem = sorted(x for x in self.clusters[j] if x not in queued)
            dm = self.inst.distances(mem, [self.centers[j]])[:, 0]
            for x, dx in zip(mem, dm):
                if dx > r:
                    queue.append(x)
                    queued.add(x)

    def _farthest_noncenter(self) -> PointId:
        ids, slots, centers, D = self._table()
        d = D.min(axis=1) if centers else np.full(len(ids), INF)
        center_set = set(centers)
        d = np.where([q in center_set for q in ids], -INF, d)
        return ids[argbest(d, ids, largest=True)]

    def _replace(self, n: int, r: float, zombie_only: bool) -> str:
        """Give the centerless slot ``n`` a new center: C1, C2a or C2b."""
        if self.centers[n] is not None:
            raise IllegalState(f"slot {n} still has center {self.centers[n]!r}")
        slots, centers = self._live()
        C = sorted(self.clusters[n])
        if C and centers:
            d = self.inst.distances(C, centers).min(axis=1)
            far = [q for q, x in zip(C, d) if x > r]
        else:
            far = list(C)
        if far:
            self._install(n, far[0], ClusterState.ZOMBIE)
            return "C1"
        seq = self._find_sequence(n, r, zombie_only)
        if seq is not None:
            points, path_slots = seq
            moving = [self.centers[t] for t in path_slots]
            for j in range(len(path_slots) - 1):
                self._install(path_slots[j], moving[j + 1], ClusterState.ZOMBIE)
            self._install(path_slots[-1], points[-1], ClusterState.ZOMBIE)
            return "C2a"
        self._reassign(C, r)
        if self.clusters[n]:
            raise IllegalState(f"slot {n} kept points after reassignment")
        self._install(n, self._farthest_noncenter(), ClusterState.REGULAR)
        return "C2b"

    # --- degenerate mode -------------------------------------------------
    def _enter_degenerate(self) -> None:
        """``S := P``; surviving centers keep their relative order."""
        keep = [c for c in self.centers if c is not None and c in self.inst]
        kept = set(keep)
        order = keep + sorted(q for q in self.inst.ids() if q not in kept)
        self.centers = list(order)
        self.states = [ClusterState.REGULAR] * len(order)
        self.clusters = [{c} for c in order]
        self._slot_of = {c: j for j, c in enumerate(order)}
        self.degenerate = True

    def _assign_fresh(self, S: list, r: float) -> None:
        """Install ``S`` as regular slots; each point joins the lowest slot
        within ``r``."""
        ids = self.inst.ids()
        D = self.inst.distances_to(S)
        ok = D <= r
        if not ok.any(axis=1).all():
            raise IllegalState("fresh centers do not cover every point")
        first = ok.argmax(axis=1)
        self.centers = list(S)
        self.states = [ClusterState.REGULAR] * len(S)
        self.clusters = [set() for _ in S]
        self._slot_of = {}
        for q, j in zip(ids, first):
            self._move(q, int(j))
        for j, c in enumerate(S):
            self._move(c, j)
        self.degenerate = False
