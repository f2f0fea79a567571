"""Per-update invariant checks for the three engines.

:func:`check` is a pure function of two consecutive snapshots (plus optional
instrumentation) and never touches the engine.  :class:`Verifier` threads the
previous snapshot and the instrumentation through a run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .engine import INF, ClusterState, EngineSnapshot, recourse
from .errors import IllegalState
from .static import brute_force_opt, hochbaum_shmoys

R, E, Z = ClusterState.REGULAR, ClusterState.EXTENDED, ClusterState.ZOMBIE

ORACLE_MODES = ("none", "hs", "brute")
BRUTE_AUTO_LIMIT = 16

APPROX = {"fully": 50.0, "decremental": 6.0, "incremental": 6.0}
RADIUS_VS_OPT = {"fully": 10.0, "decremental": 2.0, "incremental": 4.0}
COVER_FACTOR = {"fully": 5.0, "decremental": 3.0, "incremental": 2.0}

CHECK_NAMES = (
    "size_k",
    "recourse_le_1",
    "partition",
    "invariant2",
    "invariant3",
    "zombie_separation",
    "zombie_monotone",
    "state_radii",
    "recent_center",
    "s_init_coverage",
    "exempted_proximity",
    "level_monotone",
    "ratio_vs_oracle",
    "radius_vs_oracle",
    "ratio_vs_hs",
)


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skipped"


@dataclass(frozen=True)
class CheckResult:
    verdict: Verdict
    witness: dict | None = None
    note: str = ""


_PASS = CheckResult(Verdict.PASS)


def _skip(note: str) -> CheckResult:
    return CheckResult(Verdict.SKIP, note=note)


def _fail(note: str, **witness) -> CheckResult:
    return CheckResult(Verdict.FAIL, witness, note)


@dataclass
class InvariantReport:
    algorithm: str
    step: int
    results: dict[str, CheckResult]
    cost: float
    rstar: float | None = None
    ratio: float | None = None

    @property
    def ok(self) -> bool:
        return all(r.verdict is not Verdict.FAIL for r in self.results.values())

    def failed(self) -> list[str]:
        return [n for n, r in self.results.items() if r.verdict is Verdict.FAIL]

    def verdict(self, name: str) -> Verdict:
        return self.results[name].verdict

    def render(self) -> str:
        lines = []
        for name in self.failed():
            res = self.results[name]
            lines.append(f"step {self.step} [{self.algorithm}] {name} FAILED: {res.note} witness={res.witness}")
        return "\n".join(lines)


@dataclass
class Instrumentation:
    """Analysis-only history the invariants refer to.

    ``recent`` maps a slot to the location of its most recent non-zombie
    (fully) or regular (decremental) center; locations survive deletion of the
    point.  ``s_init`` is the incremental engine's center list as of the last
    reordering (or preprocessing).
    """

    recent: dict[int, Hashable] = field(default_factory=dict)
    s_init: tuple | None = None

    def update(self, snap: EngineSnapshot, prev: EngineSnapshot | None) -> None:
        if snap.degenerate:
            self.recent.clear()
            self.s_init = None
            return
        if snap.algorithm == "incremental":
            if prev is None or prev.degenerate or self.s_init is None:
                self.s_init = snap.centers
            elif snap.level > prev.level:
                gone = set(prev.centers) - set(snap.centers)
                new = set(snap.centers) - set(prev.centers)
                if gone:
                    (old,), (added,) = gone, new
                    self.s_init = tuple(old if c == added else c for c in snap.centers)
                else:
                    self.s_init = snap.centers
            return
        tracked = {R, E} if snap.algorithm == "fully" else {R}
        for j, (c, st) in enumerate(zip(snap.centers, snap.states)):
            if c is not None and st in tracked:
                self.recent[j] = snap.inst.location(c)


def _ids_array(snap):
    return snap.inst.ids()


def _check_size(snap) -> CheckResult:
    if snap.degenerate:
        return _skip("degenerate")
    live = [c for c in snap.centers if c is not None]
    if len(snap.centers) != snap.k or len(live) != snap.k or len(set(live)) != snap.k:
        return _fail("center list is not k distinct points", centers=snap.centers, k=snap.k)
    missing = [c for c in live if c not in snap.inst]
    if missing:
        return _fail("center not in point set", centers=missing)
    return _PASS


def _check_recourse(snap, prev) -> CheckResult:
    if prev is None:
        return _skip("no previous snapshot")
    rc = recourse(prev.centers, snap.centers)
    if rc > 1:
        return _fail(
            f"recourse {rc}",
            removed=sorted(set(prev.centers) - set(snap.centers), key=repr),
            added=sorted(set(snap.centers) - set(prev.centers), key=repr),
        )
    return _PASS


def _check_partition(snap) -> CheckResult:
    if snap.clusters is None:
        return _skip("engine keeps no clusters")
    seen: dict = {}
    for j, C in enumerate(snap.clusters):
        for q in C:
            if q in seen:
                return _fail("point in two clusters", point=q, slots=(seen[q], j))
            seen[q] = j
    present = set(snap.inst.ids())
    extra = set(seen) - present
    if extra:
        return _fail("cluster holds absent point", point=min(extra, key=repr))
    lost = present - set(seen)
    if lost:
        return _fail("point in no cluster", point=min(lost, key=repr))
    for j, c in enumerate(snap.centers):
        if c is not None and seen.get(c) != j:
            return _fail("center outside its own cluster", slot=j, center=c)
    return _PASS


def _check_invariant2(snap, D_S, near) -> CheckResult:
    if snap.degenerate:
        return _skip("degenerate")
    r = snap.independence_radius
    strict = snap.algorithm != "decremental"
    sep = (lambda x: x > r) if strict else (lambda x: x >= r)
    S = list(snap.centers)
    if len(S) > 1:
        M = D_S.copy()
        np.fill_diagonal(M, INF)
        a, b = np.unravel_index(int(np.argmin(M)), M.shape)
        if not sep(M[a, b]):
            return _fail("centers not independent", pair=(S[a], S[b]), distance=float(M[a, b]), radius=r)
    ids = _ids_array(snap)
    center_set = set(S)
    best = None
    for q, d in zip(ids, near):
        if q in center_set:
            continue
        if sep(d):
            return CheckResult(Verdict.PASS, {"p_S": q, "distance": float(d)})
        if best is None or d > best[1]:
            best = (q, d)
    if best is None:
        return _fail("no point outside S", radius=r)
    q = best[0]
    c = S[int(np.argmin(snap.inst.distances([q], S)[0]))]
    return _fail("no certificate point", pair=(q, c), distance=float(best[1]), radius=r)


def _check_invariant3(snap, near, cost) -> CheckResult:
    if snap.degenerate:
        return _skip("degenerate")
    bound = COVER_FACTOR[snap.algorithm] * snap.radius
    if cost > bound:
        i = int(np.argmax(near))
        return _fail("cost exceeds bound", point=_ids_array(snap)[i], distance=cost, bound=bound)
    return _PASS


def _own_distances(snap):
    """Per slot: (members sorted, distances to own center)."""
    out = []
    for j, C in enumerate(snap.clusters):
        mem = sorted(C)
        c = snap.centers[j]
        d = snap.inst.distances(mem, [c])[:, 0] if (mem and c is not None) else np.full(len(mem), INF)
        out.append((mem, d))
    return out


def _check_zombie_separation(snap, D_S) -> CheckResult:
    if snap.algorithm != "fully":
        return _skip("n/a")
    if snap.degenerate:
        return _skip("degenerate")
    r = snap.radius
    for j, st in enumerate(snap.states):
        if st is not Z:
            continue
        for b in range(len(snap.centers)):
            if b != j and D_S[j, b] <= r:
                return _fail(
                    "zombie center too close",
                    pair=(snap.centers[j], snap.centers[b]),
                    distance=float(D_S[j, b]),
                    radius=r,
                )
    return _PASS


def _check_zombie_monotone(snap, prev) -> CheckResult:
    if snap.algorithm != "fully":
        return _skip("n/a")
    if snap.degenerate or prev is None or prev.degenerate:
        return _skip("no comparable previous state")
    for j, st in enumerate(snap.states):
        if st is not Z:
            continue
        gained = set(snap.clusters[j]) - set(prev.clusters[j]) - {snap.centers[j]}
        if gained:
            return _fail("zombie cluster gained points", slot=j, points=sorted(gained, key=repr))
    return _PASS


def _check_state_radii(snap, own) -> CheckResult:
    if snap.clusters is None:
        return _skip("engine keeps no clusters")
    if snap.degenerate:
        return _skip("degenerate")
    r = snap.radius
    if snap.algorithm == "fully":
        limits = {R: r, E: 2 * r, Z: 5 * r}
    else:
        limits = {R: r, Z: 3 * r}
    for j, (mem, d) in enumerate(own):
        lim = limits[snap.states[j]]
        if d.size and d.max() > lim:
            i = int(np.argmax(d))
            return _fail(
                f"{snap.states[j].value} cluster too wide",
                slot=j,
                point=mem[i],
                center=snap.centers[j],
                distance=float(d[i]),
                bound=lim,
            )
    return _PASS


def _check_recent_center(snap, instr) -> CheckResult:
    if snap.clusters is None:
        return _skip("engine keeps no clusters")
    if snap.degenerate or instr is None:
        return _skip("no instrumentation")
    lim = (2.0 if snap.algorithm == "fully" else 1.0) * snap.radius
    center_set = set(snap.centers)
    for j, C in enumerate(snap.clusters):
        mem = sorted(q for q in C if q not in center_set)
        if not mem:
            continue
        if j not in instr.recent:
            return _fail("slot has no recorded center", slot=j)
        d = snap.inst.location_distances([instr.recent[j]], mem)[0]
        if d.max() > lim:
            i = int(np.argmax(d))
            return _fail(
                "point far from most recent center",
                slot=j,
                point=mem[i],
                recorded=instr.recent[j],
                distance=float(d[i]),
                bound=lim,
            )
    return _PASS


def _check_s_init(snap, instr) -> CheckResult:
    if snap.algorithm != "incremental":
        return _skip("n/a")
    if snap.degenerate or instr is None or instr.s_init is None:
        return _skip("no instrumentation")
    U = list(dict.fromkeys(list(instr.s_init) + list(snap.centers)))
    d = snap.inst.distances_to(U).min(axis=1)
    if d.max() > snap.radius:
        i = int(np.argmax(d))
        return _fail("point far from S_init and S", point=_ids_array(snap)[i], distance=float(d[i]), bound=snap.radius)
    return _PASS


def _check_exempted(snap, instr, rstar) -> CheckResult:
    if snap.algorithm != "incremental":
        return _skip("n/a")
    if snap.degenerate or instr is None or instr.s_init is None:
        return _skip("no instrumentation")
    gone = [c for c in instr.s_init if c not in set(snap.centers)]
    if not gone:
        return _PASS
    d = snap.inst.distances(gone, list(snap.centers)).min(axis=1)
    bound = snap.radius if rstar is None else min(snap.radius, 2 * rstar)
    if d.max() > bound:
        i = int(np.argmax(d))
        return _fail("exempted center far from S", point=gone[i], distance=float(d[i]), bound=bound)
    return _PASS


def _check_level(snap, prev) -> CheckResult:
    if snap.degenerate or prev is None or prev.degenerate:
        return _skip("no comparable previous state")
    if snap.algorithm == "decremental" and snap.radius > prev.radius:
        return _fail("r_hat increased", before=prev.radius, after=snap.radius)
    if snap.algorithm == "incremental" and snap.level < prev.level:
        return _fail("level decreased", before=prev.level, after=snap.level)
    return _PASS


def _oracle(snap, mode, brute_limit):
    """(R* or None, hs radius or None)."""
    if mode == "none" or len(snap.inst) == 0:
        return None, None
    if mode == "brute" and len(snap.inst) <= brute_limit:
        return brute_force_opt(snap.inst, snap.k, limit=brute_limit).radius, None
    return None, hochbaum_shmoys(snap.inst, snap.k).radius


def check(
    snap: EngineSnapshot,
    prev: EngineSnapshot | None = None,
    oracle: str = "none",
    instrumentation: Instrumentation | None = None,
    brute_limit: int = BRUTE_AUTO_LIMIT,
) -> InvariantReport:
    """Evaluate every applicable check on ``snap``.

    Parameters
    ----------
    snap, prev : EngineSnapshot
        Current and previous snapshot of the same engine.
    oracle : {"none", "hs", "brute"}
        ``brute`` compares against the exact optimum when ``|P|`` is at most
        ``brute_limit`` and falls back to ``hs`` otherwise.
    instrumentation : Instrumentation, optional
        Must already reflect ``snap`` (see :meth:`Verifier.observe`).
    """
    if oracle not in ORACLE_MODES:
        raise ValueError(f"unknown oracle mode {oracle!r}")
    if prev is not None and (
        prev.engine_id != snap.engine_id or prev.algorithm != snap.algorithm or prev.step != snap.step - 1
    ):
        raise IllegalState(f"snapshot mismatch: {prev.algorithm}#{prev.engine_id}@{prev.step} then {snap.algorithm}#{snap.engine_id}@{snap.step}")
    live = [c for c in snap.centers if c is not None]
    D_S = snap.inst.distances(live, live) if live else np.zeros((0, 0))
    if len(snap.inst) and live:
        near = snap.inst.distances_to(live).min(axis=1)
        cost = float(near.max())
    else:
        near = np.zeros(0)
        cost = 0.0 if len(snap.inst) == 0 else INF

    res: dict[str, CheckResult] = {}
    res["size_k"] = _check_size(snap)
    res["recourse_le_1"] = _check_recourse(snap, prev)
    res["partition"] = _check_partition(snap)
    sized = res["size_k"].verdict is Verdict.PASS
    if sized:
        res["invariant2"] = _check_invariant2(snap, D_S, near)
        res["invariant3"] = _check_invariant3(snap, near, cost)
        res["zombie_separation"] = _check_zombie_separation(snap, D_S)
    else:
        for name in ("invariant2", "invariant3", "zombie_separation"):
            res[name] = _skip("size check did not pass")
    clustered = snap.clusters is not None and res["partition"].verdict is Verdict.PASS and sized
    res["zombie_monotone"] = _check_zombie_monotone(snap, prev) if clustered else _skip("n/a")
    res["state_radii"] = _check_state_radii(snap, _own_distances(snap)) if clustered else _skip("n/a")
    res["recent_center"] = _check_recent_center(snap, instrumentation) if clustered else _skip("n/a")
    res["s_init_coverage"] = _check_s_init(snap, instrumentation) if sized else _skip("n/a")

    rstar, hs = _oracle(snap, oracle, brute_limit)
    res["exempted_proximity"] = _check_exempted(snap, instrumentation, rstar) if sized else _skip("n/a")
    res["level_monotone"] = _check_level(snap, prev)

    bound = APPROX[snap.algorithm]
    ratio = None
    if rstar is not None:
        ratio = cost / rstar if rstar > 0 else (1.0 if cost == 0 else INF)
        if cost > bound * rstar:
            res["ratio_vs_oracle"] = _fail("cost above bound times optimum", cost=cost, rstar=rstar, bound=bound)
        elif snap.algorithm == "incremental" and not snap.degenerate and cost > 2 * rstar + snap.radius:
            res["ratio_vs_oracle"] = _fail("cost above 2R* + r", cost=cost, rstar=rstar, radius=snap.radius)
        else:
            res["ratio_vs_oracle"] = _PASS
        if snap.degenerate:
            res["radius_vs_oracle"] = _skip("degenerate")
        elif snap.radius > RADIUS_VS_OPT[snap.algorithm] * rstar:
            res["radius_vs_oracle"] = _fail(
                "radius above bound times optimum", radius=snap.radius, rstar=rstar, factor=RADIUS_VS_OPT[snap.algorithm]
            )
        else:
            res["radius_vs_oracle"] = _PASS
    else:
        res["ratio_vs_oracle"] = _skip("no exact oracle")
        res["radius_vs_oracle"] = _skip("no exact oracle")

    if hs is not None:
        # hs/2 <= R* <= hs, so cost/(hs/2) bounds the true ratio from above
        lower = hs / 2
        rstar = lower
        ratio = cost / lower if lower > 0 else (1.0 if cost == 0 else INF)
        if ratio <= bound:
            res["ratio_vs_hs"] = _PASS
        elif cost > bound * hs:
            res["ratio_vs_hs"] = _fail("cost above bound times the static radius", cost=cost, hs_radius=hs, bound=bound)
        else:
            res["ratio_vs_hs"] = _skip("inconclusive: ratio bound exceeds the target but R* may be larger")
    else:
        res["ratio_vs_hs"] = _skip("no static oracle")

    return InvariantReport(snap.algorithm, snap.step, res, cost, rstar, ratio)


class Verifier:
    """Runs :func:`check` on each new snapshot of one engine."""

    def __init__(self, oracle: str = "none", brute_limit: int = BRUTE_AUTO_LIMIT):
        if oracle not in ORACLE_MODES:
            raise ValueError(f"unknown oracle mode {oracle!r}")
        self.oracle = oracle
        self.brute_limit = brute_limit
        self.reset()

    def reset(self) -> None:
        self.prev: EngineSnapshot | None = None
        self.instrumentation = Instrumentation()

    def observe(self, snap: EngineSnapshot) -> InvariantReport:
        self.instrumentation.update(snap, self.prev)
        report = check(snap, self.prev, self.oracle, self.instrumentation, self.brute_limit)
        self.prev = snap
        return report
