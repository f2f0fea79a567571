from dataclasses import replace

import pytest

from conftest import line
from kcc.decremental import DecrementalKCenter
from kcc.engine import ClusterState
from kcc.errors import IllegalState
from kcc.fully import FullyDynamicKCenter
from kcc.incremental import IncrementalKCenter
from kcc.verifier import CHECK_NAMES, Instrumentation, Verdict, Verifier, check

R, E, Z = ClusterState.REGULAR, ClusterState.EXTENDED, ClusterState.ZOMBIE


@pytest.fixture
def s0(l6):
    return FullyDynamicKCenter(l6, 3).snapshot()


def nxt(snap, **kw):
    return replace(snap, step=snap.step + 1, **kw)


def assert_fails(report, name):
    res = report.results[name]
    assert res.verdict is Verdict.FAIL, report.results
    assert res.witness, f"{name} failed without a witness"
    assert name in report.render()


def test_clean_snapshot_passes_everything(s0):
    rep = check(s0, oracle="brute")
    assert rep.ok and set(rep.results) == set(CHECK_NAMES)
    assert rep.rstar == 1.0 and rep.ratio == 1.0


def test_size_k(s0):
    assert_fails(check(replace(s0, centers=(0, 10, 10))), "size_k")


def test_recourse(s0):
    rep = check(nxt(s0, centers=(1, 11, 20)), s0)
    assert_fails(rep, "recourse_le_1")
    assert rep.results["recourse_le_1"].witness["removed"] == [0, 10]


def test_partition(s0):
    rep = check(replace(s0, clusters=(frozenset({0}), frozenset({10, 11}), frozenset({20, 21}))))
    assert_fails(rep, "partition")
    assert rep.results["partition"].witness == {"point": 1}
    rep = check(replace(s0, clusters=(frozenset({0, 1}), frozenset({1, 10, 11}), frozenset({20, 21}))))
    assert_fails(rep, "partition")


def test_invariant2_independence(s0):
    rep = check(replace(s0, independence_radius=10.0))
    assert_fails(rep, "invariant2")
    assert rep.results["invariant2"].witness["pair"] == (0, 10)


def test_invariant2_certificate(s0):
    rep = check(replace(s0, independence_radius=1.5))
    assert_fails(rep, "invariant2")
    assert rep.results["invariant2"].note == "no certificate point"


def test_invariant3(s0):
    assert_fails(check(replace(s0, radius=0.1, independence_radius=0.02)), "invariant3")


def test_zombie_separation(s0):
    rep = check(replace(s0, states=(Z, R, R), radius=10.0, independence_radius=2.0))
    assert_fails(rep, "zombie_separation")
    assert rep.results["zombie_separation"].witness["pair"] == (0, 10)


def test_zombie_monotone(s0):
    prev = replace(s0, states=(Z, R, R))
    clusters = (frozenset({0, 1, 11}), frozenset({10}), frozenset({20, 21}))
    rep = check(nxt(prev, clusters=clusters), prev)
    assert_fails(rep, "zombie_monotone")
    assert rep.results["zombie_monotone"].witness == {"slot": 0, "points": [11]}


def test_state_radii(s0):
    clusters = (frozenset({0, 1, 11}), frozenset({10}), frozenset({20, 21}))
    rep = check(replace(s0, clusters=clusters))
    assert_fails(rep, "state_radii")
    assert rep.results["state_radii"].witness["point"] == 11


def test_recent_center(s0):
    loc = s0.inst.location
    instr = Instrumentation(recent={0: loc(21), 1: loc(10), 2: loc(20)})
    rep = check(s0, instrumentation=instr)
    assert_fails(rep, "recent_center")
    assert rep.results["recent_center"].witness["point"] == 1


def test_s_init_coverage(l6):
    snap = IncrementalKCenter(l6, 3).snapshot()
    instr = Instrumentation(s_init=snap.centers)
    rep = check(replace(snap, radius=0.5, independence_radius=0.25), instrumentation=instr)
    assert_fails(rep, "s_init_coverage")


def test_exempted_proximity(l6):
    snap = IncrementalKCenter(l6, 3).snapshot()
    instr = Instrumentation(s_init=(0, 10, 21))
    assert check(snap, instrumentation=instr).verdict("exempted_proximity") is Verdict.PASS
    rep = check(replace(snap, radius=0.5, independence_radius=0.25), instrumentation=instr)
    assert_fails(rep, "exempted_proximity")
    assert rep.results["exempted_proximity"].witness["point"] == 21


def test_level_monotone(l6):
    dec = DecrementalKCenter(l6, 3).snapshot()
    assert_fails(check(nxt(dec, radius=2.0), dec), "level_monotone")
    inc = IncrementalKCenter(line([0, 1, 10, 11, 20, 21]), 3).snapshot()
    assert_fails(check(nxt(inc, level=-1), inc), "level_monotone")


def test_ratio_and_radius_vs_oracle(s0):
    wide = FullyDynamicKCenter(line([0, 1, 100, 101, 200, 201]), 3).snapshot()
    rep = check(replace(wide, centers=(0, 1, 100)), oracle="brute")
    assert_fails(rep, "ratio_vs_oracle")
    assert rep.ratio == 101.0
    assert_fails(check(replace(s0, radius=11.0), oracle="brute"), "radius_vs_oracle")


def test_ratio_vs_hs_three_way():
    wide = FullyDynamicKCenter(line([0, 1, 100, 101, 200, 201]), 3).snapshot()
    assert_fails(check(replace(wide, centers=(0, 1, 100)), oracle="hs"), "ratio_vs_hs")
    dec = DecrementalKCenter(line([0, 1, 5, 6, 20, 21]), 3).snapshot()
    assert check(dec, oracle="hs").verdict("ratio_vs_hs") is Verdict.PASS
    rep = check(replace(dec, centers=(0, 1, 20)), oracle="hs")
    assert rep.verdict("ratio_vs_hs") is Verdict.SKIP
    assert "inconclusive" in rep.results["ratio_vs_hs"].note


def test_brute_falls_back_to_hs_above_limit():
    eng = FullyDynamicKCenter(line(range(20)), 2)
    rep = check(eng.snapshot(), oracle="brute", brute_limit=10)
    assert rep.verdict("ratio_vs_oracle") is Verdict.SKIP
    assert rep.verdict("ratio_vs_hs") is Verdict.PASS


def test_snapshot_mismatch(s0, l6):
    with pytest.raises(IllegalState):
        check(s0, s0)
    other = FullyDynamicKCenter(line([0, 1, 10, 11, 20, 21]), 3).snapshot()
    with pytest.raises(IllegalState):
        check(nxt(other), s0)
    with pytest.raises(ValueError):
        check(s0, oracle="exact")


def test_check_leaves_engine_untouched(l6):
    eng = FullyDynamicKCenter(l6, 3)
    eng.insert(30, [30])
    before = eng.snapshot()
    state = (list(eng.centers), list(eng.states), [set(c) for c in eng.clusters], eng.delta, sorted(l6.ids()))
    v = Verifier("brute")
    v.observe(before)
    assert eng.snapshot() == before
    assert state == (list(eng.centers), list(eng.states), [set(c) for c in eng.clusters], eng.delta, sorted(l6.ids()))


def test_degenerate_skips():
    snap = FullyDynamicKCenter(line([0, 5]), 3).snapshot()
    rep = check(snap, oracle="brute")
    assert rep.ok
    assert rep.verdict("invariant2") is Verdict.SKIP and rep.verdict("ratio_vs_oracle") is Verdict.PASS


def test_incremental_s_init_tracks_swap_back():
    eng = IncrementalKCenter(line([10, 12, 20, 25, 34]), 3)
    v = Verifier()
    v.observe(eng.snapshot())
    assert v.instrumentation.s_init == (10, 20, 34)
    eng.insert(70, [70])
    assert eng.last_cases == ["C1-after-C2"] and eng.centers == [10, 34, 70]
    rep = v.observe(eng.snapshot())
    assert rep.ok, rep.render()
    assert v.instrumentation.s_init == (10, 34, 20)
