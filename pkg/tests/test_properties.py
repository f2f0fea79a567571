"""Property-based tests: random small streams, every step checked against the exact oracle."""

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from kcc.decremental import DecrementalKCenter
from kcc.fully import FullyDynamicKCenter
from kcc.incremental import IncrementalKCenter
from kcc.metric import EuclideanInstance, MatrixInstance, solution_cost
from kcc.static import brute_force_opt, hochbaum_shmoys
from kcc.verifier import Verifier

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

coord = st.integers(0, 6).map(float)
points_1d = st.lists(coord, min_size=1, max_size=10, unique=True)
points_2d = st.lists(st.tuples(coord, coord), min_size=1, max_size=10, unique=True)


@st.composite
def fully_stream(draw):
    """A pool of locations and a list of pool indices; each index toggles that point."""
    pool = draw(points_2d)
    k = draw(st.integers(1, 4))
    ops = draw(st.lists(st.integers(0, len(pool) - 1), max_size=30))
    return pool, k, ops


def _assert_ok(v, eng):
    rep = v.observe(eng.snapshot())
    assert rep.ok, rep.render()
    return rep


@SETTINGS
@given(fully_stream())
def test_fully_dynamic_stream(case):
    pool, k, ops = case
    eng = FullyDynamicKCenter(EuclideanInstance(2), k)
    v = Verifier("brute")
    _assert_ok(v, eng)
    for i in ops:
        d = eng.delete(i) if i in eng.inst else eng.insert(i, pool[i])
        assert d.recourse <= 1
        _assert_ok(v, eng)


@SETTINGS
@given(points_1d, st.integers(1, 4), st.randoms(use_true_random=False))
def test_decremental_stream(pts, k, rnd):
    inst = EuclideanInstance(1, {i: [x] for i, x in enumerate(pts)})
    eng = DecrementalKCenter(inst, k)
    v = Verifier("brute")
    _assert_ok(v, eng)
    order = list(range(len(pts)))
    rnd.shuffle(order)
    for i in order:
        assert eng.delete(i).recourse <= 1
        _assert_ok(v, eng)


@SETTINGS
@given(points_2d, st.integers(1, 4))
def test_incremental_stream(pts, k):
    eng = IncrementalKCenter(EuclideanInstance(2), k)
    v = Verifier("brute")
    for i, c in enumerate(pts):
        assert eng.insert(i, c).recourse <= 1
        _assert_ok(v, eng)


@SETTINGS
@given(st.integers(2, 9), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_matrix_metric_stream(n, k, seed):
    rng = np.random.default_rng(seed)
    M = np.triu(rng.uniform(1, 2, (n, n)), 1)
    M = M + M.T
    inst = MatrixInstance(M)
    eng = FullyDynamicKCenter(inst, k)
    v = Verifier("brute")
    for i in rng.permutation(n):
        eng.insert(int(i))
        _assert_ok(v, eng)
    for i in rng.permutation(n)[: n // 2]:
        eng.delete(int(i))
        _assert_ok(v, eng)


@SETTINGS
@given(points_2d, st.integers(1, 4))
def test_hochbaum_shmoys_two_approx(pts, k):
    inst = EuclideanInstance(2, dict(enumerate(pts)))
    sol = hochbaum_shmoys(inst, k)
    assert len(sol.centers) <= k
    assert solution_cost(inst, sol.centers) == sol.radius
    assert sol.radius <= 2 * brute_force_opt(inst, k).radius
