import numpy as np
import pytest

from conftest import line
from kcc.errors import IdAlreadyPresent, UnsupportedOperation
from kcc.incremental import IncrementalKCenter, doubling_op, gonzalez_op
from kcc.metric import EuclideanInstance, solution_cost


@pytest.fixture
def eng(l6):
    return IncrementalKCenter(l6, 3)


def test_preprocess(eng):
    assert eng.centers == [0, 10, 20]
    assert eng.r() == 1.0 and eng.independence_radius() == 0.5 and eng.delta == 0


def test_preprocess_two_points():
    eng = IncrementalKCenter(line([0, 8]), 1)
    assert eng.base == 8.0 and len(eng.centers) == 1


def test_covered_insert(eng):
    assert eng.insert(10.5, [10.5]).recourse == 0
    assert eng.last_cases == ["covered"]


def test_insert_far_point_doubles(eng):
    d = eng.insert(30, [30])
    assert d.recourse == 0
    assert eng.delta == 4 and eng.r() == 16.0
    assert eng.centers == [0, 20, 10]


def test_c1_swaps_largest_index_of_closest_pair():
    eng = IncrementalKCenter(line([0, 1, 50, 51]), 3)
    eng.centers, eng.base, eng.delta = [0, 1, 50], 2.0, 0
    d = eng.insert(100, [100])
    assert (d.removed, d.added) == (1, 100)
    assert eng.centers == [0, 100, 50]


def test_doubling_op_guards(eng):
    eng.inst.add(30, [30])
    assert doubling_op(eng, 30) == 4
    eng.inst.add(31, [31])
    assert doubling_op(eng, 31) == 4


def test_gonzalez_op_reorders_without_recourse(eng):
    assert gonzalez_op(eng) == [0, 20, 10]
    assert set(eng.centers) == {0, 10, 20}


def test_gonzalez_op_tie_rule():
    eng = IncrementalKCenter(line([5, 0, 10, 11]), 3)
    eng.centers = [5, 0, 10]
    assert gonzalez_op(eng) == [5, 0, 10]


def test_degenerate_and_errors():
    eng = IncrementalKCenter(EuclideanInstance(1), 2)
    assert eng.insert("a", [0]).recourse == 1
    assert eng.degenerate
    with pytest.raises(IdAlreadyPresent):
        eng.insert("a", [0])
    with pytest.raises(UnsupportedOperation):
        eng.delete("a")


def test_level_monotone_and_cover_bound():
    rng = np.random.default_rng(2)
    eng = IncrementalKCenter(EuclideanInstance(3), 5)
    last = None
    for i in range(400):
        d = eng.insert(i, rng.normal(size=3) * (1 + i / 50))
        assert d.recourse <= 1
        if not eng.degenerate:
            if last is not None:
                assert eng.delta >= last
            last = eng.delta
            assert solution_cost(eng.inst, eng.centers) <= 2 * eng.r()
    assert len(eng.assignment()) == 400
