import math

import numpy as np
import pytest

from kcc.errors import EmptySolution, IdAlreadyPresent, IdNotPresent, MetricError, ParseError, TooFewPoints
from kcc.metric import (
    EuclideanInstance,
    MatrixInstance,
    dist_to_set,
    load_matrix,
    min_pairwise,
    solution_cost,
    sorted_distinct_distances,
    validate_metric,
    write_matrix,
)


class TestEuclidean:
    def test_distance_matches_math_dist(self):
        rng = np.random.default_rng(0)
        pts = {i: rng.random(3) for i in range(20)}
        inst = EuclideanInstance(3, pts)
        for a in range(20):
            for b in range(20):
                assert inst.distance(a, b) == pytest.approx(math.dist(pts[a], pts[b]), abs=1e-12)

    def test_batched_and_scalar_distances_agree_bitwise(self):
        rng = np.random.default_rng(1)
        inst = EuclideanInstance(2, {i: rng.random(2) for i in range(15)})
        D = inst.distances_to([3, 7])
        for row, q in enumerate(inst.ids()):
            assert D[row, 0] == inst.distance(q, 3)
            assert D[row, 1] == inst.distance(q, 7)

    def test_swap_remove_keeps_rows_consistent(self):
        inst = EuclideanInstance.line([0, 1, 10, 11, 20, 21])
        inst.remove(1)
        inst.remove(20)
        assert sorted(inst.ids()) == [0, 10, 11, 21]
        D = inst.distances_to([0])[:, 0]
        assert dict(zip(inst.ids(), D)) == {0: 0.0, 10: 10.0, 11: 11.0, 21: 21.0}

    def test_duplicate_and_missing_ids(self, l6):
        with pytest.raises(IdAlreadyPresent):
            l6.add(0, [0])
        with pytest.raises(IdNotPresent):
            l6.remove(99)
        with pytest.raises(IdNotPresent):
            l6.distance(0, 99)

    def test_reinsert_requires_identical_coords(self, l6):
        l6.remove(10)
        with pytest.raises(MetricError):
            l6.add(10, [10.5])
        l6.add(10)
        assert l6.distance(0, 10) == 10.0

    def test_dimension_and_finiteness(self):
        inst = EuclideanInstance(2)
        with pytest.raises(MetricError):
            inst.add("a", [1.0])
        with pytest.raises(MetricError):
            inst.add("a", [1.0, float("nan")])
        with pytest.raises(MetricError):
            inst.add("a")

    def test_id_kinds_must_be_comparable(self, l6):
        l6.add(10.5, [10.5])
        with pytest.raises(MetricError):
            l6.add("p", [3.0])
        assert l6.sorted_ids()[:3] == [0, 1, 10]

    def test_location_survives_deletion(self, l6):
        loc = l6.location(11)
        l6.remove(11)
        assert l6.location_distances([loc], [0, 21])[0].tolist() == [11.0, 10.0]

    def test_evaluation_counter(self, l6):
        before = l6.evaluations
        l6.distances_to([0, 10])
        assert l6.evaluations - before == 12


class TestMatrix:
    M = np.array([[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]], dtype=float)

    def test_presence_toggles(self):
        inst = MatrixInstance(self.M, present=[0, 2])
        assert inst.distance(0, 2) == 2.0
        inst.add(1)
        inst.remove(0)
        assert sorted(inst.ids()) == [1, 2]
        with pytest.raises(IdNotPresent):
            inst.add(3)
        with pytest.raises(MetricError):
            inst.add(0, [1.0])

    @pytest.mark.parametrize(
        "bad",
        [
            np.array([[0, 1], [2, 0]], dtype=float),
            np.array([[0, -1], [-1, 0]], dtype=float),
            np.array([[1, 1], [1, 0]], dtype=float),
            np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float),
            np.zeros((2, 3)),
        ],
    )
    def test_validation_rejects(self, bad):
        with pytest.raises(MetricError):
            validate_metric(bad)

    def test_triangle_witness_in_message(self):
        with pytest.raises(MetricError, match=r"d\(0,2\) > d\(0,1\) \+ d\(1,2\)"):
            validate_metric(np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float))

    def test_file_roundtrip(self, tmp_path):
        p = tmp_path / "m.txt"
        write_matrix(p, self.M)
        inst = load_matrix(p, present=[0, 1, 2])
        assert np.array_equal(inst.matrix, self.M)

    @pytest.mark.parametrize("text", ["mat 2\n0 1\n1 0\n", "matrix 2\n0 1\n", "matrix 2\n0 x\n1 0\n"])
    def test_file_errors(self, tmp_path, text):
        p = tmp_path / "m.txt"
        p.write_text(text)
        with pytest.raises(ParseError):
            load_matrix(p)


class TestSetPrimitives:
    def test_l6_values(self, l6):
        assert sorted_distinct_distances(l6).tolist() == [1, 9, 10, 11, 19, 20, 21]
        assert solution_cost(l6, [0, 10, 20]) == 1.0
        assert min_pairwise(l6, [0, 10, 20]) == 10.0
        assert dist_to_set(l6, 21, [0, 10]) == 11.0

    def test_edge_cases(self, l6):
        assert dist_to_set(l6, 0, []) == math.inf
        with pytest.raises(EmptySolution):
            solution_cost(l6, [])
        assert solution_cost(EuclideanInstance(1), []) == 0.0
        with pytest.raises(TooFewPoints):
            min_pairwise(l6, [0])
        with pytest.raises(TooFewPoints):
            sorted_distinct_distances(EuclideanInstance.line([3]))
