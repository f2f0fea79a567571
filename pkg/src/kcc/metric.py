"""Point-set bookkeeping and distance evaluation over a finite metric.

Two backends share one interface:

* :class:`EuclideanInstance` keeps a coordinate vector per id and measures the
  standard Euclidean norm.
* :class:`MatrixInstance` fixes a universe ``0..n-1`` with an explicit
  distance table; insert and delete toggle presence inside that universe.

Present points live in a dense row order (swap-remove on delete) so that
"all points to a few centers" queries are single numpy expressions.  Every
distance value, scalar or batched, goes through the same ``_block`` routine so
repeated evaluations of one pair are bit-identical and exact comparisons
between them are meaningful.
"""

from __future__ import annotations

import numbers
from pathlib import Path
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptySolution,
    IdAlreadyPresent,
    IdNotPresent,
    MetricError,
    TooFewPoints,
)

PointId = Hashable


def _id_kind(pid: PointId) -> type:
    """Ids must be mutually ordered: real numbers form one kind, any other type its own."""
    return numbers.Real if isinstance(pid, numbers.Real) and not isinstance(pid, bool) else type(pid)


class MetricInstance:
    """The live point set ``P`` plus a distance function.

    ``evaluations`` counts distance values produced; the harness uses it as
    the per-update operation count.
    """

    def __init__(self) -> None:
        self._ids: list[PointId] = []
        self._row: dict[PointId, int] = {}
        self._kind: type | None = None
        self.evaluations = 0

    # --- membership -----------------------------------------------------
    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, pid: object) -> bool:
        return pid in self._row

    def __iter__(self) -> Iterator[PointId]:
        return iter(list(self._ids))

    def ids(self) -> list[PointId]:
        """Present ids in internal row order (the row order of :meth:`distances_to`)."""
        return list(self._ids)

    def sorted_ids(self) -> list[PointId]:
        return sorted(self._ids)

    def add(self, pid: PointId, coords: Sequence[float] | None = None) -> None:
        if pid in self._row:
            raise IdAlreadyPresent(pid)
        kind = _id_kind(pid)
        if self._kind is not None and kind is not self._kind:
            raise MetricError(f"id {pid!r} cannot be ordered against the ids already used")
        self._attach(pid, coords)
        self._kind = kind
        self._row[pid] = len(self._ids)
        self._ids.append(pid)

    def remove(self, pid: PointId) -> None:
        row = self._row.pop(pid, None)
        if row is None:
            raise IdNotPresent(pid)
        last = len(self._ids) - 1
        if row != last:
            moved = self._ids[last]
            self._ids[row] = moved
            self._row[moved] = row
            self._move_row(last, row)
        self._ids.pop()

    def require(self, pid: PointId) -> None:
        if pid not in self._row:
            raise IdNotPresent(pid)

    # --- distances ------------------------------------------------------
    def distance(self, a: PointId, b: PointId) -> float:
        self.require(a)
        self.require(b)
        return float(self._block(self._keys([a]), self._keys([b]))[0, 0])

    def distances(self, a_ids: Sequence[PointId], b_ids: Sequence[PointId]) -> np.ndarray:
        """Distance table ``len(a_ids) x len(b_ids)`` between present points."""
        for pid in a_ids:
            self.require(pid)
        for pid in b_ids:
            self.require(pid)
        return self._block(self._keys(a_ids), self._keys(b_ids))

    def distances_to(self, b_ids: Sequence[PointId]) -> np.ndarray:
        """Distances from every present point (rows in :meth:`ids` order) to ``b_ids``."""
        for pid in b_ids:
            self.require(pid)
        return self._block(self._present_keys(), self._keys(b_ids))

    def all_pairs(self) -> np.ndarray:
        keys = self._present_keys()
        return self._block(keys, keys)

    def location(self, pid: PointId) -> Hashable:
        """A record that keeps identifying the point's position after it is deleted."""
        raise NotImplementedError

    def location_distances(self, locations: Sequence[Hashable], b_ids: Sequence[PointId]) -> np.ndarray:
        raise NotImplementedError

    # --- backend hooks --------------------------------------------------
    def _attach(self, pid: PointId, coords: Sequence[float] | None) -> None:
        raise NotImplementedError

    def _move_row(self, src: int, dst: int) -> None:
        raise NotImplementedError

    def _keys(self, ids: Sequence[PointId]) -> np.ndarray:
        raise NotImplementedError

    def _present_keys(self) -> np.ndarray:
        raise NotImplementedError

    def _block(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _euclidean_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # fixed per-coordinate accumulation order keeps results reproducible
    acc = np.zeros((a.shape[0], b.shape[0]))
    for j in range(a.shape[1]):
        diff = a[:, j, None] - b[None, :, j]
        acc += diff * diff
    return np.sqrt(acc)


class EuclideanInstance(MetricInstance):
    """Points in ``R^dim`` under the Euclidean norm.

    Coordinates of deleted ids are remembered: re-inserting an id is allowed
    only with identical coordinates.
    """

    def __init__(self, dim: int, points: dict[PointId, Sequence[float]] | None = None):
        if dim < 1:
            raise MetricError("dimension must be positive")
        super().__init__()
        self.dim = dim
        self._coords: dict[PointId, np.ndarray] = {}
        self._X = np.zeros((16, dim))
        for pid, xy in (points or {}).items():
            self.add(pid, xy)

    @classmethod
    def line(cls, values: Iterable[float]) -> "EuclideanInstance":
        """1-D instance whose ids are the coordinates themselves."""
        return cls(1, {v: [v] for v in values})

    def coords(self, pid: PointId) -> np.ndarray:
        return self._coords[pid].copy()

    def _attach(self, pid: PointId, coords: Sequence[float] | None) -> None:
        if coords is None:
            if pid not in self._coords:
                raise MetricError(f"insert of {pid!r} needs coordinates")
            vec = self._coords[pid]
        else:
            vec = np.asarray(coords, dtype=float).reshape(-1)
            if vec.shape[0] != self.dim:
                raise MetricError(f"point {pid!r} has dimension {vec.shape[0]}, expected {self.dim}")
            if not np.all(np.isfinite(vec)):
                raise MetricError(f"point {pid!r} has non-finite coordinates")
            old = self._coords.get(pid)
            if old is not None and not np.array_equal(old, vec):
                raise MetricError(f"id {pid!r} re-inserted with different coordinates")
            self._coords[pid] = vec
        n = len(self._ids)
        if n == self._X.shape[0]:
            self._X = np.concatenate([self._X, np.zeros_like(self._X)])
        self._X[n] = vec

    def _move_row(self, src: int, dst: int) -> None:
        self._X[dst] = self._X[src]

    def _keys(self, ids: Sequence[PointId]) -> np.ndarray:
        if len(ids) == 0:
            return np.zeros((0, self.dim))
        return np.stack([self._coords[i] for i in ids])

    def _present_keys(self) -> np.ndarray:
        return self._X[: len(self._ids)]

    def _block(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.evaluations += a.shape[0] * b.shape[0]
        return _euclidean_block(a, b)

    def location(self, pid: PointId) -> tuple[float, ...]:
        return tuple(float(x) for x in self._coords[pid])

    def location_distances(self, locations, b_ids):
        a = np.asarray(locations, dtype=float).reshape(len(locations), self.dim)
        return self._block(a, self._keys(b_ids))


class MatrixInstance(MetricInstance):
    """Explicit symmetric distance table over the universe ``0..n-1``."""

    def __init__(self, matrix, present: Iterable[int] = (), validate: bool = True):
        super().__init__()
        M = np.array(matrix, dtype=float)
        if validate:
            validate_metric(M)
        self._M = M
        self.size = M.shape[0]
        self._rows = np.zeros(max(self.size, 1), dtype=np.intp)
        for pid in present:
            self.add(pid)

    @property
    def matrix(self) -> np.ndarray:
        return self._M

    def _attach(self, pid, coords) -> None:
        if coords is not None and len(coords) > 0:
            raise MetricError("matrix backend inserts carry no coordinates")
        if not isinstance(pid, (int, np.integer)) or not 0 <= pid < self.size:
            raise IdNotPresent(f"{pid!r} is outside the matrix universe 0..{self.size - 1}")
        self._rows[len(self._ids)] = pid

    def _move_row(self, src: int, dst: int) -> None:
        self._rows[dst] = self._rows[src]

    def _keys(self, ids) -> np.ndarray:
        return np.asarray(list(ids), dtype=np.intp)

    def _present_keys(self) -> np.ndarray:
        return self._rows[: len(self._ids)]

    def _block(self, a, b) -> np.ndarray:
        self.evaluations += a.shape[0] * b.shape[0]
        return self._M[np.ix_(a, b)]

    def location(self, pid) -> int:
        return int(pid)

    def location_distances(self, locations, b_ids):
        return self._block(np.asarray(locations, dtype=np.intp), self._keys(b_ids))


def validate_metric(M: np.ndarray) -> None:
    """Raise :class:`MetricError` unless ``M`` is a square pseudometric table.

    The triangle inequality is checked exhaustively (``O(n^3)``).
    """
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MetricError(f"distance table must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MetricError("distance table has non-finite entries")
    if np.any(M < 0):
        i, j = np.argwhere(M < 0)[0]
        raise MetricError(f"negative distance at ({i}, {j})")
    if np.any(np.diag(M) != 0):
        i = int(np.flatnonzero(np.diag(M) != 0)[0])
        raise MetricError(f"nonzero diagonal at {i}")
    if not np.array_equal(M, M.T):
        i, j = np.argwhere(M != M.T)[0]
        raise MetricError(f"asymmetric entries at ({i}, {j})")
    for via in range(M.shape[0]):
        bad = M > M[:, via, None] + M[None, via, :]
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise MetricError(f"triangle inequality fails: d({i},{j}) > d({i},{via}) + d({via},{j})")


def load_matrix(path: str | Path, present: Iterable[int] = ()) -> MatrixInstance:
    """Read a ``matrix n`` file (header line, then ``n`` rows of ``n`` reals)."""
    from .errors import ParseError

    lines = [ln.split() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines or len(lines[0]) != 2 or lines[0][0] != "matrix":
        raise ParseError("expected header 'matrix <n>'", 1)
    try:
        n = int(lines[0][1])
    except ValueError:
        raise ParseError(f"bad matrix size {lines[0][1]!r}", 1) from None
    rows = lines[1:]
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, found {len(rows)}")
    try:
        M = np.array([[float(x) for x in row] for row in rows])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if M.shape != (n, n):
        raise ParseError(f"expected {n}x{n} values")
    return MatrixInstance(M, present)


def write_matrix(path: str | Path, M: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"matrix {M.shape[0]}\n")
        for row in M:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


# --- set-level primitives ------------------------------------------------

def distance(inst: MetricInstance, a: PointId, b: PointId) -> float:
    return inst.distance(a, b)


def dist_to_set(inst: MetricInstance, p: PointId, S: Iterable[PointId]) -> float:
    """``min_{q in S} dist(p, q)``; an empty ``S`` is infinitely far away."""
    S = list(S)
    inst.require(p)
    if not S:
        return float("inf")
    return float(inst.distances([p], S).min())


def solution_cost(inst: MetricInstance, S: Iterable[PointId]) -> float:
    """``max_{p in P} dist(p, S)``."""
    S = list(S)
    if len(inst) == 0:
        return 0.0
    if not S:
        raise EmptySolution("cost of an empty center set over a nonempty point set")
    return float(inst.distances_to(S).min(axis=1).max())


def min_pairwise(inst: MetricInstance, S: Iterable[PointId]) -> float:
    S = list(S)
    if len(S) < 2:
        raise TooFewPoints("minimum pairwise distance needs at least two points")
    D = inst.distances(S, S)
    return float(D[np.triu_indices(len(S), 1)].min())


def sorted_distinct_distances(inst: MetricInstance) -> np.ndarray:
    """Strictly increasing array of the distinct pairwise distances in ``P``."""
    n = len(inst)
    if n < 2:
        raise TooFewPoints("pairwise distances need at least two points")
    D = inst.all_pairs()
    return np.unique(D[np.triu_indices(n, 1)])
