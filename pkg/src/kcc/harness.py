"""Update streams, batch execution and CSV reporting.

Stream grammar, one event per line::

    I <id> <x1> ... <xd>     insert (euclidean backend)
    I <id>                   insert (matrix backend, id in 0..n-1)
    D <id>                   delete
    ---                      end of the initial batch

``#`` starts a comment line; blank lines are ignored.  Ids that look like
integers are read as ``int``, everything else stays a string.
"""

from __future__ import annotations

import csv
import enum
import io
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .decremental import DecrementalKCenter
from .engine import ClusterState, Engine
from .errors import KCCError, ParseError, UnsupportedOperation
from .fully import FullyDynamicKCenter
from .incremental import IncrementalKCenter
from .metric import EuclideanInstance, MatrixInstance, MetricInstance, PointId, load_matrix
from .verifier import InvariantReport, Verifier

ALGORITHMS = {
    "fully": FullyDynamicKCenter,
    "decremental": DecrementalKCenter,
    "incremental": IncrementalKCenter,
}

CSV_HEADER = (
    "step",
    "op",
    "id",
    "recourse",
    "size_S",
    "level",
    "radius",
    "cost",
    "rstar",
    "ratio",
    "n_regular",
    "n_extended",
    "n_zombie",
    "invariants_ok",
)

EXIT_OK, EXIT_INVARIANT, EXIT_ERROR = 0, 1, 2
_INT = re.compile(r"[+-]?\d+\Z")


class Op(enum.Enum):
    INSERT = "I"
    DELETE = "D"
    MARKER = "---"


@dataclass(frozen=True)
class UpdateEvent:
    op: Op
    id: PointId | None = None
    coords: tuple[float, ...] | None = None

    def line(self) -> str:
        if self.op is Op.MARKER:
            return "---"
        parts = [self.op.value, str(self.id)]
        if self.coords is not None:
            parts += [repr(float(x)) for x in self.coords]
        return " ".join(parts)


def Insert(pid, coords=None) -> UpdateEvent:
    return UpdateEvent(Op.INSERT, pid, None if coords is None else tuple(float(x) for x in coords))


def Delete(pid) -> UpdateEvent:
    return UpdateEvent(Op.DELETE, pid)


MARKER = UpdateEvent(Op.MARKER)


@dataclass
class StepReport:
    step: int
    op: str
    id: PointId | None
    recourse: int
    size_S: int
    level: int | None
    radius: float | None
    cost: float
    rstar: float | None
    ratio: float | None
    n_regular: int | None
    n_extended: int | None
    n_zombie: int | None
    invariants_ok: bool
    report: InvariantReport | None = field(default=None, repr=False, compare=False)

    def row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [fmt(getattr(self, name)) for name in CSV_HEADER]


# --- parsing ----------------------------------------------------------------


def _parse_id(tok: str) -> PointId:
    return int(tok) if _INT.match(tok) else tok


def parse_stream(source: str | Path | TextIO | Iterable[str], matrix: bool = False) -> list[UpdateEvent]:
    """Read an update stream from a path, an open file or an iterable of lines."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return parse_stream(fh.readlines(), matrix)
    events: list[UpdateEvent] = []
    dim = None
    id_kind = None
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "---":
            events.append(MARKER)
            continue
        toks = line.split()
        op = toks[0]
        if op not in ("I", "D") or len(toks) < 2:
            raise ParseError(f"expected 'I <id> ...', 'D <id>' or '---', got {line!r}", lineno)
        pid = _parse_id(toks[1])
        kind = type(pid)
        if id_kind is None:
            id_kind = kind
        elif kind is not id_kind:
            raise ParseError(f"id {toks[1]!r} mixes integer and string ids", lineno)
        if matrix and not isinstance(pid, int):
            raise ParseError(f"matrix backend needs integer ids, got {toks[1]!r}", lineno)
        if op == "D":
            if len(toks) != 2:
                raise ParseError("delete takes exactly one id", lineno)
            events.append(Delete(pid))
            continue
        vals = toks[2:]
        if matrix:
            if vals:
                raise ParseError("matrix backend inserts take no coordinates", lineno)
            events.append(Insert(pid))
            continue
        if not vals:
            raise ParseError("euclidean insert needs coordinates", lineno)
        try:
            coords = [float(v) for v in vals]
        except ValueError as exc:
            raise ParseError(f"bad coordinate: {exc}", lineno) from None
        if not all(np.isfinite(coords)):
            raise ParseError("coordinates must be finite", lineno)
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise ParseError(f"expected {dim} coordinates, got {len(coords)}", lineno)
        events.append(Insert(pid, coords))
    return events


def write_stream(path: str | Path | TextIO, events: Sequence[UpdateEvent]) -> None:
    text = "".join(e.line() + "\n" for e in events)
    if isinstance(path, (str, Path)):
        Path(path).write_text(text)
    else:
        path.write(text)


def stream_dim(events: Sequence[UpdateEvent]) -> int:
    for e in events:
        if e.op is Op.INSERT and e.coords is not None:
            return len(e.coords)
    return 1


# --- execution ----------------------------------------------------------------


class Runner:
    """Feeds events to one engine and turns each step into a :class:`StepReport`.

    The partially dynamic engines start from the batch of inserts that precede
    the ``---`` marker; the marker yields one preprocessing row (op ``P``).  A
    decremental stream without a marker ends its batch at the first delete.
    The fully dynamic engine ignores the marker.
    """

    def __init__(self, algorithm: str, k: int, inst: MetricInstance, verify: str = "none", has_marker: bool = False):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        self.algorithm = algorithm
        self.k = k
        self.inst = inst
        self.verifier = Verifier(verify)
        self.engine: Engine | None = None
        self.event_no = 0
        self.batch = algorithm == "decremental" or (algorithm == "incremental" and has_marker)
        self.marker_seen = False
        if not self.batch:
            self._start()
            self.verifier.observe(self.engine.snapshot())

    def _start(self) -> None:
        self.engine = ALGORITHMS[self.algorithm](self.inst, self.k)
        self.verifier.reset()
        self.batch = False

    def apply(self, event: UpdateEvent) -> list[StepReport]:
        self.event_no += 1
        out: list[StepReport] = []
        if event.op is Op.MARKER:
            if self.algorithm == "fully" or self.marker_seen:
                return out
            self.marker_seen = True
            if self.batch:
                self._start()
                out.append(self._report("P", None, 0))
            return out
        if self.batch:
            if event.op is Op.INSERT:
                self.inst.add(event.id, event.coords)
                return out
            if self.algorithm == "incremental":
                raise UnsupportedOperation("the incremental engine does not accept deletions", step=self.event_no)
            self._start()
            out.append(self._report("P", None, 0))
        if self.algorithm == "decremental" and event.op is Op.INSERT:
            raise UnsupportedOperation("the decremental engine does not accept insertions", step=self.event_no)
        if self.algorithm == "incremental" and event.op is Op.DELETE:
            raise UnsupportedOperation("the incremental engine does not accept deletions", step=self.event_no)
        if event.op is Op.INSERT:
            delta = self.engine.insert(event.id, event.coords)
        else:
            delta = self.engine.delete(event.id)
        out.append(self._report(event.op.value, event.id, delta.recourse))
        return out

    def _report(self, op: str, pid, rc: int) -> StepReport:
        snap = self.engine.snapshot()
        inv = self.verifier.observe(snap)
        census = snap.census() if snap.states is not None else None
        return StepReport(
            step=self.event_no,
            op=op,
            id=pid,
            recourse=rc,
            size_S=len([c for c in snap.centers if c is not None]),
            level=snap.level,
            radius=snap.radius,
            cost=inv.cost,
            rstar=inv.rstar,
            ratio=inv.ratio,
            n_regular=None if census is None else census[ClusterState.REGULAR],
            n_extended=None if census is None else census[ClusterState.EXTENDED],
            n_zombie=None if census is None else census[ClusterState.ZOMBIE],
            invariants_ok=inv.ok,
            report=inv,
        )


def make_instance(events: Sequence[UpdateEvent], matrix: MatrixInstance | np.ndarray | str | Path | None = None) -> MetricInstance:
    """Empty instance of the right backend for ``events``."""
    if matrix is None:
        return EuclideanInstance(stream_dim(events))
    if isinstance(matrix, MatrixInstance):
        return MatrixInstance(matrix.matrix, validate=False)
    if isinstance(matrix, (str, Path)):
        return load_matrix(matrix)
    return MatrixInstance(np.asarray(matrix, dtype=float))


@dataclass
class RunResult:
    status: int
    rows: list[StepReport]
    error: str | None = None

    @property
    def total_recourse(self) -> int:
        return sum(r.recourse for r in self.rows)


def write_report(dest: str | Path | TextIO, rows: Sequence[StepReport]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.row())
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(buf.getvalue())
    else:
        dest.write(buf.getvalue())


def run(
    algorithm: str,
    k: int,
    events: Sequence[UpdateEvent],
    matrix=None,
    verify: str = "none",
    report: str | Path | TextIO | None = None,
    log: TextIO | None = None,
) -> RunResult:
    """Run a stream through one engine.

    Returns a :class:`RunResult` whose ``status`` is 0 when every row passed
    its invariant checks, 1 when some row failed and 2 on an engine error
    (rows up to the error are kept and written).
    """
    log = sys.stderr if log is None else log
    inst = make_instance(events, matrix)
    has_marker = any(e.op is Op.MARKER for e in events)
    runner = Runner(algorithm, k, inst, verify, has_marker)
    rows: list[StepReport] = []
    status, error = EXIT_OK, None
    try:
        for e in events:
            for row in runner.apply(e):
                rows.append(row)
                if not row.invariants_ok:
                    status = EXIT_INVARIANT
                    print(row.report.render(), file=log)
    except KCCError as exc:
        status, error = EXIT_ERROR, f"{type(exc).__name__}: {exc}"
        print(f"error at event {runner.event_no}: {error}", file=log)
    if report is not None:
        write_report(report, rows)
    return RunResult(status, rows, error)


# --- workloads ----------------------------------------------------------------


def _seed(seed: int | None) -> int:
    env = os.environ.get("KCC_SEED")
    if env is not None:
        return int(env)
    return 0 if seed is None else seed


def gen_random(n: int, dim: int = 2, seed: int | None = 0, churn_ratio: float = 0.0, warmup: int = 0) -> list[UpdateEvent]:
    """``n`` uniform inserts in the unit cube with deletes mixed in.

    After ``warmup`` inserts, every insert adds ``churn_ratio`` to a delete
    budget; each whole unit of budget deletes a uniformly chosen live point
    (at least one point always stays).  ``KCC_SEED`` overrides ``seed``.
    """
    rng = np.random.default_rng(_seed(seed))
    events: list[UpdateEvent] = []
    live: list[int] = []
    budget = 0.0
    for i in range(n):
        events.append(Insert(i, rng.random(dim)))
        live.append(i)
        if i + 1 <= warmup:
            continue
        budget += churn_ratio
        while budget >= 1.0 and len(live) > 1:
            budget -= 1.0
            j = int(rng.integers(len(live)))
            live[j], live[-1] = live[-1], live[j]
            events.append(Delete(live.pop()))
    return events


def gen_deletion_stream(n: int, dim: int = 2, seed: int | None = 0, deletes: int | None = None) -> list[UpdateEvent]:
    """Initial batch of ``n`` uniform points, a marker, then random deletes."""
    rng = np.random.default_rng(_seed(seed))
    events = [Insert(i, rng.random(dim)) for i in range(n)]
    events.append(MARKER)
    order = rng.permutation(n)[: n if deletes is None else min(deletes, n)]
    events += [Delete(int(i)) for i in order]
    return events


def gen_insertion_stream(n: int, dim: int = 2, seed: int | None = 0, batch: int = 0) -> list[UpdateEvent]:
    rng = np.random.default_rng(_seed(seed))
    events = [Insert(i, rng.random(dim)) for i in range(n)]
    if batch:
        events.insert(batch, MARKER)
    return events


def gen_random_matrix(n: int, seed: int | None = 0) -> np.ndarray:
    """Symmetric matrix with off-diagonal entries uniform in ``[1, 2]``;
    any such matrix satisfies the triangle inequality."""
    rng = np.random.default_rng(_seed(seed))
    M = np.triu(rng.uniform(1.0, 2.0, (n, n)), 1)
    return M + M.T


def gen_matrix_stream(n: int, seed: int | None = 0, churn_ratio: float = 0.0, steps: int | None = None) -> list[UpdateEvent]:
    """Insert/delete stream over the universe ``0..n-1`` of a matrix metric."""
    rng = np.random.default_rng(_seed(seed) + 1)
    steps = n if steps is None else steps
    live: list[int] = []
    free = list(range(n))
    events: list[UpdateEvent] = []
    budget = 0.0
    for _ in range(steps):
        if free:
            j = int(rng.integers(len(free)))
            free[j], free[-1] = free[-1], free[j]
            pid = free.pop()
            events.append(Insert(pid))
            live.append(pid)
            budget += churn_ratio
        else:
            budget = max(budget, 1.0)
        while budget >= 1.0 and len(live) > 1:
            budget -= 1.0
            j = int(rng.integers(len(live)))
            live[j], live[-1] = live[-1], live[j]
            pid = live.pop()
            free.append(pid)
            events.append(Delete(pid))
    return events


def gen_center_churn_adversary(
    algorithm: str,
    k: int,
    initial: Sequence[UpdateEvent],
    steps: int,
    target: PointId | None = None,
    matrix=None,
    verify: str = "none",
) -> tuple[list[UpdateEvent], list[StepReport]]:
    """Adaptive adversary: each step deletes the current first center (or the
    fixed ``target``) and re-inserts it at the same location.

    Returns the full event stream (initial events included) and the reports
    of the churn events.
    """
    if algorithm != "fully":
        raise UnsupportedOperation("center churn needs both insertions and deletions")
    inst = make_instance(initial, matrix)
    runner = Runner(algorithm, k, inst, verify)
    events = list(initial)
    for e in initial:
        runner.apply(e)
    rows: list[StepReport] = []
    for _ in range(steps):
        eng = runner.engine
        victim = target if target is not None else next(c for c in eng.centers if c is not None)
        coords = inst.location(victim) if isinstance(inst, EuclideanInstance) else None
        for e in (Delete(victim), Insert(victim, coords)):
            events.append(e)
            rows += runner.apply(e)
    return events, rows
