"""Consistent k-center clustering with worst-case recourse 1."""

from .engine import ClusterState, EngineSnapshot, RecourseDelta, recourse
from .errors import (
    EmptySolution,
    IdAlreadyPresent,
    IdNotPresent,
    IllegalState,
    KCCError,
    MetricError,
    OracleSizeExceeded,
    ParseError,
    TooFewPoints,
    UnsupportedOperation,
)
from .decremental import DecrementalKCenter
from .fully import FullyDynamicKCenter
from .harness import Delete, Insert, parse_stream, run
from .incremental import IncrementalKCenter
from .metric import EuclideanInstance, MatrixInstance, MetricInstance
from .static import brute_force_opt, gonzalez, hochbaum_shmoys, maximal_independent_set
from .verifier import InvariantReport, Verifier, check

__all__ = [
    "ClusterState",
    "EngineSnapshot",
    "RecourseDelta",
    "recourse",
    "EmptySolution",
    "IdAlreadyPresent",
    "IdNotPresent",
    "IllegalState",
    "KCCError",
    "MetricError",
    "OracleSizeExceeded",
    "ParseError",
    "TooFewPoints",
    "UnsupportedOperation",
    "FullyDynamicKCenter",
    "DecrementalKCenter",
    "IncrementalKCenter",
    "Verifier",
    "InvariantReport",
    "check",
    "Insert",
    "Delete",
    "parse_stream",
    "run",
    "EuclideanInstance",
    "MatrixInstance",
    "MetricInstance",
    "brute_force_opt",
    "gonzalez",
    "hochbaum_shmoys",
    "maximal_independent_set",
]
