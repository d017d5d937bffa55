"""Low-coherence sequence sets under time-domain PAPR constraints."""

from .errors import (
    DimensionError,
    DomainError,
    FormatError,
    NoFeasibleSolution,
    SeqforgeError,
    ValidationError,
)
from .kernels import BACKEND
from .model import (
    Metrics,
    PaprProbeSet,
    SequenceSet,
    SubcarrierAssignment,
    build_papr_probes,
    coherence,
    evaluate,
    papr,
    welch_bound,
)
from .solver import RunReport, SolverConfig, run

__version__ = "0.1.0"
