"""Signal model and metrics: subcarrier assignments, PAPR probes, coherence.

Sequences are stored row-wise: a set of ``N`` sequences of length ``L`` is a
``(N, L)`` complex128 array. Subcarrier indices are 1-based everywhere they
are user-visible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionError, DomainError, ValidationError

NORM_TOL = 1e-9
DEFAULT_N_SAMPLES = 1024


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SubcarrierAssignment:
    """Mapping of sequence entries onto OFDMA subcarriers.

    Parameters
    ----------
    indices : array_like of int
        ``c``: 1-based subcarrier index of each sequence entry.
    n_subcarriers : int
        Total number of subcarriers ``N_C``.
    n_samples : int
        Number of time-domain samples ``N_S`` used to discretize PAPR.
    """

    indices: np.ndarray
    n_subcarriers: int
    n_samples: int

    def __post_init__(self):
        c = np.asarray(self.indices)
        if c.ndim != 1 or c.size == 0:
            raise ValidationError("subcarrier indices must be a non-empty 1-D vector")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.equal(np.mod(c, 1), 0)):
                raise ValidationError("subcarrier indices must be integers")
        c = c.astype(np.int64)
        n_c, n_s = int(self.n_subcarriers), int(self.n_samples)
        if n_c < 1:
            raise ValidationError(f"n_subcarriers must be positive, got {n_c}")
        if len(np.unique(c)) != c.size:
            raise ValidationError("subcarrier indices must be distinct (duplicate found)")
        if c.min() < 1 or c.max() > n_c:
            raise ValidationError(
                f"subcarrier indices must lie in [1, n_subcarriers={n_c}], "
                f"got range [{c.min()}, {c.max()}]"
            )
        if n_s < n_c:
            raise ValidationError(
                f"n_samples ({n_s}) must be >= n_subcarriers ({n_c})"
            )
        object.__setattr__(self, "indices", _frozen(c))
        object.__setattr__(self, "n_subcarriers", n_c)
        object.__setattr__(self, "n_samples", n_s)

    @property
    def length(self):
        return int(self.indices.size)

    @classmethod
    def contiguous(cls, length, n_subcarriers=None, n_samples=None):
        """``c = [1, ..., L]`` with ``N_C = N_S = 1024`` unless given."""
        return cls.strided(length, 1, n_subcarriers, n_samples)

    @classmethod
    def strided(cls, length, stride, n_subcarriers=None, n_samples=None):
        """``c = [s, 2s, ..., L*s]``.

        When only one of ``n_subcarriers``/``n_samples`` is given the other
        takes the same value; with neither both default to 1024.
        """
        n_samples, n_subcarriers = _resolve_grid(n_subcarriers, n_samples)
        c = stride * np.arange(1, length + 1)
        return cls(c, n_subcarriers, n_samples)

    def __eq__(self, other):
        if not isinstance(other, SubcarrierAssignment):
            return NotImplemented
        return (
            self.n_subcarriers == other.n_subcarriers
            and self.n_samples == other.n_samples
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.indices.tobytes(), self.n_subcarriers, self.n_samples))


def _resolve_grid(n_subcarriers, n_samples):
    if n_samples is None and n_subcarriers is None:
        return DEFAULT_N_SAMPLES, DEFAULT_N_SAMPLES
    if n_samples is None:
        return max(int(n_subcarriers), DEFAULT_N_SAMPLES), int(n_subcarriers)
    if n_subcarriers is None:
        return int(n_samples), int(n_samples)
    return int(n_samples), int(n_subcarriers)


@dataclass(frozen=True, eq=False)
class SequenceSet:
    """``N`` unit-norm complex sequences of length ``L`` (one per row).

    Parameters
    ----------
    sequences : array_like, shape (N, L)
        Complex sequences. Every row must have unit Euclidean norm.
    assignment : SubcarrierAssignment
        Assignment the set was designed for; its length must equal ``L``.
    """

    sequences: np.ndarray
    assignment: SubcarrierAssignment

    def __post_init__(self):
        p = np.asarray(self.sequences, dtype=np.complex128)
        if p.ndim != 2:
            raise DimensionError(f"sequences must be 2-D (N, L), got shape {p.shape}")
        n, length = p.shape
        if n < 2 or length < 2:
            raise ValidationError(f"need N >= 2 and L >= 2, got N={n}, L={length}")
        if self.assignment.length != length:
            raise DimensionError(
                f"assignment has {self.assignment.length} subcarriers but L={length}"
            )
        norms = np.linalg.norm(p, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)
        if bad.size:
            raise ValidationError(
                f"sequence {bad[0]} has norm {norms[bad[0]]!r}, expected 1"
            )
        if n <= length:
            warnings.warn(
                f"N={n} <= L={length}: orthogonal sets exist, coherence design is trivial",
                stacklevel=3,
            )
        object.__setattr__(self, "sequences", _frozen(p))

    @property
    def n_sequences(self):
        return self.sequences.shape[0]

    @property
    def length(self):
        return self.sequences.shape[1]

    @classmethod
    def from_unnormalized(cls, vectors, assignment):
        v = np.asarray(vectors, dtype=np.complex128)
        return cls(v / np.linalg.norm(v, axis=1, keepdims=True), assignment)


@dataclass(frozen=True, eq=False)
class PaprProbeSet:
    """The ``N_S`` unit-norm probe vectors, one per row, shape ``(N_S, L)``."""

    probes: np.ndarray
    assignment: SubcarrierAssignment

    @property
    def n_samples(self):
        return self.probes.shape[0]

    @property
    def length(self):
        return self.probes.shape[1]


@dataclass(frozen=True)
class Metrics:
    coherence: float
    papr_per_sequence: np.ndarray = field(repr=False)
    max_papr: float
    welch_bound: float | None

    def to_dict(self):
        papr = self.papr_per_sequence
        return {
            "coherence": self.coherence,
            "welch_bound": self.welch_bound,
            "max_papr": self.max_papr,
            "min_papr": float(papr.min()),
            "median_papr": float(np.median(papr)),
            "papr_per_sequence": [float(x) for x in papr],
        }


def random_unit_rows(rng, n, length):
    """``n`` rows of i.i.d. standard complex Gaussians, each scaled to unit norm."""
    z = rng.standard_normal((n, length)) + 1j * rng.standard_normal((n, length))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def build_papr_probes(assign):
    """Probe vectors whose inner products give the sampled time-domain signal.

    Row ``s`` (0-based) has entries ``exp(-2j*pi*c[l]*s/N_S) / sqrt(L)``.
    The phase ``c[l]*s`` is reduced modulo ``N_S`` in integer arithmetic
    before the exponential so that entries are exact on coarse/fine grids.
    """
    if not isinstance(assign, SubcarrierAssignment):
        raise ValidationError("build_papr_probes expects a SubcarrierAssignment")
    c = assign.indices
    n_s = assign.n_samples
    s = np.arange(n_s, dtype=np.int64)
    phase_idx = np.mod(np.outer(s, c), n_s)
    probes = np.exp(-2j * np.pi * phase_idx / n_s) / math.sqrt(assign.length)
    return PaprProbeSet(_frozen(probes), assign)


def _as_matrix(seq):
    p = np.asarray(seq, dtype=np.complex128)
    return p[None, :] if p.ndim == 1 else p


def papr_values(sequences, probes):
    """PAPR of every row of ``sequences`` on the probe grid."""
    p = _as_matrix(sequences)
    if p.shape[1] != probes.length:
        raise DimensionError(
            f"sequence length {p.shape[1]} does not match probe length {probes.length}"
        )
    corr = kernels.probe_correlations(np.ascontiguousarray(p), probes.probes)
    peak = np.max(np.abs(corr), axis=1)
    return probes.length * peak**2


def papr(seq, probes):
    """Discretized PAPR ``L * max_s |w_s^H p|^2`` of a single unit-norm sequence."""
    seq = np.asarray(seq)
    if seq.ndim != 1:
        raise DimensionError(f"papr expects a single 1-D sequence, got shape {seq.shape}")
    return float(papr_values(seq, probes)[0])


def coherence_of(matrix):
    """Largest off-diagonal ``|p_m^H p_n|`` of a raw ``(N, L)`` array."""
    p = np.ascontiguousarray(matrix, dtype=np.complex128)
    if p.shape[0] < 2:
        raise DomainError("coherence needs at least two sequences")
    return float(kernels.max_offdiag_abs(kernels.gram(p)))


def coherence(seqset):
    """Mutual coherence: max over distinct pairs of ``|p_m^H p_n|``."""
    if isinstance(seqset, SequenceSet):
        return coherence_of(seqset.sequences)
    return coherence_of(seqset)


def welch_bound(length, n_sequences):
    """Welch lower bound ``sqrt((N - L) / (L * (N - 1)))`` on coherence.

    Raises
    ------
    DomainError
        If ``N <= L`` or ``L < 1``.
    """
    length, n_sequences = int(length), int(n_sequences)
    if length < 1:
        raise DomainError(f"L must be positive, got {length}")
    if n_sequences <= length:
        raise DomainError(f"Welch bound needs N > L, got N={n_sequences}, L={length}")
    return math.sqrt((n_sequences - length) / (length * (n_sequences - 1)))


def evaluate(seqset, probes=None):
    """Coherence, per-sequence PAPR and the Welch bound of ``seqset``."""
    if probes is None:
        probes = build_papr_probes(seqset.assignment)
    if probes.length != seqset.length:
        raise DimensionError(
            f"probe length {probes.length} does not match sequence length {seqset.length}"
        )
    if not np.array_equal(probes.assignment.indices, seqset.assignment.indices):
        raise ValidationError("probes were built for a different subcarrier assignment")
    values = papr_values(seqset.sequences, probes)
    n, length = seqset.sequences.shape
    bound = welch_bound(length, n) if n > length else None
    return Metrics(
        coherence=coherence(seqset),
        papr_per_sequence=_frozen(values),
        max_papr=float(values.max()),
        welch_bound=bound,
    )
