"""Reference sets for comparison: Zadoff-Chu families and random Gaussian sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .model import SequenceSet, SubcarrierAssignment, random_unit_rows


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, math.isqrt(n) + 1, 2))


def largest_odd_prime_at_most(n):
    for k in range(n, 2, -1):
        if k % 2 and is_prime(k):
            return k
    raise DomainError(f"no odd prime <= {n}")


def coprime_roots(zc_length):
    return tuple(r for r in range(1, zc_length) if math.gcd(r, zc_length) == 1)


@dataclass(frozen=True)
class ZcFamilySpec:
    """Which Zadoff-Chu sequences to generate.

    Parameters
    ----------
    zc_length : int
        Odd sequence length ``N_zc``; prime lengths give flat cross-correlation.
    roots : tuple of int
        Root indices, each in ``[1, N_zc)`` and coprime with ``N_zc``.
    shifts : int
        Cyclic shifts per root, spaced ``N_zc // shifts`` samples apart.
    """

    zc_length: int
    roots: tuple
    shifts: int = 1

    def __post_init__(self):
        n = int(self.zc_length)
        if n < 3 or n % 2 == 0:
            raise DomainError(f"zc_length must be odd and >= 3, got {n}")
        roots = tuple(int(r) for r in self.roots)
        if not roots:
            raise ValidationError("at least one root is required")
        if len(set(roots)) != len(roots):
            raise ValidationError(f"roots must be distinct, got {roots}")
        for r in roots:
            if not 1 <= r < n:
                raise DomainError(f"root {r} outside [1, {n - 1}]")
            if math.gcd(r, n) != 1:
                raise DomainError(f"root {r} is not coprime with zc_length {n}")
        if not 1 <= self.shifts <= n:
            raise ValidationError(f"shifts must lie in [1, {n}], got {self.shifts}")
        object.__setattr__(self, "zc_length", n)
        object.__setattr__(self, "roots", roots)

    @classmethod
    def full(cls, zc_length, shifts=1):
        """Every admissible root of ``zc_length``."""
        return cls(zc_length, coprime_roots(zc_length), shifts)


def zc_root_sequence(zc_length, root):
    """Unnormalized ``exp(-j*pi*r*k*(k+1)/N_zc)``, ``k = 0..N_zc-1``."""
    k = np.arange(zc_length, dtype=np.int64)
    # k(k+1) is even, so reduce r*k(k+1)/2 mod N_zc exactly before the exponential
    phase = np.mod(root * (k * (k + 1) // 2), zc_length)
    return np.exp(-2j * np.pi * phase / zc_length)


def zc_generate(spec, target_length, assignment=None):
    """All (root, shift) ZC sequences, zero-padded to ``target_length`` and normalized."""
    if spec.zc_length > target_length:
        raise DomainError(
            f"zc_length {spec.zc_length} exceeds target length {target_length}"
        )
    if assignment is None:
        assignment = SubcarrierAssignment.contiguous(target_length)
    step = spec.zc_length // spec.shifts
    rows = []
    for r in spec.roots:
        base = zc_root_sequence(spec.zc_length, r)
        for j in range(spec.shifts):
            padded = np.zeros(target_length, dtype=np.complex128)
            padded[: spec.zc_length] = np.roll(base, -j * step)
            rows.append(padded / np.linalg.norm(padded))
    return SequenceSet(np.array(rows), assignment)


def random_gaussian_set(L, N, seed, assignment=None):
    """Normalized i.i.d. complex Gaussian rows; same draw as a solver start."""
    if L < 1 or N < 1:
        raise ValidationError(f"L and N must be positive, got L={L}, N={N}")
    if assignment is None:
        assignment = SubcarrierAssignment.contiguous(L)
    rng = np.random.default_rng(seed)
    return SequenceSet(random_unit_rows(rng, N, L), assignment)


def select_lowest_coherence_subset(seqset, n_target):
    """Greedily drop sequences from the worst pair until ``n_target`` remain.

    Of the two members of the current worst pair, the one with the larger
    coherence against the remaining others is dropped (lower index on ties).
    The result is not guaranteed to be the optimal subset.
    """
    n = seqset.n_sequences
    if n_target > n:
        raise DomainError(f"cannot select {n_target} sequences from {n}")
    if n_target < 2:
        raise DomainError(f"n_target must be >= 2, got {n_target}")
    p = seqset.sequences
    a = np.abs(p.conj() @ p.T)
    np.fill_diagonal(a, -np.inf)
    keep = list(range(n))
    while len(keep) > n_target:
        sub = a[np.ix_(keep, keep)]
        flat = int(np.argmax(sub))  # first maximum in row-major order
        i, j = divmod(flat, len(keep))
        i, j = min(i, j), max(i, j)
        others_i = np.delete(sub[i], [i, j]).max(initial=-np.inf)
        others_j = np.delete(sub[j], [i, j]).max(initial=-np.inf)
        drop = j if others_j > others_i else i
        del keep[drop]
    return SequenceSet(p[keep], seqset.assignment)
