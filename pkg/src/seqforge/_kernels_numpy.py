"""Pure-numpy implementations of the hot kernels.

Every function here has a twin in ``_kernels_numba`` with the same signature
and semantics. The two agree to rounding error, not bit-for-bit.
"""

import numpy as np


def gram(p):
    """``G[m, n] = p_m^H p_n`` for the rows of ``p``."""
    return p.conj() @ p.T


def max_offdiag_abs(g):
    a = np.abs(g)
    np.fill_diagonal(a, -np.inf)
    return a.max()


def probe_correlations(p, w):
    """``C[n, s] = w_s^H p_n``."""
    return p @ w.conj().T


def _unit_phase(z, mag):
    out = np.ones_like(z)
    nz = mag > 0
    out[nz] = z[nz] / mag[nz]
    return out


def sequence_displacement(p, two_r, degenerate_dist):
    """Collision displacement of every sequence against a snapshot of ``p``.

    Returns
    -------
    u : ndarray, shape (N, L)
        Sum of ``(2R - |d|) d / |d|`` over colliding partners.
    n_degenerate : ndarray of int, shape (N,)
        Number of colliding partners whose separation is below
        ``degenerate_dist``; these are excluded from ``u``.
    """
    g = gram(p)
    a = np.abs(g)
    dist = np.sqrt(np.maximum(2.0 - 2.0 * a, 0.0))
    hit = dist < two_r
    np.fill_diagonal(hit, False)
    degenerate = hit & (dist < degenerate_dist)
    hit &= ~degenerate
    weight = np.zeros_like(dist)
    weight[hit] = (two_r - dist[hit]) / dist[hit]
    # phase[m, n] multiplies p_m in d_{n,m}; weight is symmetric
    phase = _unit_phase(g, a)
    u = p * weight.sum(axis=1)[:, None] - (weight * phase.T) @ p
    return u, degenerate.sum(axis=1)


def papr_displacement(p, w, threshold, degenerate_dist):
    """Probe-collision displacement of every sequence.

    Returns
    -------
    ubar : ndarray, shape (N, L)
        Sum of ``(T - |d|) d / |d|`` over colliding probes, ``T = threshold``.
    n_hits : ndarray of int, shape (N,)
        Number of colliding probes per sequence, degenerate ones included.
    n_degenerate : ndarray of int, shape (N,)
        Colliding probes whose separation is below ``degenerate_dist``.
    """
    c = probe_correlations(p, w)
    a = np.abs(c)
    dist = np.sqrt(np.maximum(2.0 - 2.0 * a, 0.0))
    hit = dist < threshold
    degenerate = hit & (dist < degenerate_dist)
    regular = hit & ~degenerate
    weight = np.zeros_like(dist)
    weight[regular] = (threshold - dist[regular]) / dist[regular]
    phase = _unit_phase(c, a)
    ubar = p * weight.sum(axis=1)[:, None] - (weight * phase) @ w
    return ubar, hit.sum(axis=1), degenerate.sum(axis=1)
