"""Numba-compiled kernels.

Inner products accumulate over the sequence index in ascending order; the
innermost loops run across independent outputs (partners or probes) on
split real/imaginary arrays so they vectorize without reordering any sum.
Results are bit-reproducible run to run. Signatures mirror
``_kernels_numpy``.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _split_t(x):
    # (rows, L) complex -> two (L, rows) float arrays
    rows, length = x.shape
    re = np.empty((length, rows))
    im = np.empty((length, rows))
    for r in range(rows):
        for k in range(length):
            re[k, r] = x[r, k].real
            im[k, r] = x[r, k].imag
    return re, im


@njit(cache=True)
def _corr_row(ar, ai, bt_r, bt_i, out_r, out_i):
    # out[j] = sum_k conj(b[j, k]) * a[k]  for all j, k ascending
    length, cols = bt_r.shape
    out_r[:] = 0.0
    out_i[:] = 0.0
    for k in range(length):
        xr = ar[k]
        xi = ai[k]
        for j in range(cols):
            br = bt_r[k, j]
            bi = bt_i[k, j]
            out_r[j] += br * xr + bi * xi
            out_i[j] += br * xi - bi * xr


@njit(cache=True)
def _gram_parts(p):
    n, length = p.shape
    pt_r, pt_i = _split_t(p)
    gr = np.empty((n, n))
    gi = np.empty((n, n))
    row_r = np.empty(n)
    row_i = np.empty(n)
    for i in range(n):
        # row i holds p_j^H p_i over j; transpose below gives G[m, n] = p_m^H p_n
        _corr_row(pt_r[:, i].copy(), pt_i[:, i].copy(), pt_r, pt_i, row_r, row_i)
        gr[i, :] = row_r
        gi[i, :] = row_i
    return gr, gi


@njit(cache=True)
def gram(p):
    n = p.shape[0]
    gr, gi = _gram_parts(p)
    g = np.empty((n, n), dtype=np.complex128)
    for m in range(n):
        for j in range(n):
            g[m, j] = complex(gr[j, m], gi[j, m])
    return g


@njit(cache=True)
def max_offdiag_abs(g):
    n = g.shape[0]
    best = -1.0
    for i in range(n):
        for j in range(i + 1, n):
            a = abs(g[i, j])
            if a > best:
                best = a
    return best


@njit(cache=True)
def probe_correlations(p, w):
    n, n_s = p.shape[0], w.shape[0]
    wt_r, wt_i = _split_t(w)
    row_r = np.empty(n_s)
    row_i = np.empty(n_s)
    c = np.empty((n, n_s), dtype=np.complex128)
    for i in range(n):
        _corr_row(p[i].real.copy(), p[i].imag.copy(), wt_r, wt_i, row_r, row_i)
        for s in range(n_s):
            c[i, s] = complex(row_r[s], row_i[s])
    return c


@njit(cache=True)
def sequence_displacement(p, two_r, degenerate_dist):
    n, length = p.shape
    # gr[i, j] + 1j*gi[i, j] = p_j^H p_i
    gr, gi = _gram_parts(p)
    p_r = p.real.copy()
    p_i = p.imag.copy()
    u_r = np.zeros((n, length))
    u_i = np.zeros((n, length))
    n_deg = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            zr = gr[i, j]
            zi = gi[i, j]
            a = math.sqrt(zr * zr + zi * zi)
            dist = math.sqrt(max(2.0 - 2.0 * a, 0.0))
            if dist >= two_r:
                continue
            if dist < degenerate_dist:
                n_deg[i] += 1
                continue
            if a > 0.0:
                fr = zr / a
                fi = zi / a
            else:
                fr = 1.0
                fi = 0.0
            wgt = (two_r - dist) / dist
            for k in range(length):
                qr = p_r[j, k]
                qi = p_i[j, k]
                u_r[i, k] += wgt * (p_r[i, k] - (fr * qr - fi * qi))
                u_i[i, k] += wgt * (p_i[i, k] - (fr * qi + fi * qr))
    u = np.empty((n, length), dtype=np.complex128)
    for i in range(n):
        for k in range(length):
            u[i, k] = complex(u_r[i, k], u_i[i, k])
    return u, n_deg


@njit(cache=True)
def papr_displacement(p, w, threshold, degenerate_dist):
    n, length = p.shape
    n_s = w.shape[0]
    wt_r, wt_i = _split_t(w)
    w_r = w.real.copy()
    w_i = w.imag.copy()
    row_r = np.empty(n_s)
    row_i = np.empty(n_s)
    ubar = np.zeros((n, length), dtype=np.complex128)
    n_hits = np.zeros(n, dtype=np.int64)
    n_deg = np.zeros(n, dtype=np.int64)
    acc_r = np.empty(length)
    acc_i = np.empty(length)
    for i in range(n):
        pr = p[i].real.copy()
        pi = p[i].imag.copy()
        _corr_row(pr, pi, wt_r, wt_i, row_r, row_i)
        acc_r[:] = 0.0
        acc_i[:] = 0.0
        for s in range(n_s):
            zr = row_r[s]
            zi = row_i[s]
            a = math.sqrt(zr * zr + zi * zi)
            dist = math.sqrt(max(2.0 - 2.0 * a, 0.0))
            if dist >= threshold:
                continue
            n_hits[i] += 1
            if dist < degenerate_dist:
                n_deg[i] += 1
                continue
            if a > 0.0:
                fr = zr / a
                fi = zi / a
            else:
                fr = 1.0
                fi = 0.0
            wgt = (threshold - dist) / dist
            for k in range(length):
                qr = w_r[s, k]
                qi = w_i[s, k]
                acc_r[k] += wgt * (pr[k] - (fr * qr - fi * qi))
                acc_i[k] += wgt * (pi[k] - (fr * qi + fi * qr))
        for k in range(length):
            ubar[i, k] = complex(acc_r[k], acc_i[k])
    return ubar, n_hits, n_deg
