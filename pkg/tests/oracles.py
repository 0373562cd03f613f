"""Independent reference computations used as test oracles."""

from __future__ import annotations

import math

import numpy as np


def tridiagonalize(a: np.ndarray):
    """Householder reduction of symmetric ``a`` to tridiagonal ``(diag, offdiag)``."""
    t = np.array(a, dtype=float)
    n = len(t)
    for k in range(n - 2):
        x = t[k + 1:, k].copy()
        alpha = -np.copysign(np.linalg.norm(x), x[0]) if x[0] != 0 else -np.linalg.norm(x)
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0:
            continue
        v /= vn
        h = np.eye(n)
        h[k + 1:, k + 1:] -= 2 * np.outer(v, v)
        t = h @ t @ h
    return np.diag(t).copy(), np.diag(t, 1).copy()


def count_below(diag, off, lam: float) -> int:
    """Sturm count of eigenvalues below ``lam`` for a symmetric tridiagonal matrix."""
    scale = np.abs(diag).max() + (np.abs(off).max() if len(off) else 0.0) + 1.0
    tiny = 1e-300 + 1e-30 * scale
    neg = 0
    q = diag[0] - lam
    for i in range(len(diag)):
        if i > 0:
            q = diag[i] - lam - off[i - 1] ** 2 / q
        if abs(q) < tiny:
            q = -tiny
        if q < 0:
            neg += 1
    return neg


def bisection_eigenvalues(a: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """All eigenvalues by Sturm-sequence bisection inside the Gershgorin bound."""
    a = np.asarray(a, dtype=float)
    d, e = tridiagonalize(a)
    r = np.max(np.sum(np.abs(a), axis=1)) + 1.0
    out = []
    for k in range(len(a)):
        lo, hi = -r, r
        while hi - lo > tol * r:
            mid = 0.5 * (lo + hi)
            if count_below(d, e, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


def single_mode_s11(f, f0, kin, kex):
    """Textbook one-port resonance with linear-frequency rates."""
    return 1 - kex / (1j * (f - f0) + (kin + kex) / 2)


def jc_ladder_eigenvalues(omega_q, omega_cav, g, alpha, levels, n_phonons):
    """Dense product-space Jaynes-Cummings spectrum from explicit ket loops."""
    dim = (n_phonons + 1) * levels
    h = np.zeros((dim, dim))

    def idx(i, j):
        return i * levels + j

    for i in range(n_phonons + 1):
        for j in range(levels):
            h[idx(i, j), idx(i, j)] = i * omega_cav + j * omega_q - j * (j - 1) * alpha / 2
            # a^dag b |i, j> = sqrt(i+1) sqrt(j) |i+1, j-1>
            if j >= 1 and i + 1 <= n_phonons:
                v = g * math.sqrt(i + 1) * math.sqrt(j)
                h[idx(i + 1, j - 1), idx(i, j)] += v
                h[idx(i, j), idx(i + 1, j - 1)] += v
    return h


def pulse_spectrum(freqs, f_c, n_periods, samples_per_period=64):
    """|Fourier transform|^2 of a sinusoid at f_c lasting n_periods / f_c, by quadrature."""
    duration = n_periods / f_c
    t = np.linspace(0.0, duration, n_periods * samples_per_period + 1)
    x = np.sin(2 * np.pi * f_c * t)
    out = np.empty(len(freqs))
    for k, f in enumerate(freqs):
        out[k] = abs(np.trapezoid(x * np.exp(-2j * np.pi * f * t), t)) ** 2
    return out
