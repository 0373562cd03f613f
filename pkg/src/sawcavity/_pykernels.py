"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` one for one and are used when the compiled
extension is unavailable (or forced via ``SAWCAVITY_PURE_PYTHON=1``).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _rotation(app, aqq, apq):
    diff = aqq - app
    if 2.0 * abs(apq) < 1e-150 * abs(diff):
        # small-angle limit, avoids overflow of tau
        t = apq / diff
        c = 1.0 / np.sqrt(1.0 + t * t)
        return c, t * c
    tau = diff / (2.0 * apq)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def _sumsq(values, skip_diagonal=False, n=0):
    # sequential summation, same order as the compiled kernel
    acc = 0.0
    for k, x in enumerate(values):
        if skip_diagonal and k % (n + 1) == 0:
            continue
        acc += x * x
    return acc


def jacobi_eigh(h, tol=1e-13, max_sweeps=100):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues ascending,
    eigenvectors as columns, and each column's largest-magnitude entry positive.
    """
    a = np.array(h, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    v = np.eye(n)
    norm = np.sqrt(_sumsq(a.ravel().tolist()))
    sweeps = 0
    if n > 1 and norm > 0.0:
        target = tol * norm
        while True:
            off = np.sqrt(_sumsq(a.ravel().tolist(), True, n))
            if off < target or sweeps >= max_sweeps:
                break
            sweeps += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    c, s = _rotation(a[p, p], a[q, q], apq)
                    colp = a[:, p].copy()
                    a[:, p] = c * colp - s * a[:, q]
                    a[:, q] = s * colp + c * a[:, q]
                    rowp = a[p, :].copy()
                    a[p, :] = c * rowp - s * a[q, :]
                    a[q, :] = s * rowp + c * a[q, :]
                    a[p, q] = a[q, p] = 0.0
                    vp = v[:, p].copy()
                    v[:, p] = c * vp - s * v[:, q]
                    v[:, q] = s * vp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(n):
        if v[np.argmax(np.abs(v[:, k])), k] < 0.0:
            v[:, k] = -v[:, k]
    return w, v, sweeps


def lorentzian_s11(freqs, centers, kappa_in, kappa_ex):
    """Single-port reflection of modes sharing one external port (all in Hz).

    With ``S = sum kex / (i (f - fm) + kin / 2)`` the reflection is
    ``(1 - S/2) / (1 + S/2)``. For one mode this is exactly
    ``1 - kex / (i (f - fm) + (kin + kex) / 2)``; for several modes it keeps
    the port-mediated cross terms, so ``|s11| <= 1`` holds everywhere.
    """
    f = np.asarray(freqs, dtype=float)[:, None]
    centers = np.asarray(centers, dtype=float)[None, :]
    kin = np.asarray(kappa_in, dtype=float)[None, :]
    kex = np.asarray(kappa_ex, dtype=float)[None, :]
    active = kex[0] != 0.0
    d = f - centers[:, active]
    half = 0.5 * kin[:, active]
    den = d * d + half * half
    with np.errstate(divide="ignore", invalid="ignore"):
        sr = (kex[:, active] * half / den).sum(axis=1)
        si = (-kex[:, active] * d / den).sum(axis=1)
        total = sr + 1j * si
        out = (1.0 - 0.5 * total) / (1.0 + 0.5 * total)
    out[~np.isfinite(total)] = -1.0
    return out


def arrow_rates(vecs, amplitudes, kappa_in, kappa0, gamma):
    """Hybridized (external, internal) loss rates for each eigenvector column."""
    n = len(amplitudes)
    if vecs.shape[0] != n + 1 or len(kappa_in) != n:
        raise ValueError("shape mismatch between eigenvectors and mode rates")
    proj = amplitudes @ vecs[:n, :]
    kex = kappa0 * proj * proj
    kin = kappa_in @ (vecs[:n, :] ** 2) + gamma * vecs[n, :] ** 2
    return kex, kin


def flux_map_abs(freqs, mode_freqs, kappa_in, amplitudes, couplings, kappa0, gamma, qubit_freqs, tol=1e-13):
    """|s11| for every qubit frequency (rows) over the frequency grid (columns)."""
    mode_freqs = np.asarray(mode_freqs, dtype=float)
    kappa_in = np.asarray(kappa_in, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    couplings = np.asarray(couplings, dtype=float)
    n = len(mode_freqs)
    out = np.empty((len(qubit_freqs), len(freqs)))
    ref = sum(mode_freqs.tolist()) / n if n else 0.0
    for row, wq in enumerate(qubit_freqs):
        h = np.zeros((n + 1, n + 1))
        h[np.arange(n), np.arange(n)] = mode_freqs - ref
        h[n, n] = wq - ref
        h[:n, n] = couplings
        h[n, :n] = couplings
        w, v, _ = jacobi_eigh(h, tol)
        kex, kin = arrow_rates(v, amplitudes, kappa_in, kappa0, gamma)
        out[row] = np.abs(lorentzian_s11(freqs, w + ref, kin, kex))
    return out
