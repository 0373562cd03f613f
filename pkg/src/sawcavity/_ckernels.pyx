# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: cyclic Jacobi, Lorentzian reflection sums, flux maps.

Same signatures and results as ``_pykernels``; the GIL is released inside the
loops so that callers can split flux maps over threads.
"""

import numpy as np
from libc.math cimport sqrt, fabs, hypot

NAME = "cython"


cdef void _rotation(double app, double aqq, double apq, double* c, double* s) noexcept nogil:
    cdef double diff = aqq - app
    cdef double tau, t
    if 2.0 * fabs(apq) < 1e-150 * fabs(diff):
        # small-angle limit, avoids overflow of tau
        t = apq / diff
        c[0] = 1.0 / sqrt(1.0 + t * t)
        s[0] = t * c[0]
        return
    tau = diff / (2.0 * apq)
    if tau >= 0.0:
        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
    c[0] = 1.0 / sqrt(1.0 + t * t)
    s[0] = t * c[0]


cdef int _jacobi(double[:, ::1] a, double[:, ::1] v, double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p, q
    cdef double norm = 0.0, off, c, s, x, y
    cdef int sweeps = 0
    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0
            norm += a[i, j] * a[i, j]
    norm = sqrt(norm)
    if n < 2 or norm == 0.0:
        return 0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if sqrt(off) < tol * norm or sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                _rotation(a[p, p], a[q, q], a[p, q], &c, &s)
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    return sweeps


cdef void _sort_and_sign(double[:, ::1] a, double[:, ::1] v, double[::1] w, double[:, ::1] vout) noexcept nogil:
    # insertion sort on the diagonal; stable, n is small
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, best
    cdef double key, big, sign
    cdef Py_ssize_t idx[256]
    for i in range(n):
        idx[i] = i
    for i in range(1, n):
        k = idx[i]
        key = a[k, k]
        j = i - 1
        while j >= 0 and a[idx[j], idx[j]] > key:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = k
    for i in range(n):
        k = idx[i]
        w[i] = a[k, k]
        best = 0
        big = -1.0
        for j in range(n):
            if fabs(v[j, k]) > big:
                big = fabs(v[j, k])
                best = j
        sign = -1.0 if v[best, k] < 0.0 else 1.0
        for j in range(n):
            vout[j, i] = sign * v[j, k]


def jacobi_eigh(h, double tol=1e-13, int max_sweeps=100):
    """Cyclic Jacobi diagonalization; see ``_pykernels.jacobi_eigh``."""
    cdef double[:, ::1] a = np.array(h, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > 256:
        raise ValueError("compiled Jacobi kernel supports n <= 256")
    vraw = np.empty((n, n))
    w = np.empty(n)
    vout = np.empty((n, n))
    cdef double[:, ::1] vr = vraw
    cdef double[::1] wv = w
    cdef double[:, ::1] vo = vout
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(a, vr, tol, max_sweeps)
        _sort_and_sign(a, vr, wv, vo)
    return w, vout, sweeps


cdef void _s11_row(double[::1] freqs, double[::1] centers, double[::1] kin, double[::1] kex,
                   double[::1] re, double[::1] im) noexcept nogil:
    # s = (1 - S/2) / (1 + S/2),  S = sum kex / (i d + kin / 2)
    cdef Py_ssize_t nf = freqs.shape[0]
    cdef Py_ssize_t nm = centers.shape[0]
    cdef Py_ssize_t i, m
    cdef double d, half, den, sr, si, nr, dr, dd, ratio
    cdef bint pole
    for i in range(nf):
        sr = 0.0
        si = 0.0
        pole = False
        for m in range(nm):
            if kex[m] == 0.0:
                continue
            d = freqs[i] - centers[m]
            half = 0.5 * kin[m]
            den = d * d + half * half
            if den == 0.0:
                pole = True
                break
            sr += kex[m] * half / den
            si -= kex[m] * d / den
        if pole:
            re[i] = -1.0
            im[i] = 0.0
            continue
        nr = 1.0 - 0.5 * sr
        dr = 1.0 + 0.5 * sr
        si = 0.5 * si
        # (nr - i si) / (dr + i si) by Smith's method, safe for huge S
        if fabs(dr) >= fabs(si):
            ratio = si / dr
            dd = dr + si * ratio
            re[i] = (nr - si * ratio) / dd
            im[i] = (-si - nr * ratio) / dd
        else:
            ratio = dr / si
            dd = dr * ratio + si
            re[i] = (nr * ratio - si) / dd
            im[i] = (-si * ratio - nr) / dd


def lorentzian_s11(freqs, centers, kappa_in, kappa_ex):
    """Single-port reflection; see ``_pykernels.lorentzian_s11``."""
    cdef double[::1] f = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(centers, dtype=np.float64)
    cdef double[::1] ki = np.ascontiguousarray(kappa_in, dtype=np.float64)
    cdef double[::1] ke = np.ascontiguousarray(kappa_ex, dtype=np.float64)
    re = np.empty(f.shape[0])
    im = np.empty(f.shape[0])
    cdef double[::1] rv = re
    cdef double[::1] iv = im
    with nogil:
        _s11_row(f, c, ki, ke, rv, iv)
    return re + 1j * im


cdef void _rates(double[:, ::1] vecs, double[::1] amp, double[::1] kin, double kappa0, double gamma,
                 double[::1] kex_out, double[::1] kin_out) noexcept nogil:
    cdef Py_ssize_t n = amp.shape[0]
    cdef Py_ssize_t m, k
    cdef double proj, acc
    for m in range(n + 1):
        proj = 0.0
        acc = 0.0
        for k in range(n):
            proj += amp[k] * vecs[k, m]
            acc += kin[k] * vecs[k, m] * vecs[k, m]
        kex_out[m] = kappa0 * proj * proj
        kin_out[m] = acc + gamma * vecs[n, m] * vecs[n, m]


def arrow_rates(vecs, amplitudes, kappa_in, double kappa0, double gamma):
    """Hybridized (external, internal) loss rates; see ``_pykernels.arrow_rates``."""
    cdef double[:, ::1] v = np.ascontiguousarray(vecs, dtype=np.float64)
    cdef double[::1] a = np.ascontiguousarray(amplitudes, dtype=np.float64)
    cdef double[::1] ki = np.ascontiguousarray(kappa_in, dtype=np.float64)
    if v.shape[0] != a.shape[0] + 1 or ki.shape[0] != a.shape[0]:
        raise ValueError("shape mismatch between eigenvectors and mode rates")
    kex = np.empty(v.shape[1])
    kin = np.empty(v.shape[1])
    cdef double[::1] kev = kex
    cdef double[::1] kiv = kin
    with nogil:
        _rates(v, a, ki, kappa0, gamma, kev, kiv)
    return kex, kin


def flux_map_abs(freqs, mode_freqs, kappa_in, amplitudes, couplings, double kappa0, double gamma,
                 qubit_freqs, double tol=1e-13):
    """|s11| map over qubit frequencies x grid; see ``_pykernels.flux_map_abs``."""
    cdef double[::1] f = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef double[::1] wm = np.ascontiguousarray(mode_freqs, dtype=np.float64)
    cdef double[::1] ki = np.ascontiguousarray(kappa_in, dtype=np.float64)
    cdef double[::1] amp = np.ascontiguousarray(amplitudes, dtype=np.float64)
    cdef double[::1] g = np.ascontiguousarray(couplings, dtype=np.float64)
    cdef double[::1] wq = np.ascontiguousarray(qubit_freqs, dtype=np.float64)
    cdef Py_ssize_t n = wm.shape[0]
    cdef Py_ssize_t nq = wq.shape[0]
    cdef Py_ssize_t nf = f.shape[0]
    if n + 1 > 256:
        raise ValueError("compiled flux-map kernel supports at most 255 modes")
    out = np.empty((nq, nf))
    cdef double[:, ::1] o = out
    cdef double[:, ::1] h = np.empty((n + 1, n + 1))
    cdef double[:, ::1] vr = np.empty((n + 1, n + 1))
    cdef double[:, ::1] vs = np.empty((n + 1, n + 1))
    cdef double[::1] w = np.empty(n + 1)
    cdef double[::1] kex = np.empty(n + 1)
    cdef double[::1] kin = np.empty(n + 1)
    cdef double[::1] re = np.empty(nf)
    cdef double[::1] im = np.empty(nf)
    cdef double ref = 0.0
    cdef Py_ssize_t row, i, j
    with nogil:
        for i in range(n):
            ref += wm[i]
        if n > 0:
            ref /= n
        for row in range(nq):
            for i in range(n + 1):
                for j in range(n + 1):
                    h[i, j] = 0.0
            for i in range(n):
                h[i, i] = wm[i] - ref
                h[i, n] = g[i]
                h[n, i] = g[i]
            h[n, n] = wq[row] - ref
            _jacobi(h, vr, tol, 100)
            _sort_and_sign(h, vr, w, vs)
            for i in range(n + 1):
                w[i] += ref
            _rates(vs, amp, ki, kappa0, gamma, kex, kin)
            _s11_row(f, w, kin, kex, re, im)
            for i in range(nf):
                o[row, i] = hypot(re[i], im[i])
    return out
