"""Least-squares estimation of cavity and coupling parameters from spectra.

The bare-mode fit runs in two stages: every dip is fitted to a one-port
resonance, then the external rates of the longitudinal modes are fitted to
the cavity-IDT overlap pattern. The flux-map fit adjusts ``g0``, ``phi_q``
and the current offset ``Ib`` of the hybridized model against |s11|.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.signal import find_peaks
from scipy.ndimage import uniform_filter1d

from . import kernels
from .core import (AcousticMode, AcousticModeSet, CouplingParams, ModeKind, ModelError, TransmonParams,
                   qubit_frequency)
from .reflection import FluxSweepMap, ReflectionSpectrum, external_amplitude, sweep_qubit_frequencies
from .spectral import mode_couplings


class FitError(ModelError):
    pass


class RankError(FitError):
    """Design matrix is rank deficient (e.g. repeated abscissae)."""


class FitWarning(UserWarning):
    pass


# --------------------------------------------------------------------------- solver


@dataclass
class SolverResult:
    x: np.ndarray
    residual: np.ndarray
    jac: np.ndarray | None
    cost_history: list
    iterations: int
    converged: bool
    method: str
    message: str


def numerical_jacobian(fun, x, typical, rel_step=1e-6):
    """Central-difference Jacobian with step ``rel_step * max(|x|, typical)``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        h = rel_step * max(abs(x[i]), typical[i])
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((fun(xp) - fun(xm)) / (2 * h))
    return np.column_stack(cols)


def _clip(x, lower, upper):
    return np.minimum(np.maximum(x, lower), upper)


def _cost(r):
    return float(r @ r)


def levenberg_marquardt(fun, x0, *, typical=None, lower=None, upper=None, max_iter=100,
                        ftol=1e-12, xtol=1e-10, rel_step=1e-6, damping=1e-3, rcond=1e-10,
                        fallback=True) -> SolverResult:
    """Minimize ``||fun(x)||^2`` by damped Gauss-Newton with Marquardt scaling.

    Only steps that lower the cost are accepted, so ``cost_history`` is
    non-increasing. Bounds are enforced by projection. If the scaled Jacobian
    has condition number above ``1/rcond`` the search switches to Nelder-Mead.
    """
    x = np.asarray(x0, dtype=float).copy()
    n = len(x)
    typical = np.ones(n) if typical is None else np.asarray(typical, dtype=float)
    lower = np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)
    x = _clip(x, lower, upper)
    r = fun(x)
    if not np.all(np.isfinite(r)):
        raise FitError("residuals are not finite at the starting point")
    cost = _cost(r)
    history = [cost]
    lam = damping
    J = None
    for it in range(1, max_iter + 1):
        J = numerical_jacobian(fun, x, typical, rel_step)
        colnorm = np.linalg.norm(J, axis=0)
        sv = np.linalg.svd(J / np.where(colnorm > 0, colnorm, 1.0), compute_uv=False)
        if colnorm.min() == 0 or len(sv) < n or sv[-1] < rcond * sv[0]:
            if not fallback:
                return SolverResult(x, r, J, history, it, False, "levenberg-marquardt", "rank-deficient Jacobian")
            nm = nelder_mead(fun, x, typical=typical, lower=lower, upper=upper)
            nm.cost_history = history + nm.cost_history[1:]
            nm.iterations += it
            nm.message = "rank-deficient Jacobian; " + nm.message
            return nm
        A = J.T @ J
        g = J.T @ r
        D = np.diag(A).copy()
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(D), -g)
            except np.linalg.LinAlgError:
                lam *= 4
                continue
            xt = _clip(x + step, lower, upper)
            rt = fun(xt)
            ct = _cost(rt) if np.all(np.isfinite(rt)) else np.inf
            if ct < cost:
                accepted = True
                break
            lam *= 4
        if not accepted:
            return SolverResult(x, r, J, history, it, True, "levenberg-marquardt", "no further decrease possible")
        dx = xt - x
        rel_drop = (cost - ct) / cost if cost > 0 else 0.0
        x, r, cost = xt, rt, ct
        history.append(cost)
        lam = max(lam / 3, 1e-12)
        if cost == 0 or rel_drop < ftol or np.all(np.abs(dx) <= xtol * (np.abs(x) + typical)):
            J = numerical_jacobian(fun, x, typical, rel_step)
            return SolverResult(x, r, J, history, it, True, "levenberg-marquardt", "converged")
    return SolverResult(x, r, J, history, max_iter, False, "levenberg-marquardt", "iteration limit reached")


def nelder_mead(fun, x0, *, typical, lower, upper, max_iter=4000) -> SolverResult:
    """Simplex search on ``||fun(x)||^2`` in coordinates scaled by ``typical``."""
    typical = np.asarray(typical, dtype=float)
    history = []

    def cost(z):
        r = fun(z * typical)
        c = _cost(r) if np.all(np.isfinite(r)) else np.inf
        return c

    def record(zk):
        c = cost(zk)
        history.append(min(c, history[-1]) if history else c)

    z0 = np.asarray(x0, dtype=float) / typical
    history.append(cost(z0))
    bounds = list(zip(lower / typical, upper / typical))
    res = minimize(cost, z0, method="Nelder-Mead", bounds=bounds, callback=record,
                   options={"maxiter": max_iter, "xatol": 1e-9, "fatol": 1e-14 * max(history[0], 1e-300)})
    x = _clip(res.x * typical, lower, upper)
    r = fun(x)
    return SolverResult(x, r, numerical_jacobian(fun, x, typical), history, int(res.nit), bool(res.success), "nelder-mead", str(res.message))


def standard_errors(jac, residual, n_params) -> np.ndarray:
    """``sqrt(diag(s^2 (J^T J)^+))`` with ``s^2 = ||r||^2 / (N - p)``."""
    if jac is None:
        return np.full(n_params, np.nan)
    dof = max(len(residual) - n_params, 1)
    s2 = _cost(residual) / dof
    # equilibrate columns so pinv does not truncate badly scaled directions
    norm = np.linalg.norm(jac, axis=0)
    dead = norm == 0
    norm = np.where(dead, 1.0, norm)
    js = jac / norm
    cov = s2 * np.linalg.pinv(js.T @ js) / np.outer(norm, norm)
    err = np.sqrt(np.clip(np.diag(cov), 0, None))
    err[dead] = np.nan
    return err


def conditional_error(fun, x, i, typical, lower, upper, s2, max_scale=1e3) -> float:
    """Half-width along coordinate ``i`` where the cost rises by ``s2``.

    Used where the Jacobian cannot give an error (parameter on a bound or
    locally flat). Returns ``inf`` if the cost never rises that far.
    """
    x = np.asarray(x, dtype=float)
    c0 = _cost(fun(x))

    def rise(t):
        xt = x.copy()
        xt[i] = min(max(x[i] + t, lower[i]), upper[i])
        return _cost(fun(xt)) - c0 - s2

    widths = []
    for sign in (1.0, -1.0):
        if (sign > 0 and x[i] >= upper[i]) or (sign < 0 and x[i] <= lower[i]):
            continue
        t = sign * 1e-3 * typical[i]
        while abs(t) <= max_scale * typical[i] and rise(t) < 0:
            t *= 2
        if abs(t) > max_scale * typical[i]:
            widths.append(np.inf)
            continue
        widths.append(abs(brentq(rise, 0.0, t, xtol=1e-4 * abs(t))))
    return float(min(widths)) if widths else np.inf


# --------------------------------------------------------------------------- result


@dataclass
class FitResult:
    """Named estimates ``parameters[name] = (value, stderr)`` plus diagnostics."""

    parameters: dict
    residual_norm: float
    iterations: int
    converged: bool
    method: str = "levenberg-marquardt"
    message: str = ""
    cost_history: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if not math.isfinite(self.residual_norm):
            raise FitError("residual norm is not finite")

    def value(self, name: str) -> float:
        return self.parameters[name][0]

    def stderr(self, name: str) -> float:
        return self.parameters[name][1]

    def to_dict(self) -> dict:
        return {
            "parameters": {k: {"value": float(v), "stderr": float(e)} for k, (v, e) in self.parameters.items()},
            "residual_norm": float(self.residual_norm),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "method": self.method,
            "message": self.message,
            "cost_history": [float(c) for c in self.cost_history],
            "details": self.details,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        params = {k: (v["value"], v["stderr"]) for k, v in d["parameters"].items()}
        return cls(params, d["residual_norm"], d["iterations"], d["converged"], d.get("method", ""),
                   d.get("message", ""), d.get("cost_history", []), d.get("details", {}), d.get("warnings", []))


def _result(names, sol: SolverResult, offsets=None, details=None, warns=None, fun=None, typical=None,
            lower=None, upper=None) -> FitResult:
    offsets = np.zeros(len(names)) if offsets is None else np.asarray(offsets)
    err = standard_errors(sol.jac, sol.residual, len(names))
    if fun is not None and not np.all(np.isfinite(err)):
        n = len(names)
        lower = np.full(n, -np.inf) if lower is None else lower
        upper = np.full(n, np.inf) if upper is None else upper
        s2 = _cost(sol.residual) / max(len(sol.residual) - n, 1)
        for i in np.flatnonzero(~np.isfinite(err)):
            err[i] = conditional_error(fun, sol.x, i, typical, lower, upper, s2)
    params = {k: (float(sol.x[i] + offsets[i]), float(err[i])) for i, k in enumerate(names)}
    return FitResult(params, math.sqrt(_cost(sol.residual)), sol.iterations, sol.converged, sol.method,
                     sol.message, list(sol.cost_history), details or {}, warns or [])


# --------------------------------------------------------------------------- noise


def add_noise(values, level: float, rng: np.random.Generator):
    """Multiplicative Gaussian noise of relative rms ``level``; complex input gets complex noise."""
    values = np.asarray(values)
    if level < 0:
        raise ValueError("noise level must be >= 0")
    if np.iscomplexobj(values):
        n = (rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)) / math.sqrt(2)
    else:
        n = rng.standard_normal(values.shape)
    return values * (1 + level * n)


# --------------------------------------------------------------------------- bare modes


def detect_dips(frequencies, s11, prominence=0.02, smooth_hz=30e3):
    """Indices, prominences and widths (Hz) of the dips of |s11|."""
    f = np.asarray(frequencies, dtype=float)
    mag = np.abs(np.asarray(s11))
    if len(f) < 3:
        raise FitError("spectrum is too short")
    df = (f[-1] - f[0]) / (len(f) - 1)
    size = max(1, int(round(smooth_hz / df)))
    y = uniform_filter1d(1 - mag, size, mode="nearest")
    idx, props = find_peaks(y, prominence=prominence, width=1, rel_height=0.5)
    return idx, props["prominences"], props["widths"] * df


def _dip_guess(f, s, i, width):
    s0 = s[i]
    d = min(abs(s0), 0.99)
    kappa = max(width, 4 * (f[1] - f[0]))
    # s(f_m) = (kin - kex) / (kin + kex) is real: its sign fixes which rate is larger
    kex = kappa * (1 - d) / 2 if s0.real >= 0 else kappa * (1 + d) / 2
    return f[i], kappa - kex, kex


def fit_dips(spectrum: ReflectionSpectrum, prominence=0.02, max_iter=100, min_dips=3):
    """Stage 1: joint fit of every detected dip to a one-port resonance.

    Returns ``(table, solver_result, warnings)`` where ``table`` has columns
    frequency, kappa_internal, kappa_external and their standard errors.
    """
    f = np.asarray(spectrum.frequencies, dtype=float)
    s = np.asarray(spectrum.s11, dtype=complex)
    idx, prom, widths = detect_dips(f, s, prominence)
    if len(idx) < min_dips:
        raise FitError(f"found {len(idx)} resolvable dips, need at least {min_dips}")
    warns = []
    guess = np.array([_dip_guess(f, s, i, w) for i, w in zip(idx, widths)])
    order = np.argsort(guess[:, 0])
    guess = guess[order]
    gaps = np.diff(guess[:, 0])
    kap = guess[:, 1] + guess[:, 2]
    close = np.flatnonzero(gaps < 0.5 * (kap[:-1] + kap[1:]))
    for k in close:
        msg = f"dips at {guess[k, 0]:.6g} Hz and {guess[k + 1, 0]:.6g} Hz overlap"
        warns.append(msg)
        warnings.warn(msg, FitWarning, stacklevel=2)
    f0 = guess[:, 0]
    n = len(f0)
    # parameters: frequency offsets, log rates
    x0 = np.concatenate([np.zeros(n), np.log(guess[:, 1]), np.log(guess[:, 2])])
    typical = np.concatenate([kap, np.ones(2 * n)])

    def resid(x):
        centers = f0 + x[:n]
        model = kernels.lorentzian_s11(f, centers, np.exp(x[n:2 * n]), np.exp(x[2 * n:]))
        d = model - s
        return np.concatenate([d.real, d.imag])

    sol = levenberg_marquardt(resid, x0, typical=typical, max_iter=max_iter, ftol=1e-13)
    err = standard_errors(sol.jac, sol.residual, len(x0))
    kin, kex = np.exp(sol.x[n:2 * n]), np.exp(sol.x[2 * n:])
    table = {
        "frequency": f0 + sol.x[:n],
        "kappa_internal": kin,
        "kappa_external": kex,
        "frequency_stderr": err[:n],
        "kappa_internal_stderr": kin * err[n:2 * n],
        "kappa_external_stderr": kex * err[2 * n:],
    }
    return table, sol, warns


def assign_labels(freqs, kappa_ex, first_label=1, longitudinal_fraction=0.3):
    """Split dips into longitudinal (strong) and transverse (weak) modes and label them.

    Longitudinal labels count FSR steps from the lowest strong dip. Each weak
    dip takes the label of the nearest longitudinal mode below it.
    Returns ``(labels, is_longitudinal, fsr_estimate)``.
    """
    freqs = np.asarray(freqs, dtype=float)
    kex = np.asarray(kappa_ex, dtype=float)
    strong = kex >= longitudinal_fraction * kex.max()
    fl = freqs[strong]
    if len(fl) < 2:
        raise FitError("fewer than two longitudinal modes found")
    fsr_est = float(np.median(np.diff(fl)))
    labels = np.empty(len(freqs), dtype=int)
    labels[strong] = first_label + np.rint((fl - fl[0]) / fsr_est).astype(int)
    for k in np.flatnonzero(~strong):
        below = np.flatnonzero(strong & (freqs < freqs[k]))
        labels[k] = labels[below[-1]] if below.size else first_label - 1
    return labels, strong, fsr_est


def kappa_ex_pattern(m, freqs, kappa0, phi_c, f_c, N_c):
    """External rate ``kappa0 [sin(m pi/2 + phi_c) sinc(N_c (f - f_c)/f_c)]^2`` (vectorized)."""
    m = np.asarray(m, dtype=float)
    a = np.sin(m * np.pi / 2 + phi_c) * np.sinc(N_c * (np.asarray(freqs) - f_c) / f_c)
    return kappa0 * a * a


def fit_overlap_pattern(m, freqs, kappa_ex, N_c=60, max_iter=200, f_c_guess=None):
    """Stage 2: fit ``(kappa0, phi_c, f_c)`` to the longitudinal external rates.

    ``phi_c`` is confined to ``(0, pi/2)``: the rates only fix it up to sign and
    a shift by ``pi``.
    """
    m = np.asarray(m)
    freqs = np.asarray(freqs, dtype=float)
    kex = np.asarray(kappa_ex, dtype=float)
    if len(m) < 3:
        raise FitError("need at least three longitudinal modes")
    even = kex[m % 2 == 0]
    odd = kex[m % 2 == 1]
    if even.size == 0 or odd.size == 0:
        raise FitError("need both even and odd modes to separate kappa0 and phi_c")
    phi0 = math.atan(math.sqrt(even.mean() / odd.mean()))
    k00 = even.mean() + odd.mean()
    fc0 = float(np.sum(freqs * kex) / np.sum(kex)) if f_c_guess is None else float(f_c_guess)
    span = freqs.max() - freqs.min()
    x0 = np.array([k00, phi0, 0.0])
    typical = np.array([k00, 0.1, max(span, 1.0)])
    lower = np.array([0.0, 1e-9, -np.inf])
    upper = np.array([np.inf, math.pi / 2 - 1e-9, np.inf])

    def resid(x):
        return kappa_ex_pattern(m, freqs, x[0], x[1], fc0 + x[2], N_c) - kex

    sol = levenberg_marquardt(resid, x0, typical=typical, lower=lower, upper=upper, max_iter=max_iter,
                              ftol=1e-15)
    return _result(["kappa0", "phi_c", "f_c"], sol, offsets=[0, 0, fc0])


def fit_bare_modes(spectrum: ReflectionSpectrum, *, N_c=60, label_offset=2, first_label=1,
                   prominence=0.02, longitudinal_fraction=0.3, max_iter=100) -> FitResult:
    """Two-stage fit of a bare-cavity reflection spectrum.

    ``details["modes"]`` lists every fitted dip (label, kind, f, kappa_in,
    kappa_ex with errors); the returned parameters are ``kappa0``, ``phi_c``
    and ``f_c``.
    """
    table, sol1, warns = fit_dips(spectrum, prominence, max_iter)
    labels, strong, fsr_est = assign_labels(table["frequency"], table["kappa_external"], first_label,
                                            longitudinal_fraction)
    m = labels[strong] + label_offset
    stage2 = fit_overlap_pattern(m, table["frequency"][strong], table["kappa_external"][strong], N_c)
    modes = []
    for k in range(len(labels)):
        modes.append({
            "label": int(labels[k]),
            "kind": "longitudinal" if strong[k] else "transverse",
            **{key: float(col[k]) for key, col in table.items()},
        })
    stage2.details = {
        "modes": modes,
        "fsr_estimate": fsr_est,
        "N_c": int(N_c),
        "label_offset": int(label_offset),
        "stage1": {"residual_norm": math.sqrt(_cost(sol1.residual)), "iterations": sol1.iterations,
                   "converged": sol1.converged, "message": sol1.message},
    }
    stage2.converged = stage2.converged and sol1.converged
    stage2.iterations += sol1.iterations
    stage2.warnings = warns + stage2.warnings
    return stage2


def fitted_mode_set(result: FitResult, *, transverse_ratio=0.35, mirror_bandwidth=50e6,
                    spacing_tolerance=0.05) -> AcousticModeSet:
    """Mode table for the hybridized model from a bare-mode fit.

    Frequencies and internal rates come from stage 1; signed amplitudes come
    from the fitted overlap pattern, scaled by ``transverse_ratio`` for
    transverse modes.
    """
    kappa0, phi_c, f_c = (result.value(k) for k in ("kappa0", "phi_c", "f_c"))
    N_c = result.details["N_c"]
    offset = result.details["label_offset"]
    rows = result.details["modes"]
    amp = {}
    modes = []
    for r in rows:
        if r["kind"] == "longitudinal":
            a, _ = external_amplitude(r["label"] + offset, r["frequency"], kappa0, phi_c, N_c, f_c)
            amp[r["label"]] = a
            modes.append(AcousticMode(r["label"], ModeKind.LONGITUDINAL, r["frequency"], r["kappa_internal"], a))
    for r in rows:
        if r["kind"] == "transverse" and r["label"] in amp:
            modes.append(AcousticMode(r["label"], ModeKind.TRANSVERSE, r["frequency"], r["kappa_internal"],
                                      transverse_ratio * amp[r["label"]]))
    if not amp:
        raise FitError("fit has no longitudinal modes")
    long_f = sorted(m.frequency for m in modes if m.kind is ModeKind.LONGITUDINAL)
    center = 0.5 * (long_f[0] + long_f[-1])
    return AcousticModeSet(tuple(modes), result.details["fsr_estimate"], center, mirror_bandwidth, kappa0,
                           spacing_tolerance)


# --------------------------------------------------------------------------- flux map


FLUX_NAMES = ("g0", "phi_q", "Ib")


def _flux_model(modes, transmon, coupling, currents, grid, workers):
    def model(x):
        # spectra are unchanged by phi_q -> phi_q + pi
        c = replace(coupling, g0=abs(x[0]), phi_q=(x[1] + math.pi / 2) % math.pi - math.pi / 2)
        t = replace(transmon, Ib=x[2])
        wq = np.atleast_1d(qubit_frequency(currents, t))
        return sweep_qubit_frequencies(wq, grid, modes, mode_couplings(modes, c), t.gamma_intrinsic, workers)
    return model


def estimate_g0(data: FluxSweepMap, modes: AcousticModeSet, prominence=0.1) -> float:
    """Half the largest splitting seen around any bare longitudinal mode.

    For each mode the narrowest pair of dips straddling its bare frequency
    across all currents is taken as the splitting; the widest such splitting
    over modes is returned, halved.
    """
    fl = np.array([m.frequency for m in modes.longitudinal()])
    best = 0.0
    df = data.frequencies[1] - data.frequencies[0]
    for row in data.magnitude:
        idx, _ = find_peaks(1 - row, prominence=prominence)
        dips = data.frequencies[idx]
        if dips.size < 2:
            continue
        for f in fl:
            if np.min(np.abs(dips - f)) < 3 * modes.kappa_internal.max() + df:
                continue
            lo = dips[dips < f]
            hi = dips[dips > f]
            if lo.size and hi.size:
                best = max(best, min(hi[0] - lo[-1], modes.fsr * 2))
    return best / 2


def _crossing_current(data: FluxSweepMap, modes: AcousticModeSet, transmon: TransmonParams, bare_mag) -> float:
    dev = np.abs(data.magnitude - bare_mag).sum(axis=1)
    if not np.any(dev > 0):
        raise FitError("crossing region absent from the data window")
    w = np.clip(dev - np.median(dev), 0, None)
    if w.sum() == 0:
        w = dev
    return float(np.sum(data.currents * w) / w.sum())


def _check_window(data, modes, transmon, slack):
    lo = data.currents.min() - abs(transmon.Ib) - slack
    hi = data.currents.max() + abs(transmon.Ib) + slack
    wq = qubit_frequency(np.linspace(lo, hi, 512), replace(transmon, Ib=0.0))
    if wq.max() < modes.frequencies.min() or wq.min() > modes.frequencies.max():
        raise FitError("crossing region absent from the data window")


def estimate_offset_current(data: FluxSweepMap, modes: AcousticModeSet, transmon: TransmonParams) -> float:
    """Current offset that places the qubit at the mode-band centre at the crossing centroid."""
    bare = np.abs(kernels.lorentzian_s11(data.frequencies, modes.frequencies, modes.kappa_internal,
                                         modes.kappa_external))
    i_x = _crossing_current(data, modes, transmon, bare[None, :])
    f_mid = 0.5 * (modes.frequencies.min() + modes.frequencies.max())
    ratio = (f_mid / transmon.omega_max) ** 2
    if not 0 < ratio <= 1:
        raise FitError("mode band is above the qubit maximum frequency")
    dphi = transmon.I0 * math.acos(ratio) / math.pi
    # pick the branch closest to the configured offset
    cands = [i_x - dphi, i_x + dphi]
    return min(cands, key=lambda ib: abs(ib - transmon.Ib))


def fit_flux_map(data: FluxSweepMap, modes: AcousticModeSet, transmon: TransmonParams,
                 coupling: CouplingParams | None = None, *, g0=None, phi_q=None, Ib=None,
                 scan_halfwidth=2e-6, scan_step=25e-9, phi_steps=12, max_iter=60, workers=None) -> FitResult:
    """Fit ``(g0, phi_q, Ib)`` to a measured |s11| flux map with fixed bare modes.

    Missing starting values are estimated: ``g0`` from the splittings,
    ``Ib`` from the centroid of the crossing region, then ``(phi_q, Ib)``
    refined by a coarse scan on a subsampled map before the full fit.
    ``omega_max`` and ``I0`` stay fixed.
    """
    coupling = CouplingParams() if coupling is None else coupling
    if data.magnitude.size == 0:
        raise FitError("empty flux map")
    details = {}
    _check_window(data, modes, transmon, scan_halfwidth if Ib is None else 0.0)
    if g0 is None:
        g0 = estimate_g0(data, modes)
        details["g0_initial_estimate"] = float(g0)
        if g0 == 0:
            g0 = 0.05 * modes.fsr
    if Ib is None:
        ib_center = estimate_offset_current(data, modes, transmon)
        details["Ib_centroid_estimate"] = float(ib_center)
    if Ib is None or phi_q is None:
        rs = slice(None, None, 2)
        fs = slice(None, None, 4)
        sub = data.magnitude[rs, fs]
        model = _flux_model(modes, transmon, coupling, data.currents[rs], data.frequencies[fs], workers)
        phis = [phi_q] if phi_q is not None else list(-math.pi / 2 + math.pi * (np.arange(phi_steps) + 0.5) / phi_steps)
        ibs = [Ib] if Ib is not None else list(ib_center + np.arange(-scan_halfwidth, scan_halfwidth + scan_step / 2,
                                                                       scan_step))
        best = (np.inf, None, None)
        for ph in phis:
            for ib in ibs:
                c = _cost((model(np.array([g0, ph, ib])) - sub).ravel())
                if c < best[0]:
                    best = (c, ph, ib)
        _, phi_q, Ib = best
        details["scan_start"] = {"phi_q": float(phi_q), "Ib": float(Ib)}
    model = _flux_model(modes, transmon, coupling, data.currents, data.frequencies, workers)
    target = data.magnitude

    def resid(x):
        return (model(x) - target).ravel()

    x0 = np.array([g0, phi_q, Ib])
    typical = np.array([1e6, 0.1, 1e-7])
    lower = np.array([0.0, -np.inf, -np.inf])
    sol = levenberg_marquardt(resid, x0, typical=typical, lower=lower, max_iter=max_iter, ftol=1e-12)
    res = _result(list(FLUX_NAMES), sol, details=details, fun=resid, typical=typical, lower=lower,
                  upper=np.full(3, np.inf))
    # phi_q and phi_q + pi give identical spectra; report in (-pi/2, pi/2]
    v, e = res.parameters["phi_q"]
    res.parameters["phi_q"] = ((v + math.pi / 2) % math.pi - math.pi / 2, e)
    return res


# --------------------------------------------------------------------------- stark


def fit_stark_slope(phonons, shifts=None) -> dict:
    """Ordinary least-squares quadratic ``c + linear n + quadratic n^2``.

    Accepts two sequences or a single sequence of ``(n, shift)`` pairs.
    """
    if shifts is None:
        pairs = np.asarray(phonons, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError("expected (phonon number, shift) pairs")
        n, y = pairs[:, 0], pairs[:, 1]
    else:
        n = np.asarray(phonons, dtype=float)
        y = np.asarray(shifts, dtype=float)
    if n.shape != y.shape:
        raise ValueError("phonon numbers and shifts differ in length")
    if len(np.unique(n)) < 3:
        raise RankError("a quadratic fit needs at least three distinct phonon numbers")
    X = np.column_stack([np.ones_like(n), n, n * n])
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 3:
        raise RankError("design matrix is rank deficient")
    r = y - X @ coef
    dof = len(n) - 3
    if dof > 0:
        s2 = float(r @ r) / dof
        err = np.sqrt(np.diag(s2 * np.linalg.inv(X.T @ X)))
    else:
        err = np.zeros(3)
    return {"intercept": float(coef[0]), "linear": float(coef[1]), "quadratic": float(coef[2]),
            "intercept_stderr": float(err[0]), "linear_stderr": float(err[1]), "quadratic_stderr": float(err[2])}
