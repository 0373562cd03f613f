"""One-port reflection spectra of the bare and qubit-hybridized SAW cavity."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import AcousticMode, AcousticModeSet, ModeKind, ModelError, qubit_frequency
from .io import read_table, write_table
from .spectral import EigenSystem, mode_couplings

SPECTRUM_HEADER = ["frequency", "re_s11", "im_s11", "abs_s11"]
FLUX_HEADER = ["current", "frequency", "abs_s11"]


def external_amplitude(m: int, f_m: float, kappa0: float, phi_c: float, N_c: int, f_c: float):
    """Cavity-IDT overlap of mode index ``m`` and its external loss rate.

    ``a_m = sin(m pi / 2 + phi_c) sinc(pi N_c (f_m - f_c) / f_c)`` with the
    unnormalized sinc, and ``kappa_ex = kappa0 a_m^2``.
    """
    if N_c < 1:
        raise ModelError("N_c must be >= 1")
    a = math.sin(m * math.pi / 2 + phi_c) * float(np.sinc(N_c * (f_m - f_c) / f_c))
    return a, kappa0 * a * a


def synthesize_mode_set(
    n_longitudinal=11,
    center_label=6,
    center_frequency=4.253e9,
    fsr=4.8e6,
    mirror_bandwidth=50e6,
    kappa_longitudinal=200e3,
    kappa_transverse=400e3,
    transverse_parents=(4, 5, 6, 7, 8, 9),
    transverse_offset=1.5e6,
    transverse_amplitude_ratio=0.35,
    kappa0=178.2e3,
    phi_c=math.pi / 4 - 0.09,
    N_c=60,
    idt_frequency=None,
    label_offset=2,
) -> AcousticModeSet:
    """Equally spaced longitudinal modes labelled ``1..n`` plus transverse satellites.

    Mode ``center_label`` sits at ``center_frequency``; transverse modes sit
    ``transverse_offset`` above their parent with amplitude scaled by
    ``transverse_amplitude_ratio``.
    """
    f_idt = center_frequency if idt_frequency is None else idt_frequency
    modes = []
    amp = {}
    for label in range(1, n_longitudinal + 1):
        f = center_frequency + (label - center_label) * fsr
        a, _ = external_amplitude(label + label_offset, f, kappa0, phi_c, N_c, f_idt)
        amp[label] = (f, a)
        modes.append(AcousticMode(label, ModeKind.LONGITUDINAL, f, kappa_longitudinal, a))
    for label in transverse_parents:
        if label not in amp:
            raise ModelError(f"transverse parent {label} is not a longitudinal label")
        f, a = amp[label]
        modes.append(AcousticMode(label, ModeKind.TRANSVERSE, f + transverse_offset, kappa_transverse,
                                  transverse_amplitude_ratio * a))
    return AcousticModeSet(tuple(modes), fsr, center_frequency, mirror_bandwidth, kappa0)


@dataclass
class ReflectionSpectrum:
    frequencies: np.ndarray
    s11: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.s11)

    def to_csv(self, path):
        s = self.s11
        return write_table(path, SPECTRUM_HEADER, [self.frequencies, s.real, s.imag, np.abs(s)])

    @classmethod
    def from_csv(cls, path) -> "ReflectionSpectrum":
        header, cols = read_table(path)
        if header[:3] != SPECTRUM_HEADER[:3]:
            raise ValueError(f"{path}: not a spectrum CSV (header {header})")
        return cls(cols["frequency"], cols["re_s11"] + 1j * cols["im_s11"], {"source": str(path)})


@dataclass
class FluxSweepMap:
    currents: np.ndarray
    frequencies: np.ndarray
    magnitude: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.currents = np.asarray(self.currents, dtype=float)
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.magnitude = np.asarray(self.magnitude, dtype=float)
        if self.magnitude.shape != (len(self.currents), len(self.frequencies)):
            raise ModelError("flux map shape does not match its axes")

    def to_csv(self, path):
        cur = np.repeat(self.currents, len(self.frequencies))
        freq = np.tile(self.frequencies, len(self.currents))
        return write_table(path, FLUX_HEADER, [cur, freq, self.magnitude.ravel()])

    @classmethod
    def from_csv(cls, path) -> "FluxSweepMap":
        header, cols = read_table(path)
        if header != FLUX_HEADER:
            raise ValueError(f"{path}: not a flux-map CSV (header {header})")
        currents, ci = np.unique(cols["current"], return_inverse=True)
        freqs, fi = np.unique(cols["frequency"], return_inverse=True)
        mag = np.full((len(currents), len(freqs)), np.nan)
        mag[ci, fi] = cols["abs_s11"]
        if np.isnan(mag).any():
            raise ValueError(f"{path}: flux map is not a complete grid")
        return cls(currents, freqs, mag, {"source": str(path)})


def _check_rates(*rates):
    for r in rates:
        if np.any(np.asarray(r) < 0):
            raise ModelError("loss rates must be non-negative")


def bare_reflection(grid, modes: AcousticModeSet, kappa0: float | None = None) -> ReflectionSpectrum:
    """Reflection with the qubit absent (or far detuned)."""
    grid = np.asarray(grid, dtype=float)
    k0 = modes.kappa0 if kappa0 is None else kappa0
    kin = modes.kappa_internal
    kex = k0 * modes.external_amplitudes ** 2
    _check_rates(kin, kex)
    s = kernels.lorentzian_s11(grid, modes.frequencies, kin, kex)
    return ReflectionSpectrum(grid, s, {"kind": "bare", "kappa0": k0})


def hybridized_reflection(grid, es: EigenSystem, rates) -> ReflectionSpectrum:
    """Reflection from the eigenmodes with their hybridized ``(kex, kin)`` rates."""
    kex, kin = (np.asarray(r, dtype=float) for r in rates)
    if len(kex) != es.dimension or len(kin) != es.dimension:
        raise ModelError("rates are not aligned with the eigenvalues")
    _check_rates(kin, kex)
    grid = np.asarray(grid, dtype=float)
    s = kernels.lorentzian_s11(grid, es.eigenvalues, kin, kex)
    return ReflectionSpectrum(grid, s, {"kind": "hybridized"})


def default_workers() -> int:
    return os.cpu_count() or 1


def sweep_qubit_frequencies(qubit_freqs, grid, modes: AcousticModeSet, couplings, gamma, workers=None) -> np.ndarray:
    """|s11| rows for an array of qubit frequencies (the hot loop of every flux map)."""
    wq = np.asarray(qubit_freqs, dtype=float)
    bad = np.flatnonzero(~np.isfinite(wq))
    if bad.size:
        raise ModelError(f"point {bad[0]}: qubit frequency is not finite")
    grid = np.asarray(grid, dtype=float)
    args = (grid, modes.frequencies, modes.kappa_internal, modes.external_amplitudes,
            np.asarray(couplings, dtype=float), modes.kappa0, gamma)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(wq) < 2 * workers:
        return kernels.flux_map_abs(*args, wq)
    chunks = np.array_split(wq, workers)
    with ThreadPoolExecutor(workers) as pool:
        rows = list(pool.map(lambda c: kernels.flux_map_abs(*args, c), chunks))
    return np.vstack(rows)


def flux_sweep(currents, grid, device, workers=None) -> FluxSweepMap:
    """Model |s11| versus coil current and probe frequency.

    ``device`` needs ``modes``, ``transmon`` and ``coupling`` attributes.
    """
    currents = np.asarray(currents, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if currents.size == 0 or grid.size == 0:
        raise ModelError("flux sweep axes must be non-empty")
    wq = np.atleast_1d(qubit_frequency(currents, device.transmon))
    g = mode_couplings(device.modes, device.coupling)
    mag = sweep_qubit_frequencies(wq, grid, device.modes, g, device.transmon.gamma_intrinsic, workers)
    return FluxSweepMap(currents, grid, mag, {"backend": kernels.BACKEND})


def flux_to_current(flux, transmon) -> np.ndarray:
    """Coil current for a flux bias given in flux quanta."""
    return transmon.Ib + np.asarray(flux, dtype=float) * transmon.I0
