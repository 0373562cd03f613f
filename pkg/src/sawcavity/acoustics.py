"""IDT physics: qubit-mode coupling from geometry and SAW emission linewidth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as sc

from .core import ModelError, PhysicalConstants
from .spectral import ShapeError

# edge connectivity of one split-finger period (8 finger edges)
SPLIT_FINGER_PERIOD = (1, 1, -1, -1, -1, -1, 1, 1)
SPLIT_FINGER_FACTOR = (math.sin(math.pi / 8) + math.sin(3 * math.pi / 8)) / 2
SAW_CONDUCTANCE_FACTOR = 1.3


@dataclass(frozen=True)
class IdtGeometry:
    """Qubit-IDT and cavity geometry (SI units).

    Finger edges sit at ``x0 + s * (n - (8 N_q - 1) / 2)``, i.e. centred on
    ``x0``, with ``x`` measured from the left mirror node. ``connectivity``
    defaults to the split-finger pattern repeated ``N_q`` times.
    """

    N_q: int = 24
    N_c: int = 60
    finger_edge_spacing: float = 2880.0 / (8 * 4.253e9)
    x0: float = 75e-6
    W: float = 50e-6
    L_eff: float = 300e-6
    area: float | None = None
    connectivity: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.N_q < 1 or self.N_c < 1:
            raise ModelError("finger period counts must be >= 1")
        if not (self.finger_edge_spacing > 0 and self.W > 0 and self.L_eff > 0):
            raise ModelError("geometry lengths must be positive")
        if self.area is not None and not self.area > 0:
            raise ModelError("area must be positive")
        if self.connectivity is not None:
            conn = tuple(int(p) for p in self.connectivity)
            if any(abs(p) != 1 for p in conn):
                raise ModelError("connectivity entries must be +1 or -1")
            object.__setattr__(self, "connectivity", conn)

    @property
    def effective_area(self) -> float:
        return self.W * self.L_eff if self.area is None else self.area

    @property
    def idt_frequency(self) -> float:
        """Centre frequency set by the finger period (8 edges per wavelength), for v_s = 2880 m/s."""
        return idt_frequency(self)

    def edge_connectivity(self) -> np.ndarray:
        if self.connectivity is None:
            return np.tile(SPLIT_FINGER_PERIOD, self.N_q).astype(float)
        return np.asarray(self.connectivity, dtype=float)

    def finger_positions(self) -> np.ndarray:
        n = np.arange(8 * self.N_q)
        return self.x0 + self.finger_edge_spacing * (n - (8 * self.N_q - 1) / 2)


def idt_frequency(geom: IdtGeometry, v_s: float = 2880.0) -> float:
    return v_s / (8 * geom.finger_edge_spacing)


@dataclass(frozen=True)
class EnergyScales:
    """Transmon energies in Hz (E/h) and dimensionless IDT factors."""

    E_J: float = (5.08e9 + 200e6) ** 2 / (8 * 200e6)
    E_C: float = 200e6
    beta: float = 1.0
    K2: float = 7e-4
    C_IDT: float = 100e-15

    def __post_init__(self):
        if not (self.E_J > 0 and self.E_C > 0 and self.K2 > 0 and self.C_IDT > 0):
            raise ModelError("energy scales must be positive")
        if not 0 < self.beta <= 1:
            raise ModelError("beta must be in (0, 1]")

    @property
    def L_j(self) -> float:
        """Josephson inductance (H)."""
        return (sc.hbar / (2 * sc.e)) ** 2 / (sc.h * self.E_J)


def zero_point_voltage(consts: PhysicalConstants, A: float, v_s: float | None = None) -> float:
    """Surface voltage fluctuation (V) of one cavity mode of effective area ``A``."""
    v = consts.v_s if v_s is None else v_s
    return consts.e_pz / consts.epsilon * math.sqrt(consts.hbar / (2 * consts.density * v * A))


def charge_fluctuation(E_J: float, E_C: float, beta: float = 1.0, e: float = sc.e) -> float:
    """Charge fluctuation (C) across the qubit IDT."""
    if not (E_J > 0 and E_C > 0):
        raise ModelError("E_J and E_C must be positive")
    return 2 * e * beta / math.sqrt(2) * (E_J / (8 * E_C)) ** 0.25


def array_factor(m: int, geom: IdtGeometry, frequency: float | None = None, method: str = "exact",
                 v_s: float = 2880.0) -> float:
    """Overlap between the qubit-IDT finger charges and the standing wave of mode ``m``.

    ``method="exact"`` sums ``sin(k x_i) p_i / (8 N_q)`` over finger edges;
    ``method="closed"`` uses the split-finger closed form. ``frequency``
    defaults to ``m v_s / (2 L_eff)``.
    """
    f = m * v_s / (2 * geom.L_eff) if frequency is None else frequency
    if method == "exact":
        p = geom.edge_connectivity()
        x = geom.finger_positions()
        if len(p) != len(x):
            raise ShapeError(f"connectivity has {len(p)} entries for {len(x)} finger edges")
        k = 2 * math.pi * f / v_s
        return float(np.sum(np.sin(k * x) * p) / len(x))
    if method == "closed":
        fa = idt_frequency(geom, v_s)
        return (SPLIT_FINGER_FACTOR * math.sin(m * math.pi * geom.x0 / geom.L_eff)
                * float(np.sinc(geom.N_q * (fa - f) / fa)))
    raise ValueError(f"unknown method {method!r}")


def coupling_estimate(m: int, geom: IdtGeometry, scales: EnergyScales, consts: PhysicalConstants,
                      method: str = "exact") -> float:
    """First-principles signed coupling (Hz) of the qubit to mode ``m``."""
    phi0 = zero_point_voltage(consts, geom.effective_area)
    q0 = charge_fluctuation(scales.E_J, scales.E_C, scales.beta, consts.e)
    s = array_factor(m, geom, method=method, v_s=consts.v_s)
    return phi0 * q0 * s / consts.hbar / (2 * math.pi)


def band_modes(geom: IdtGeometry, center_frequency: float, bandwidth: float, v_s: float = 2880.0) -> np.ndarray:
    """Mode indices ``m`` whose frequency ``m v_s / 2 L`` lies inside the band."""
    f_fsr = v_s / (2 * geom.L_eff)
    lo = math.ceil((center_frequency - bandwidth / 2) / f_fsr)
    hi = math.floor((center_frequency + bandwidth / 2) / f_fsr)
    return np.arange(lo, hi + 1)


def peak_coupling(geom: IdtGeometry, scales: EnergyScales, consts: PhysicalConstants,
                  center_frequency: float = 4.253e9, bandwidth: float = 50e6) -> float:
    """Largest |coupling_estimate| over the modes inside the mirror band."""
    ms = band_modes(geom, center_frequency, bandwidth, consts.v_s)
    return max(abs(coupling_estimate(int(m), geom, scales, consts)) for m in ms)


def gamma_max(N_q: int = 24, f_c: float = 4.253e9, K2: float = 7e-4) -> float:
    """Peak SAW emission rate (Hz) at the IDT centre frequency."""
    return SAW_CONDUCTANCE_FACTOR * K2 * N_q * f_c / (2 * math.sqrt(2))


def emission_rate(f, N_q: int = 24, f_c: float = 4.253e9, K2: float = 7e-4):
    """Spontaneous phonon emission rate ``Gamma_max (sin X / X)^2``, ``X = N_q pi (f - f_c) / f_c``."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ModelError("frequency must be positive")
    out = gamma_max(N_q, f_c, K2) * np.sinc(N_q * (f - f_c) / f_c) ** 2
    return float(out) if out.ndim == 0 else out


def qubit_linewidth(f, gamma_intrinsic: float = 1.1e6, N_q: int = 24, f_c: float = 4.253e9, K2: float = 7e-4):
    """Emission rate plus a frequency-independent intrinsic linewidth (Hz)."""
    if gamma_intrinsic < 0:
        raise ModelError("gamma_intrinsic must be >= 0")
    return emission_rate(f, N_q, f_c, K2) + gamma_intrinsic
