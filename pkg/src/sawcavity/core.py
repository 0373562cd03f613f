"""Domain types and elementary relations shared by the other modules.

Every stored or returned frequency, linewidth and coupling is a *linear*
frequency in Hz. Angular frequencies only appear inside formulas.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from scipy import constants as sc


class ModelError(ValueError):
    """Invalid physical input to a model function."""


class LevelIndexError(ModelError, IndexError):
    pass


class ModeKind(str, Enum):
    LONGITUDINAL = "longitudinal"
    TRANSVERSE = "transverse"


@dataclass(frozen=True)
class AcousticMode:
    """One bare cavity mode.

    Transverse modes carry the label of their parent longitudinal mode.
    ``external_amplitude`` is the signed cavity-IDT overlap ``a_m``; the
    external loss rate is ``kappa0 * a_m**2``.
    """

    label: int
    kind: ModeKind
    frequency: float
    kappa_internal: float
    external_amplitude: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ModeKind(self.kind))
        except ValueError as exc:
            raise ModelError(f"mode {self.label}: unknown kind {self.kind!r}") from exc
        if int(self.label) != self.label or self.label < 1:
            raise ModelError(f"mode label must be a positive integer, got {self.label!r}")
        if not self.frequency > 0:
            raise ModelError(f"mode {self.label}: frequency must be positive")
        if self.kappa_internal < 0:
            raise ModelError(f"mode {self.label}: kappa_internal must be >= 0")

    @property
    def name(self) -> str:
        return f"{self.label}t" if self.kind is ModeKind.TRANSVERSE else str(self.label)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


@dataclass(frozen=True)
class AcousticModeSet:
    """Ordered collection of bare modes plus cavity-level metadata.

    Modes are sorted by frequency on construction. Adjacent longitudinal modes
    must be spaced by ``fsr`` within ``spacing_tolerance`` (relative).
    """

    modes: tuple
    fsr: float
    center_frequency: float
    mirror_bandwidth: float
    kappa0: float = 178.2e3
    spacing_tolerance: float = 0.01

    def __post_init__(self):
        modes = tuple(sorted((m if isinstance(m, AcousticMode) else AcousticMode(**m) for m in self.modes),
                             key=lambda m: m.frequency))
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise ModelError("mode set is empty")
        if not (self.fsr > 0 and self.center_frequency > 0 and self.mirror_bandwidth > 0):
            raise ModelError("fsr, center_frequency and mirror_bandwidth must be positive")
        if self.kappa0 < 0:
            raise ModelError("kappa0 must be >= 0")
        longi = [m for m in modes if m.kind is ModeKind.LONGITUDINAL]
        labels = [m.label for m in longi]
        if len(set(labels)) != len(labels):
            raise ModelError("duplicate longitudinal labels")
        for a, b in zip(longi, longi[1:]):
            spacing = b.frequency - a.frequency
            if abs(spacing - self.fsr) > self.spacing_tolerance * self.fsr:
                raise ModelError(
                    f"longitudinal modes {a.label} and {b.label} spaced {spacing:.6g} Hz, "
                    f"expected fsr {self.fsr:.6g} Hz"
                )
        for m in modes:
            if m.kind is ModeKind.TRANSVERSE and m.label not in labels:
                raise ModelError(f"transverse mode {m.label}t has no parent longitudinal mode")

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m.frequency for m in self.modes])

    @property
    def kappa_internal(self) -> np.ndarray:
        return np.array([m.kappa_internal for m in self.modes])

    @property
    def external_amplitudes(self) -> np.ndarray:
        return np.array([m.external_amplitude for m in self.modes])

    @property
    def kappa_external(self) -> np.ndarray:
        return self.kappa0 * self.external_amplitudes ** 2

    @property
    def names(self) -> list:
        return [m.name for m in self.modes]

    def longitudinal(self) -> list:
        return [m for m in self.modes if m.kind is ModeKind.LONGITUDINAL]

    def index_of(self, name) -> int:
        """Position of a mode given its display name (``8`` or ``"7t"``)."""
        return self.names.index(str(name))

    def to_dict(self) -> dict:
        return {
            "fsr": self.fsr,
            "center_frequency": self.center_frequency,
            "mirror_bandwidth": self.mirror_bandwidth,
            "kappa0": self.kappa0,
            "spacing_tolerance": self.spacing_tolerance,
            "modes": [m.to_dict() for m in self.modes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AcousticModeSet":
        d = dict(d)
        d["modes"] = tuple(AcousticMode(**m) for m in d.get("modes", ()))
        return cls(**d)


@dataclass(frozen=True)
class TransmonParams:
    """Flux-tunable transmon; ``alpha`` is the anharmonicity magnitude (> 0)."""

    omega_max: float = 5.08e9
    I0: float = 1.0395e-3
    Ib: float = 0.0
    alpha: float = 273e6
    levels: int = 4
    gamma_intrinsic: float = 1.1e6

    def __post_init__(self):
        if not self.omega_max > 0:
            raise ModelError("omega_max must be positive")
        if not self.I0 > 0:
            raise ModelError("I0 must be positive")
        if self.alpha < 0:
            raise ModelError("alpha is a magnitude and must be >= 0")
        if not 2 <= int(self.levels) <= 6:
            raise ModelError("levels must be in [2, 6]")
        if self.gamma_intrinsic < 0:
            raise ModelError("gamma_intrinsic must be >= 0")


@dataclass(frozen=True)
class CouplingParams:
    """Qubit-mode coupling pattern ``g0 sin(pi (label + label_offset) / 4 + phi_q)``."""

    g0: float = 6.5e6
    phi_q: float = -0.1
    transverse_ratio: float = 0.35
    label_offset: int = 2

    def __post_init__(self):
        if self.g0 < 0:
            raise ModelError("g0 must be >= 0")
        if not abs(self.phi_q) < math.pi:
            raise ModelError("|phi_q| must be < pi")
        if not 0 <= self.transverse_ratio <= 1:
            raise ModelError("transverse_ratio must be in [0, 1]")


@dataclass(frozen=True)
class PhysicalConstants:
    """Substrate and fundamental constants (SI). Defaults are GaAs."""

    v_s: float = 2880.0
    e_pz: float = 0.16
    epsilon: float = 12.9 * sc.epsilon_0
    density: float = 5317.0
    hbar: float = sc.hbar
    e: float = sc.e

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ModelError(f"constant {k} must be strictly positive")


def qubit_frequency(current, p: TransmonParams):
    """Qubit 0-1 frequency (Hz) at coil current ``current`` (A)."""
    phase = np.pi * (np.asarray(current, dtype=float) - p.Ib) / p.I0
    out = p.omega_max * np.sqrt(np.abs(np.cos(phase)))
    return float(out) if np.ndim(out) == 0 else out


def transmon_level(i: int, omega_q: float, alpha: float, levels: int | None = None) -> float:
    """Energy of transmon level ``i`` (Hz): ``i*omega_q - i(i-1)*alpha/2``."""
    if i < 0 or (levels is not None and i >= levels):
        raise LevelIndexError(f"level {i} outside [0, {levels})")
    return i * omega_q - 0.5 * i * (i - 1) * alpha


def fsr(v_s: float, L_eff: float) -> float:
    """Free spectral range ``v_s / (2 L_eff)``."""
    if not (v_s > 0 and L_eff > 0):
        raise ModelError("v_s and L_eff must be positive")
    return v_s / (2.0 * L_eff)


def wavelength(v_s: float, f_c: float) -> float:
    if not (v_s > 0 and f_c > 0):
        raise ModelError("v_s and f_c must be positive")
    return v_s / f_c
