"""Simulation and fitting of a multimode SAW cavity coupled to a flux-tunable transmon."""

from __future__ import annotations

from .core import (AcousticMode, AcousticModeSet, CouplingParams, LevelIndexError, ModeKind, ModelError,
                   PhysicalConstants, TransmonParams, fsr, qubit_frequency, transmon_level, wavelength)
from .kernels import BACKEND
from .spectral import (EigenSystem, InteractionMatrix, ShapeError, build_interaction, coupling_strength,
                       diagonalize, hybridized_rates, mode_couplings)

__version__ = "0.1.0"

__all__ = [
    "AcousticMode", "AcousticModeSet", "BACKEND", "CouplingParams", "EigenSystem", "InteractionMatrix",
    "LevelIndexError", "ModeKind", "ModelError", "PhysicalConstants", "ShapeError", "TransmonParams",
    "build_interaction", "coupling_strength", "diagonalize", "fsr", "hybridized_rates", "mode_couplings",
    "qubit_frequency", "transmon_level", "wavelength",
]
