"""Resonant multimode interaction model: arrowhead Hamiltonian and its eigensystem."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import AcousticModeSet, CouplingParams, ModeKind, ModelError


class ShapeError(ModelError):
    pass


def coupling_strength(label: int, kind, c: CouplingParams) -> float:
    """Signed qubit coupling (Hz) to the mode with display ``label``.

    Transverse modes reuse their parent's label and are scaled by
    ``c.transverse_ratio``.
    """
    g = c.g0 * np.sin(np.pi * (label + c.label_offset) / 4.0 + c.phi_q)
    if ModeKind(kind) is ModeKind.TRANSVERSE:
        g *= c.transverse_ratio
    return float(g)


def mode_couplings(modes: AcousticModeSet, c: CouplingParams) -> np.ndarray:
    return np.array([coupling_strength(m.label, m.kind, c) for m in modes])


@dataclass(frozen=True)
class InteractionMatrix:
    """Arrowhead matrix: bare mode frequencies plus the qubit on the diagonal,
    qubit-mode couplings on the last row and column."""

    diagonal: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if d.ndim != 1 or g.ndim != 1 or len(g) != len(d) - 1:
            raise ShapeError("need n couplings for n modes + 1 qubit on the diagonal")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "couplings", g)

    @property
    def dimension(self) -> int:
        return len(self.diagonal)

    def matrix(self) -> np.ndarray:
        n = self.dimension - 1
        h = np.diag(self.diagonal)
        h[:n, n] = self.couplings
        h[n, :n] = self.couplings
        return h


def build_interaction(modes: AcousticModeSet, c: CouplingParams, omega_q: float) -> InteractionMatrix:
    if len(modes) == 0:
        raise ModelError("cannot build an interaction matrix without modes")
    return InteractionMatrix(np.append(modes.frequencies, omega_q), mode_couplings(modes, c))


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (Hz, ascending) and orthonormal eigenvector columns.

    Row ``n`` of ``eigenvectors`` is bare state ``n``; the last row is the qubit.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    @property
    def participation(self) -> np.ndarray:
        """Squared coefficients; column ``k`` sums to one."""
        return self.eigenvectors ** 2

    @property
    def qubit_participation(self) -> np.ndarray:
        return self.eigenvectors[-1] ** 2

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "qubit_participation": self.qubit_participation.tolist(),
            "sweeps": self.sweeps,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EigenSystem":
        return cls(np.asarray(d["eigenvalues"], float), np.asarray(d["eigenvectors"], float), int(d.get("sweeps", 0)))


def diagonalize(h, tol: float = 1e-13) -> EigenSystem:
    """Full spectral decomposition by cyclic Jacobi rotations.

    The mean of the diagonal is removed before rotating so that the
    convergence threshold is relative to the spread of the spectrum rather
    than its GHz offset; the spectrum is shifted back afterwards.
    """
    a = h.matrix() if isinstance(h, InteractionMatrix) else np.array(h, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("matrix must be square")
    scale = np.abs(a).max() if a.size else 0.0
    if scale and np.abs(a - a.T).max() > 1e-12 * scale:
        raise ModelError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    ref = float(np.mean(np.diag(a))) if a.size else 0.0
    w, v, sweeps = kernels.jacobi_eigh(a - ref * np.eye(len(a)), tol)
    return EigenSystem(w + ref, v, sweeps)


def hybridized_rates(es: EigenSystem, modes: AcousticModeSet, kappa0: float | None = None, gamma: float = 0.0):
    """External and internal loss rates (Hz) of each eigenmode.

    ``kex'_k = kappa0 (sum_n a_n c_nk)^2`` and
    ``kin'_k = sum_n kappa_n c_nk^2 + gamma c_qk^2``.
    """
    if es.dimension != len(modes) + 1:
        raise ShapeError(f"eigensystem has dimension {es.dimension}, mode set has {len(modes)} modes")
    k0 = modes.kappa0 if kappa0 is None else kappa0
    kex, kin = kernels.arrow_rates(es.eigenvectors, modes.external_amplitudes, modes.kappa_internal, k0, gamma)
    return np.maximum(kex, 0.0), np.maximum(kin, 0.0)
