"""Generalized Jaynes-Cummings model of one cavity mode and a multilevel transmon.

The Hamiltonian conserves total excitation number, so it is diagonalized one
manifold at a time. Manifold ``n`` holds the states ``|n - j phonons, level j>``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .core import ModelError, transmon_level
from .spectral import diagonalize


class LabelAmbiguityError(ModelError):
    """A dressed state could not be matched to a bare state (near a degeneracy)."""


@dataclass(frozen=True)
class JCParams:
    omega_q: float
    omega_cav: float
    g: float
    alpha: float = 273e6
    levels: int = 4
    n_max: int = 50

    def __post_init__(self):
        if self.levels < 2:
            raise ModelError("levels must be >= 2")
        if self.n_max < 2:
            raise ModelError("n_max must be >= 2")
        if self.alpha < 0:
            raise ModelError("alpha is a magnitude and must be >= 0")

    def with_qubit(self, omega_q: float) -> "JCParams":
        return replace(self, omega_q=omega_q)


def build_block(n: int, p: JCParams) -> np.ndarray:
    """Hamiltonian block (Hz) of excitation manifold ``n``; basis index = transmon level."""
    if n < 0:
        raise ModelError("manifold index must be >= 0")
    size = min(p.levels, n + 1)
    h = np.zeros((size, size))
    for j in range(size):
        h[j, j] = transmon_level(j, p.omega_q, p.alpha) + (n - j) * p.omega_cav
    for j in range(size - 1):
        h[j, j + 1] = h[j + 1, j] = np.sqrt(j + 1) * np.sqrt(n - j) * p.g
    return h


def full_hamiltonian(p: JCParams, n_phonons: int):
    """Dense Hamiltonian in the product basis ``|i phonons> x |level j>``.

    Built from ladder operators, independently of ``build_block``. Returns the
    matrix and the list of ``(i, j)`` labels of its basis.
    """
    a = np.diag(np.sqrt(np.arange(1, n_phonons + 1)), k=1)
    lower = np.zeros((p.levels, p.levels))
    for i in range(p.levels - 1):
        lower[i, i + 1] = np.sqrt(i + 1)
    levels = np.diag([transmon_level(j, p.omega_q, p.alpha) for j in range(p.levels)])
    eye_c, eye_q = np.eye(n_phonons + 1), np.eye(p.levels)
    h = p.omega_cav * np.kron(a.T @ a, eye_q) + np.kron(eye_c, levels)
    h += p.g * (np.kron(a.T, lower) + np.kron(a, lower.T))
    labels = [(i, j) for i in range(n_phonons + 1) for j in range(p.levels)]
    return h, labels


@dataclass(frozen=True)
class DressedLadder:
    """Dressed energies ``energies[i, j]`` (i phonons, transmon level j).

    Entries outside the truncation are NaN. ``overlap`` holds the squared
    overlap of each labelled eigenstate with its bare state; entries below
    or tied at 0.5 are flagged in ``ambiguous``.
    """

    energies: np.ndarray
    overlap: np.ndarray
    ambiguous: np.ndarray
    n_max: int

    def energy(self, i: int, j: int) -> float:
        if self.ambiguous[i, j]:
            raise LabelAmbiguityError(f"state ({i} phonons, level {j}) is ambiguous")
        e = self.energies[i, j]
        if np.isnan(e):
            raise ModelError(f"state ({i}, {j}) is outside the truncation")
        return float(e)

    def qubit_frequency(self, i: int) -> float:
        return self.energy(i, 1) - self.energy(i, 0)

    @property
    def max_phonons(self) -> int:
        """Largest phonon number with every transmon level available."""
        return self.n_max - self.energies.shape[1] + 1


def _label_block(h: np.ndarray):
    es = diagonalize(h)
    weights = es.eigenvectors ** 2
    rows, cols = linear_sum_assignment(-weights)
    return es.eigenvalues[cols], weights[rows, cols]


def dressed_energies(p: JCParams, n_max: int | None = None) -> DressedLadder:
    """Diagonalize every manifold up to ``n_max`` (default ``p.n_max``) and label
    eigenvalues by maximum overlap with the uncoupled states."""
    n_max = p.n_max if n_max is None else n_max
    energies = np.full((n_max + 1, p.levels), np.nan)
    overlap = np.full((n_max + 1, p.levels), np.nan)
    for n in range(n_max + 1):
        vals, w = _label_block(build_block(n, p))
        for j in range(len(vals)):
            energies[n - j, j] = vals[j]
            overlap[n - j, j] = w[j]
    # an exact 50/50 tie is as ambiguous as a minority overlap
    ambiguous = overlap < 0.5 + 1e-9
    return DressedLadder(energies, overlap, ambiguous, n_max)


def qubit_transitions(p: JCParams, max_phonons: int) -> np.ndarray:
    """``omega_q(i) = E(i,1) - E(i,0)`` for ``i = 0..max_phonons``."""
    if max_phonons + 1 > p.n_max:
        raise ModelError(f"phonon number {max_phonons} exceeds truncation n_max={p.n_max}")
    ladder = dressed_energies(p, max_phonons + 1)
    return np.array([ladder.qubit_frequency(i) for i in range(max_phonons + 1)])


def chi(i: int, p: JCParams) -> float:
    """Dispersive shift at ``i`` phonons: ``(omega_q(i+1) - omega_q(i)) / 2``."""
    wq = qubit_transitions(p, i + 1)
    return 0.5 * (wq[i + 1] - wq[i])


def chi_standard(g: float, delta: float, alpha: float) -> float:
    """Three-level transmon dispersive shift ``-g^2 alpha / (delta (delta - alpha))``.

    ``delta = omega_q - omega_cav`` and ``alpha > 0`` is the anharmonicity
    magnitude, so the sign matches ``chi`` (negative for ``omega_q < omega_cav``).
    """
    if delta == 0 or delta == alpha:
        raise ModelError("chi_standard has poles at delta = 0 and delta = alpha")
    return g * g / delta - g * g / (delta - alpha)


def stark_curve(phonon_numbers, p: JCParams) -> np.ndarray:
    """Qubit frequency shift ``omega_q(i) - omega_q(0)`` at each phonon number."""
    nums = np.asarray(phonon_numbers, dtype=int)
    if nums.size == 0:
        return np.zeros(0)
    if nums.min() < 0:
        raise ModelError("phonon numbers must be >= 0")
    wq = qubit_transitions(p, int(nums.max()))
    return wq[nums] - wq[0]


def chi_curve(omega_qs, p: JCParams, i: int = 0) -> np.ndarray:
    """``chi(i)`` across qubit frequencies; NaN where labels are ambiguous."""
    out = np.empty(len(omega_qs))
    for k, wq in enumerate(omega_qs):
        try:
            out[k] = chi(i, p.with_qubit(wq))
        except LabelAmbiguityError:
            out[k] = np.nan
    return out


def predicted_poles(omega_cav: float, alpha: float) -> dict:
    """Qubit frequencies where bare ladder states become degenerate."""
    return {
        "E(i,1)=E(i+1,0)": omega_cav,
        "E(i,2)=E(i+2,0)": omega_cav + alpha / 2,
        "E(i,2)=E(i+1,1)": omega_cav + alpha,
        "E(i,3)=E(i+2,1)": omega_cav + 1.5 * alpha,
    }


def _pair_imbalance(p: JCParams, a, b) -> float:
    n = a[0] + a[1]
    es = diagonalize(build_block(n, p))
    w = es.eigenvectors ** 2
    weight = w[a[1]] + w[b[1]]
    pair = np.sort(np.argsort(weight)[-2:])
    low = pair[0]
    return w[a[1], low] - w[b[1], low]


def label_crossing(p: JCParams, upper, lower, bracket) -> float:
    """Qubit frequency where dressed states ``upper`` and ``lower`` swap labels.

    ``upper``/``lower`` are ``(phonons, level)`` pairs in the same manifold,
    with ``upper`` the lower-energy bare state below the crossing. The root of
    their weight imbalance in the lower eigenstate of the pair is returned.
    """
    if upper[0] + upper[1] != lower[0] + lower[1]:
        raise ModelError("states must belong to the same excitation manifold")
    if upper[1] >= p.levels or lower[1] >= p.levels:
        raise ModelError("transmon level exceeds the configured number of levels")

    def f(wq):
        return _pair_imbalance(p.with_qubit(wq), upper, lower)

    return brentq(f, bracket[0], bracket[1], xtol=1e-3, rtol=1e-15)
