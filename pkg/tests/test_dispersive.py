from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sawcavity.core import ModelError
from sawcavity.dispersive import (JCParams, LabelAmbiguityError, build_block, chi, chi_curve, chi_standard,
                                  dressed_energies, full_hamiltonian, label_crossing, predicted_poles,
                                  qubit_transitions, stark_curve)
from sawcavity.spectral import diagonalize

from oracles import jc_ladder_eigenvalues

WC, G, ALPHA = 4.2626e9, 6.468e6, 273e6


def _subspace_eigs(h, labels, n_max):
    keep = [k for k, (i, j) in enumerate(labels) if i + j <= n_max]
    return np.linalg.eigvalsh(h[np.ix_(keep, keep)])


def _block_eigs(p, n_max):
    return np.sort(np.concatenate([diagonalize(build_block(n, p)).eigenvalues for n in range(n_max + 1)]))


@pytest.mark.parametrize("levels", [3, 4, 5])
@pytest.mark.parametrize("offset", [-300e6, -5e6, 0.0, ALPHA, 1.5 * ALPHA + 1e6])
def test_blocks_match_brute_force(levels, offset):
    n_max = 8
    p = JCParams(WC + offset, WC, G, ALPHA, levels=levels, n_max=n_max)
    h_oracle = jc_ladder_eigenvalues(p.omega_q, WC, G, ALPHA, levels, n_max)
    labels = [(i, j) for i in range(n_max + 1) for j in range(levels)]
    ref = _subspace_eigs(h_oracle, labels, n_max)
    got = _block_eigs(p, n_max)
    np.testing.assert_allclose(got, ref, rtol=1e-10)
    h_pkg, lab_pkg = full_hamiltonian(p, n_max)
    np.testing.assert_allclose(h_pkg, h_oracle, rtol=1e-14, atol=1e-9)
    assert lab_pkg == labels


@given(st.integers(0, 30), st.floats(3.5e9, 5.0e9), st.floats(0, 20e6))
def test_block_trace(n, wq, g):
    p = JCParams(wq, WC, g, ALPHA)
    b = build_block(n, p)
    assert diagonalize(b).eigenvalues.sum() == pytest.approx(np.trace(b), rel=1e-12)


def test_ground_state_and_uncoupled_limit():
    p = JCParams(4.0e9, WC, 0.0, ALPHA)
    lad = dressed_energies(p, 6)
    assert lad.energy(0, 0) == 0.0
    assert lad.energy(3, 1) == pytest.approx(3 * WC + 4.0e9)
    assert lad.energy(1, 2) == pytest.approx(WC + 8.0e9 - ALPHA)
    np.testing.assert_allclose(qubit_transitions(p, 5), 4.0e9)


def test_resonant_vacuum_rabi_splitting():
    p = JCParams(WC, WC, G, ALPHA, levels=2)
    lad = dressed_energies(p, 3)
    assert lad.overlap[1, 0] == pytest.approx(0.5, abs=1e-12)
    vals = diagonalize(build_block(1, p)).eigenvalues
    assert vals[1] - vals[0] == pytest.approx(2 * G, rel=1e-9)


def test_ambiguous_labels_raise_at_resonance():
    p = JCParams(WC, WC, G, ALPHA)
    lad = dressed_energies(p, 4)
    assert lad.ambiguous.any()
    with pytest.raises(LabelAmbiguityError):
        chi(0, p.with_qubit(WC))


@pytest.mark.parametrize("mult", [-500, -200, -50, 50, 200, 500])
def test_chi_matches_three_level_formula(mult):
    p = JCParams(WC + mult * G, WC, G, ALPHA, levels=3)
    delta = mult * G
    assert chi(0, p) == pytest.approx(chi_standard(G, delta, ALPHA), rel=0.05)


def test_chi_standard_poles():
    with pytest.raises(ModelError):
        chi_standard(G, 0.0, ALPHA)
    with pytest.raises(ModelError):
        chi_standard(G, ALPHA, ALPHA)


@pytest.mark.parametrize("upper,lower,pole", [((0, 2), (1, 1), WC + ALPHA), ((0, 3), (2, 1), WC + 1.5 * ALPHA)])
def test_label_crossings_locate_poles(upper, lower, pole):
    p = JCParams(WC, WC, G, ALPHA)
    root = label_crossing(p, upper, lower, (pole - 40e6, pole + 40e6))
    assert abs(root - pole) / pole < 1e-3


def test_label_crossing_validates_states():
    p = JCParams(WC, WC, G, ALPHA)
    with pytest.raises(ModelError):
        label_crossing(p, (0, 2), (2, 1), (WC, WC + ALPHA))
    with pytest.raises(ModelError):
        label_crossing(p, (0, 5), (4, 1), (WC, WC + ALPHA))


def test_predicted_poles():
    poles = predicted_poles(WC, ALPHA)
    assert poles["E(i,3)=E(i+2,1)"] == WC + 1.5 * ALPHA


def test_stark_curve_linear_far_detuned():
    p = JCParams(WC - 300e6, WC, G, ALPHA)
    shift = stark_curve(np.arange(6), p)
    assert shift[0] == 0.0
    assert shift[1] == pytest.approx(2 * chi(0, p), rel=1e-9)
    np.testing.assert_allclose(np.diff(shift), 2 * chi(0, p), rtol=0.01)


def test_truncation_errors():
    p = JCParams(4.0e9, WC, G, ALPHA, n_max=10)
    with pytest.raises(ModelError):
        qubit_transitions(p, 10)
    with pytest.raises(ModelError):
        stark_curve([-1], p)
    with pytest.raises(ModelError):
        build_block(-1, p)


def test_chi_curve_marks_ambiguous_points_nan():
    p = JCParams(WC, WC, G, ALPHA)
    out = chi_curve(np.array([WC - 300e6, WC]), p)
    assert np.isfinite(out[0]) and np.isnan(out[1])


@pytest.mark.parametrize("kwargs", [dict(levels=1), dict(n_max=1), dict(alpha=-1.0)])
def test_jc_param_validation(kwargs):
    base = dict(omega_q=4e9, omega_cav=WC, g=G)
    base.update(kwargs)
    with pytest.raises(ModelError):
        JCParams(**base)


def test_max_phonons_property():
    lad = dressed_energies(JCParams(4.0e9, WC, G, ALPHA, levels=4), 10)
    assert lad.max_phonons == 7
