from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sawcavity.core import CouplingParams, ModeKind, ModelError
from sawcavity.reflection import synthesize_mode_set
from sawcavity.spectral import (EigenSystem, InteractionMatrix, ShapeError, build_interaction, coupling_strength,
                                diagonalize, hybridized_rates, mode_couplings)

from oracles import bisection_eigenvalues

G_EXPECTED_MHZ = {1: 5.03, 2: 0.65, 3: -4.11, 4: -6.47, 5: -5.03, 6: -0.65, 7: 4.11, 8: 6.47, 9: 5.03, 10: 0.65,
                  11: -4.11}


@pytest.mark.parametrize("label,expected", sorted(G_EXPECTED_MHZ.items()))
def test_coupling_pattern_values(label, expected):
    g = coupling_strength(label, ModeKind.LONGITUDINAL, CouplingParams())
    assert g / 1e6 == pytest.approx(expected, abs=0.006)


def test_transverse_coupling_scaled():
    c = CouplingParams()
    assert coupling_strength(7, "transverse", c) == pytest.approx(0.35 * coupling_strength(7, "longitudinal", c))


@given(st.floats(-3.1, 3.1), st.integers(1, 40))
def test_coupling_pattern_period_eight(phi, label):
    c = CouplingParams(phi_q=phi)
    g1 = coupling_strength(label, "longitudinal", c)
    assert coupling_strength(label + 8, "longitudinal", c) == pytest.approx(g1, abs=1e-6)
    assert coupling_strength(label + 4, "longitudinal", c) == pytest.approx(-g1, abs=1e-6)


def test_two_mode_splitting_is_two_g():
    f, g = 4.253e9, 6.5e6
    es = diagonalize(np.array([[f, g], [g, f]]))
    assert (es.eigenvalues[1] - es.eigenvalues[0]) / (2 * g) == pytest.approx(1.0, rel=1e-9)


@given(st.floats(4.20e9, 4.30e9), st.floats(-10e6, 10e6), st.floats(-8e6, 8e6))
def test_interlacing_and_orthonormality(wq, shift, g0):
    modes = synthesize_mode_set()
    c = CouplingParams(g0=abs(g0))
    h = build_interaction(modes, c, wq + shift)
    es = diagonalize(h)
    bare = np.sort(h.diagonal)
    lam = es.eigenvalues
    tol = 1e-6
    # Cauchy interlacing against the bare mode frequencies (principal submatrix)
    fm = np.sort(modes.frequencies)
    assert np.all(lam[:-1] <= fm + tol) and np.all(fm <= lam[1:] + tol)
    np.testing.assert_allclose(es.eigenvectors.T @ es.eigenvectors, np.eye(len(lam)), atol=1e-10)
    assert lam.sum() == pytest.approx(bare.sum(), rel=1e-14)


@given(st.integers(2, 4).flatmap(lambda n: st.lists(st.floats(-5.0, 5.0), min_size=n * n, max_size=n * n)))
def test_small_matrices_match_bisection(vals):
    n = int(round(len(vals) ** 0.5))
    a = np.array(vals).reshape(n, n)
    a = (a + a.T) / 2
    np.testing.assert_allclose(diagonalize(a).eigenvalues, bisection_eigenvalues(a), atol=1e-10)


def test_participation_columns_sum_to_one(device):
    es = diagonalize(build_interaction(device.modes, device.coupling, 4.2568e9))
    np.testing.assert_allclose(es.participation.sum(axis=0), 1.0, atol=1e-12)
    assert es.qubit_participation.shape == (18,)


@given(st.floats(4.2e9, 4.3e9), st.floats(0, 5e6))
def test_rate_sum_rules(wq, gamma):
    modes = synthesize_mode_set()
    es = diagonalize(build_interaction(modes, CouplingParams(), wq))
    kex, kin = hybridized_rates(es, modes, gamma=gamma)
    assert kex.sum() == pytest.approx(modes.kappa_external.sum(), rel=1e-10)
    assert kin.sum() == pytest.approx(modes.kappa_internal.sum() + gamma, rel=1e-10)
    assert np.all(kex >= 0) and np.all(kin >= 0)


def test_rates_reduce_to_bare_when_uncoupled(device):
    es = diagonalize(build_interaction(device.modes, CouplingParams(g0=0.0), 5.0e9))
    kex, kin = hybridized_rates(es, device.modes, gamma=1.1e6)
    np.testing.assert_allclose(kex[:-1], device.modes.kappa_external, rtol=1e-12)
    np.testing.assert_allclose(kin[:-1], device.modes.kappa_internal, rtol=1e-12)
    assert kin[-1] == pytest.approx(1.1e6)


def test_rates_dimension_mismatch(device):
    es = diagonalize(np.eye(3))
    with pytest.raises(ShapeError):
        hybridized_rates(es, device.modes)


def test_global_coupling_sign_flip_leaves_rates_unchanged(device):
    c1 = CouplingParams(phi_q=-0.1)
    c2 = CouplingParams(phi_q=-0.1 + np.pi)
    e1 = diagonalize(build_interaction(device.modes, c1, 4.26e9))
    e2 = diagonalize(build_interaction(device.modes, c2, 4.26e9))
    np.testing.assert_allclose(e1.eigenvalues, e2.eigenvalues, rtol=1e-14)
    for a, b in zip(hybridized_rates(e1, device.modes), hybridized_rates(e2, device.modes)):
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-6)


def test_interaction_matrix_shape_checks():
    with pytest.raises(ShapeError):
        InteractionMatrix(np.array([1.0, 2.0, 3.0]), np.array([1.0]))
    m = InteractionMatrix(np.array([1.0, 2.0, 3.0]), np.array([0.1, 0.2])).matrix()
    np.testing.assert_allclose(m, [[1, 0, 0.1], [0, 2, 0.2], [0.1, 0.2, 3]])


def test_diagonalize_rejects_asymmetric_and_non_square():
    with pytest.raises(ModelError):
        diagonalize(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ShapeError):
        diagonalize(np.zeros((2, 3)))


def test_eigensystem_json_round_trip(device):
    es = diagonalize(build_interaction(device.modes, device.coupling, 4.2568e9))
    back = EigenSystem.from_dict(json.loads(json.dumps(es.to_dict())))
    np.testing.assert_array_equal(back.eigenvalues, es.eigenvalues)
    np.testing.assert_array_equal(back.eigenvectors, es.eigenvectors)


def test_mode_couplings_align_with_modes(device):
    g = mode_couplings(device.modes, device.coupling)
    assert len(g) == len(device.modes)
    k = device.modes.index_of("7t")
    assert g[k] == pytest.approx(0.35 * g[device.modes.index_of(7)])
