"""Both kernel backends against independent references and each other."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sawcavity import kernels
from sawcavity.core import qubit_frequency
from sawcavity.reflection import flux_to_current
from sawcavity.spectral import build_interaction, mode_couplings

from oracles import bisection_eigenvalues, single_mode_s11

symmetric = st.integers(1, 10).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-1e3, 1e3))).map(lambda a: (a + a.T) / 2)


@given(symmetric)
def test_jacobi_matches_bisection_oracle(a):
    for b in kernels.available_backends():
        w, v, _ = b.jacobi_eigh(a, 1e-13, 100)
        ref = bisection_eigenvalues(a)
        scale = max(np.abs(a).max(), 1.0)
        np.testing.assert_allclose(w, ref, atol=1e-9 * scale)


@given(symmetric)
def test_jacobi_eigenpairs_orthonormal_and_sign_fixed(a):
    for b in kernels.available_backends():
        w, v, _ = b.jacobi_eigh(a, 1e-13, 100)
        n = len(a)
        np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-10)
        scale = max(np.abs(a).max(), 1.0)
        np.testing.assert_allclose(a @ v, v * w, atol=1e-9 * scale)
        assert np.all(np.diff(w) >= 0)
        big = v[np.argmax(np.abs(v), axis=0), np.arange(n)]
        assert np.all(big > 0)


def test_jacobi_diagonal_input_needs_no_sweeps(backend):
    w, v, sweeps = backend.jacobi_eigh(np.diag([3.0, 1.0, 2.0]), 1e-13, 100)
    np.testing.assert_allclose(w, [1, 2, 3])
    assert sweeps <= 1


def test_jacobi_rejects_non_square(backend):
    with pytest.raises(ValueError):
        backend.jacobi_eigh(np.zeros((2, 3)), 1e-13, 100)


def test_lorentzian_single_mode_closed_form(backend):
    f = np.linspace(4.25e9, 4.256e9, 2001)
    s = backend.lorentzian_s11(f, np.array([4.253e9]), np.array([2e5]), np.array([9e4]))
    np.testing.assert_allclose(s, single_mode_s11(f, 4.253e9, 2e5, 9e4), atol=1e-14)


def test_lorentzian_critical_coupling_zero(backend):
    s = backend.lorentzian_s11(np.array([4.253e9]), np.array([4.253e9]), np.array([1e5]), np.array([1e5]))
    assert abs(s[0]) < 1e-15


@given(st.lists(st.tuples(st.floats(-5e6, 5e6), st.floats(0, 1e6), st.floats(0, 1e6)), min_size=1, max_size=8))
def test_lorentzian_passive(modes):
    centers = 4.25e9 + np.array([m[0] for m in modes])
    kin = np.array([m[1] for m in modes])
    kex = np.array([m[2] for m in modes])
    f = np.linspace(4.24e9, 4.26e9, 501)
    for b in kernels.available_backends():
        s = b.lorentzian_s11(f, centers, kin, kex)
        assert np.all(np.abs(s) <= 1 + 1e-12)


def test_lorentzian_lossless_mode_is_all_pass(backend):
    f = np.linspace(4.24e9, 4.26e9, 101)
    s = backend.lorentzian_s11(f, np.array([4.25e9]), np.array([0.0]), np.array([1e5]))
    np.testing.assert_allclose(np.abs(s), 1.0, atol=1e-12)


def test_arrow_rates_shape_errors(backend):
    with pytest.raises(ValueError):
        backend.arrow_rates(np.eye(3), np.ones(3), np.ones(2), 1.0, 0.0)


def _device_args(device, rows=40, cols=300):
    modes = device.modes
    g = mode_couplings(modes, device.coupling)
    grid = np.linspace(4.2165e9, 4.2895e9, cols)
    cur = flux_to_current(np.linspace(0.245, 0.262, rows), device.transmon)
    wq = np.atleast_1d(qubit_frequency(cur, device.transmon))
    return (grid, modes.frequencies, modes.kappa_internal, modes.external_amplitudes, g, modes.kappa0,
            device.transmon.gamma_intrinsic, wq)


def test_backends_agree_on_flux_map(device):
    backends = kernels.available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    args = _device_args(device)
    maps = [b.flux_map_abs(*args, 1e-13) for b in backends]
    np.testing.assert_allclose(maps[0], maps[1], atol=1e-12)


def test_backends_agree_on_eigensystem(device):
    backends = kernels.available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    h = build_interaction(device.modes, device.coupling, 4.2568e9).matrix()
    h -= np.mean(np.diag(h)) * np.eye(len(h))
    (w1, v1, s1), (w2, v2, s2) = [b.jacobi_eigh(h, 1e-13, 100) for b in backends]
    assert s1 == s2
    np.testing.assert_allclose(w1, w2, atol=1e-6)
    np.testing.assert_allclose(v1, v2, atol=1e-12)


def test_flux_map_row_matches_step_by_step_pipeline(device, backend):
    from sawcavity.spectral import diagonalize, hybridized_rates

    args = _device_args(device, rows=3, cols=200)
    rows = backend.flux_map_abs(*args, 1e-13)
    for k, wq in enumerate(args[-1]):
        es = diagonalize(build_interaction(device.modes, device.coupling, wq))
        kex, kin = hybridized_rates(es, device.modes, gamma=device.transmon.gamma_intrinsic)
        ref = np.abs(sum(single_mode_s11(args[0], f, ki, ke) - 1 for f, ki, ke in zip(es.eigenvalues, kin, kex)) + 1)
        # the single-port sum only equals the additive form for well separated modes; compare loosely
        assert np.max(np.abs(rows[k] - ref)) < 0.05


def test_selector_reports_backend():
    assert kernels.BACKEND in {b.NAME for b in kernels.available_backends()}
