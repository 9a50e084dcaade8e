import numpy as np
import pytest

import triphoton as tp
from triphoton.fock import build_hamiltonian, build_operators, flat_index
from triphoton.spectrum import OMEGA_Q_TOL, eigendecompose, eigensystem_for

from conftest import WINDOW_03


def params_for(g=0.3, omega_q=10.72, n1=6, n3=2):
    return tp.SystemParams.from_ghz(omega_q, 3.0, 9.0, g, g, n1, n3)


def test_bare_spectrum_exact():
    params = params_for(g=0.0, omega_q=10.5)
    es = eigensystem_for(params)
    expected = sorted(q * params.omega_q + m * params.omega_1 + n * params.omega_3
                      for q in range(2) for m in range(7) for n in range(3))
    np.testing.assert_allclose(es.energies, expected, rtol=1e-14, atol=1e-12)


def test_bare_overlaps_unity():
    params = params_for(g=0.0, omega_q=10.5)
    es = eigensystem_for(params)
    for idx in range(params.dim):
        assert tp.label_state(es, idx).overlap == pytest.approx(1.0, abs=1e-12)


def test_spectral_invariance_under_unitary():
    params = params_for()
    h = build_hamiltonian(params)
    rng = np.random.RandomState(11)
    m = rng.randn(params.dim, params.dim) + 1j * rng.randn(params.dim, params.dim)
    q, _ = np.linalg.qr(m)
    es_a = eigendecompose(h)
    es_b = eigendecompose(q @ h @ q.conj().T)
    scale = np.abs(es_a.energies).max()
    np.testing.assert_allclose(es_a.energies, es_b.energies,
                               atol=1e-10 * scale)


def test_non_hermitian_rejected():
    h = np.array([[0.0, 1.0], [0.5, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        eigendecompose(h)


def test_eigensystem_invariants():
    params = params_for()
    ops = build_operators(params)
    es = eigendecompose(build_hamiltonian(params, ops), ops)
    d = params.dim
    np.testing.assert_allclose(es.vectors @ es.vectors.T.conj(), np.eye(d),
                               atol=1e-10)
    for mat in (es.x, es.y, es.z):
        np.testing.assert_allclose(mat, mat.T.conj(), atol=1e-12)
        assert np.abs(np.diag(mat)).max() <= 1e-10


def test_label_at_anticrossing_half_half(anti03):
    params = params_for().replace_omega_q(anti03.omega_q_opt)
    es = eigensystem_for(params)
    lab01 = tp.label_state(es, flat_index(params, 0, 0, 1))
    lab30 = tp.label_state(es, flat_index(params, 0, 3, 0))
    assert lab01.ambiguous and lab30.ambiguous
    for lab in (lab01, lab30):
        assert 0.40 <= lab.overlap <= 0.60
        assert abs(lab.overlap - lab.runner_up_overlap) < 0.05


def test_label_far_detuned():
    params = params_for(omega_q=13.0)
    es = eigensystem_for(params)
    lab = tp.label_state(es, flat_index(params, 0, 0, 1))
    assert lab.overlap > 0.99
    assert not lab.ambiguous


def test_window_must_bracket():
    params = params_for()
    with pytest.raises(ValueError, match="bracket"):
        tp.find_optimum(params, window=(tp.ghz(11.2), tp.ghz(11.6)))


def test_optimum_stable_under_tolerance_halving(anti03):
    params = params_for()
    fine = tp.find_optimum(params, window=WINDOW_03, tol=OMEGA_Q_TOL / 2)
    assert abs(fine.omega_q_opt - anti03.omega_q_opt) <= OMEGA_Q_TOL


def test_branch_scan_continuous(anti03):
    params = params_for()
    grid = np.linspace(tp.ghz(10.60), tp.ghz(10.85), 41)
    e01, e30 = tp.branch_scan(params, grid)
    # adiabatic continuation: smooth steps, no crossing, minimal gap 2 g_eff
    assert np.abs(np.diff(e01)).max() < tp.ghz(0.02)
    assert np.abs(np.diff(e30)).max() < tp.ghz(0.02)
    gap = e30 - e01
    assert (gap > 0).all() or (gap < 0).all()
    assert np.abs(gap).min() == pytest.approx(2 * anti03.g_eff, rel=0.05)


def test_perturbative_degeneracy_formulas():
    # second-order renormalized energies at g = 10 MHz
    g = tp.ghz(0.01)
    params = tp.SystemParams(tp.ghz(10.8), tp.ghz(3.0), tp.ghz(9.0), g, g)
    es = eigensystem_for(params)
    w_q, w_1, w_3 = params.omega_q, params.omega_1, params.omega_3
    eps01_pred = w_3 - g**2 / (w_q - w_3) - g**2 / (w_q + w_3)
    eps30_pred = 3 * (w_1 - g**2 / (w_q - w_1) - g**2 / (w_q + w_1))
    i01 = tp.label_state(es, flat_index(params, 0, 0, 1)).index
    i30 = tp.label_state(es, flat_index(params, 0, 3, 0)).index
    eps01 = es.energies[i01] - es.energies[0]
    eps30 = es.energies[i30] - es.energies[0]
    assert abs(eps01 - eps01_pred) < tp.ghz(10e-6)
    assert abs(eps30 - eps30_pred) < tp.ghz(10e-6)


def test_truncation_convergence():
    tight = eigensystem_for(params_for(n1=6, n3=2))
    wide = eigensystem_for(params_for(n1=8, n3=3))
    p_t, p_w = params_for(n1=6, n3=2), params_for(n1=8, n3=3)
    for bare in ((0, 0, 1), (0, 3, 0)):
        i_t = tp.label_state(tight, flat_index(p_t, *bare)).index
        i_w = tp.label_state(wide, flat_index(p_w, *bare)).index
        e_t = tight.energies[i_t] - tight.energies[0]
        e_w = wide.energies[i_w] - wide.energies[0]
        assert abs(e_t - e_w) / abs(e_w) < 1e-6


def test_rabi_initial_and_conservation(anti03):
    params = params_for().replace_omega_q(anti03.omega_q_opt)
    es = eigensystem_for(params)
    times = np.arange(0.0, 500.0, 1.0)
    rabi = tp.rabi_evolve(es, params, times)
    assert rabi.p_g01[0] == pytest.approx(1.0, abs=1e-12)
    total = rabi.p_g01 + rabi.p_g30 + rabi.p_other
    np.testing.assert_allclose(total, 1.0, atol=1e-10)
