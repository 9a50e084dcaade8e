import numpy as np
import pytest

import triphoton as tp
from triphoton.fock import (build_hamiltonian, build_operators, build_space,
                            flat_index, parity_operator)


def params_for(n1=6, n3=2, g=0.3, omega_q=10.72):
    return tp.SystemParams.from_ghz(omega_q, 3.0, 9.0, g, g, n1, n3)


def test_dimension_default():
    assert params_for().dim == 42


def test_dimension_minimal():
    assert params_for(n1=1, n3=1).dim == 8


def test_space_roundtrip():
    params = params_for()
    states = build_space(params)
    assert len(states) == 42
    for s in states:
        assert flat_index(params, s.qubit, s.n1, s.n3) == s.index
    assert sorted(s.index for s in states) == list(range(42))


def test_space_ordering_qubit_slowest():
    states = build_space(params_for())
    assert (states[0].qubit, states[0].n1, states[0].n3) == (0, 0, 0)
    assert states[1].n3 == 1          # mode-3 fastest
    assert states[21].qubit == 1      # qubit flips at the halfway point


def test_ladder_matrix_elements():
    params = params_for()
    ops = build_operators(params)
    i_g10, i_g20 = flat_index(params, 0, 1, 0), flat_index(params, 0, 2, 0)
    assert ops.a1[i_g10, i_g20] == pytest.approx(np.sqrt(2.0), abs=1e-15)
    # a3^2 |g02> = sqrt(2) |g00>
    vec = np.zeros(params.dim)
    vec[flat_index(params, 0, 0, 2)] = 1.0
    out = ops.a3 @ ops.a3 @ vec
    expected = np.zeros(params.dim)
    expected[flat_index(params, 0, 0, 0)] = np.sqrt(2.0)
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_quadratures_hermitian_zero_diagonal():
    ops = build_operators(params_for())
    for op in (ops.x, ops.y, ops.z):
        np.testing.assert_allclose(op, op.T.conj(), atol=1e-15)
        assert np.abs(np.diag(op)).max() == 0.0


def test_bare_limit_diagonal():
    params = params_for(g=0.0)
    h = build_hamiltonian(params)
    assert np.abs(h - np.diag(np.diag(h))).max() == 0.0
    i_g00 = flat_index(params, 0, 0, 0)
    i_g01 = flat_index(params, 0, 0, 1)
    assert h[i_g01, i_g01] - h[i_g00, i_g00] == pytest.approx(
        params.omega_3, rel=1e-15)


def test_hamiltonian_hermitian():
    h = build_hamiltonian(params_for())
    scale = np.abs(h).max()
    assert np.abs(h - h.T.conj()).max() <= 1e-12 * scale


@pytest.mark.parametrize("g,omega_q", [(0.0, 9.1), (0.3, 10.72), (1.0, 9.735)])
def test_parity_conservation(g, omega_q):
    params = params_for(g=g, omega_q=omega_q)
    h = build_hamiltonian(params)
    p = parity_operator(params)
    scale = max(np.abs(h).max(), 1.0)
    assert np.abs(h @ p - p @ h).max() <= 1e-12 * scale


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        tp.SystemParams.from_ghz(-1.0, 3.0, 9.0, 0.3, 0.3)
    with pytest.raises(ValueError):
        tp.SystemParams.from_ghz(10.0, 3.0, 9.0, 0.3, 0.3, n1_max=0)
    with pytest.raises(ValueError):
        flat_index(params_for(), 0, 7, 0)
