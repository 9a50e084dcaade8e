"""Truncated product Hilbert space and system operators.

Basis ordering is fixed: qubit index slowest, then mode-1 photon number,
then mode-3 photon number, so that

    flat_index = q*(n1_max+1)*(n3_max+1) + m*(n3_max+1) + n

This ordering is part of the serialization contract; downstream matrices
are reproducible bit-for-bit across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import BareState, SystemParams


@dataclass(frozen=True)
class SystemOperators:
    """Dense operators on the truncated product space (all D x D)."""

    a1: np.ndarray
    a3: np.ndarray
    sigma: np.ndarray
    x: np.ndarray   # a1^dag + a1
    y: np.ndarray   # a3^dag + a3
    z: np.ndarray   # sigma^dag + sigma


def build_space(params: SystemParams) -> list[BareState]:
    """Enumerate all basis labels in flat-index order."""
    d1, d3 = params.n1_max + 1, params.n3_max + 1
    states = []
    for q in range(2):
        for m in range(d1):
            for n in range(d3):
                states.append(BareState(q, m, n, q * d1 * d3 + m * d3 + n))
    return states


def flat_index(params: SystemParams, qubit: int, n1: int, n3: int) -> int:
    """Flat index of |q n1 n3> under the documented ordering."""
    d1, d3 = params.n1_max + 1, params.n3_max + 1
    if not (0 <= qubit <= 1 and 0 <= n1 < d1 and 0 <= n3 < d3):
        raise ValueError(f"state ({qubit},{n1},{n3}) outside truncation")
    return qubit * d1 * d3 + n1 * d3 + n3


def build_operators(params: SystemParams) -> SystemOperators:
    """Ladder operators tensored into the full space, plus X, Y, Z."""
    d1, d3 = params.n1_max + 1, params.n3_max + 1
    a1_local = np.diag(np.sqrt(np.arange(1, d1)), 1)
    a3_local = np.diag(np.sqrt(np.arange(1, d3)), 1)
    sig_local = np.array([[0.0, 1.0], [0.0, 0.0]])  # sigma = |g><e|
    i1, i3, iq = np.eye(d1), np.eye(d3), np.eye(2)
    a1 = np.kron(iq, np.kron(a1_local, i3))
    a3 = np.kron(iq, np.kron(i1, a3_local))
    sigma = np.kron(sig_local, np.kron(i1, i3))
    return SystemOperators(
        a1=a1, a3=a3, sigma=sigma,
        x=a1.T + a1, y=a3.T + a3, z=sigma.T + sigma,
    )


def build_hamiltonian(params: SystemParams,
                      ops: SystemOperators | None = None) -> np.ndarray:
    """H = w_q s+s + w_1 a1+a1 + w_3 a3+a3 + g_1 X Z + g_3 Y Z.

    Counter-rotating terms are retained: X Z and Y Z contain a+s+ and a s.
    The result is real symmetric.
    """
    if ops is None:
        ops = build_operators(params)
    h = (params.omega_q * ops.sigma.T @ ops.sigma
         + params.omega_1 * ops.a1.T @ ops.a1
         + params.omega_3 * ops.a3.T @ ops.a3
         + params.g_1 * ops.x @ ops.z
         + params.g_3 * ops.y @ ops.z)
    return h


def parity_operator(params: SystemParams) -> np.ndarray:
    """Total-parity operator exp[i pi (a1+a1 + a3+a3 + s+s)], diagonal +-1."""
    d1, d3 = params.n1_max + 1, params.n3_max + 1
    signs = np.empty(params.dim)
    for q in range(2):
        for m in range(d1):
            for n in range(d3):
                signs[q * d1 * d3 + m * d3 + n] = (-1.0) ** (q + m + n)
    return np.diag(signs)
