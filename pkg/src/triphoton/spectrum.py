"""Dressed spectrum: diagonalization, branch tracking, anticrossing search,
and coherent (dissipationless) Rabi dynamics.

The |g01>/|g30> anticrossing is located by minimizing the splitting of the
two eigenstates carrying the largest weight on span{|g01>, |g30>}; this
selection stays well defined through the crossing where individual bare
overlaps become ambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import SystemOperators, build_hamiltonian, build_operators, flat_index
from .params import TWO_PI, SystemParams

#: Golden-section tolerance on omega_q, 2*pi x 1 kHz.
OMEGA_Q_TOL = TWO_PI * 1e-6

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Eigensystem:
    """Spectrum of H_s with transition matrices in the eigenbasis.

    ``energies`` ascend; column j of ``vectors`` is eigenstate |j>.
    ``x``, ``y``, ``z`` hold <i|X|j>, <i|Y|j>, <i|Z|j>.
    """

    energies: np.ndarray
    vectors: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)

    def transition_energies(self) -> np.ndarray:
        """Matrix of eps_a - eps_b indexed [a, b]."""
        return self.energies[:, None] - self.energies[None, :]


@dataclass(frozen=True)
class LabelResult:
    """Eigenstate assignment for a bare label."""

    index: int
    overlap: float
    runner_up: int
    runner_up_overlap: float
    ambiguous: bool


@dataclass(frozen=True)
class AnticrossingResult:
    """Optimal operating point extracted from the |g01>/|g30> anticrossing."""

    omega_q_opt: float
    g_eff: float
    omega_in_opt: float
    branch_lower: np.ndarray
    branch_upper: np.ndarray
    omega_q_grid: np.ndarray


@dataclass(frozen=True)
class RabiResult:
    """Populations of |g01>, |g30> and everything else over a time grid."""

    times: np.ndarray
    p_g01: np.ndarray
    p_g30: np.ndarray
    p_other: np.ndarray
    period: float | None


def eigendecompose(h: np.ndarray,
                   ops: SystemOperators | None = None) -> Eigensystem:
    """Full spectrum of a Hermitian H, with a fixed eigenvector gauge.

    Raises ValueError for non-Hermitian input or if the residual
    ||H|j> - eps_j|j>|| exceeds 1e-10 * max|eps|.
    """
    scale = np.abs(h).max()
    if scale > 0 and np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    energies, vectors = np.linalg.eigh(h)
    # gauge: largest-magnitude component of each column real positive
    lead = np.argmax(np.abs(vectors), axis=0)
    phase = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    phase[phase == 0] = 1.0
    vectors = vectors * phase
    residual = np.abs(h @ vectors - vectors * energies).max()
    if residual > 1e-10 * max(np.abs(energies).max(), 1.0):
        raise ValueError(f"eigendecomposition residual too large: {residual}")
    if ops is None:
        x = y = z = None
    else:
        x = vectors.T @ ops.x @ vectors
        y = vectors.T @ ops.y @ vectors
        z = vectors.T @ ops.z @ vectors
    return Eigensystem(energies=energies, vectors=vectors, x=x, y=y, z=z)


def eigensystem_for(params: SystemParams) -> Eigensystem:
    """Convenience: operators + Hamiltonian + eigendecomposition."""
    ops = build_operators(params)
    return eigendecompose(build_hamiltonian(params, ops), ops)


def label_state(es: Eigensystem, bare_index: int,
                ambiguity_gap: float = 0.05) -> LabelResult:
    """Assign the eigenstate with maximal overlap |<j|bare>|^2.

    Flags ambiguity when the top two overlaps differ by less than
    ``ambiguity_gap`` (happens at the anticrossing center).
    """
    overlaps = np.abs(es.vectors[bare_index, :]) ** 2
    order = np.argsort(overlaps)
    best, second = int(order[-1]), int(order[-2])
    return LabelResult(
        index=best,
        overlap=float(overlaps[best]),
        runner_up=second,
        runner_up_overlap=float(overlaps[second]),
        ambiguous=bool(overlaps[best] - overlaps[second] < ambiguity_gap),
    )


def _pair_energies(params: SystemParams, omega_q: float,
                   ops: SystemOperators, i01: int, i30: int
                   ) -> tuple[float, float, float]:
    """(eps_lower, eps_upper, eps_ground) of the two eigenstates with the
    largest weight on span{|g01>, |g30>} at the given qubit frequency."""
    h = build_hamiltonian(params.replace_omega_q(omega_q), ops)
    energies, vectors = np.linalg.eigh(h)
    weight = vectors[i01, :] ** 2 + vectors[i30, :] ** 2
    top2 = np.sort(np.argsort(weight)[-2:])
    return energies[top2[0]], energies[top2[1]], energies[0]


def find_optimum(params: SystemParams,
                 window: tuple[float, float],
                 scan_points: int = 81,
                 tol: float = OMEGA_Q_TOL) -> AnticrossingResult:
    """Locate the anticrossing by golden-section search on the splitting.

    ``params.omega_q`` is ignored; the search runs over ``window``
    (rad/ns) which must bracket a single minimum of the splitting.
    A coarse scan of ``scan_points`` points provides the bracket and the
    branch curves; golden-section refines to absolute tolerance ``tol``.

    Returns g_eff = half the minimal splitting and omega_in_opt = mean of
    the two transition energies from the ground level.
    """
    if window[1] <= window[0]:
        raise ValueError("window must satisfy lo < hi")
    ops = build_operators(params)
    i01 = flat_index(params, 0, 0, 1)
    i30 = flat_index(params, 0, 3, 0)

    grid = np.linspace(window[0], window[1], scan_points)
    lower = np.empty(scan_points)
    upper = np.empty(scan_points)
    for k, wq in enumerate(grid):
        e_lo, e_hi, e0 = _pair_energies(params, wq, ops, i01, i30)
        lower[k], upper[k] = e_lo - e0, e_hi - e0
    split = upper - lower
    k_min = int(np.argmin(split))
    if k_min == 0 or k_min == scan_points - 1:
        raise ValueError(
            "window does not bracket a splitting minimum "
            f"(grid argmin at edge, omega_q/2pi = {grid[k_min] / TWO_PI:.4f} GHz)")

    def splitting(wq: float) -> float:
        e_lo, e_hi, _ = _pair_energies(params, wq, ops, i01, i30)
        return e_hi - e_lo

    a, b = grid[k_min - 1], grid[k_min + 1]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = splitting(c), splitting(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = splitting(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = splitting(d)
    omega_q_opt = 0.5 * (a + b)
    e_lo, e_hi, e0 = _pair_energies(params, omega_q_opt, ops, i01, i30)
    return AnticrossingResult(
        omega_q_opt=omega_q_opt,
        g_eff=0.5 * (e_hi - e_lo),
        omega_in_opt=0.5 * (e_hi + e_lo) - e0,
        branch_lower=lower,
        branch_upper=upper,
        omega_q_grid=grid,
    )


def branch_scan(params: SystemParams, omega_q_grid: np.ndarray
                ) -> tuple[np.ndarray, np.ndarray]:
    """Track the |g01> and |g30> branch energies (from ground) over a grid.

    Branches are followed by maximum-overlap continuation against the
    previous grid point's eigenvectors, so each returned row is a
    continuous branch through the anticrossing rather than the sorted
    (lower, upper) pair.
    """
    ops = build_operators(params)
    i01 = flat_index(params, 0, 0, 1)
    i30 = flat_index(params, 0, 3, 0)
    e_g01 = np.empty(len(omega_q_grid))
    e_g30 = np.empty(len(omega_q_grid))
    prev_vecs = None
    prev_idx = None
    for k, wq in enumerate(omega_q_grid):
        h = build_hamiltonian(params.replace_omega_q(wq), ops)
        energies, vectors = np.linalg.eigh(h)
        if prev_vecs is None:
            j01 = int(np.argmax(vectors[i01, :] ** 2))
            j30 = int(np.argmax(vectors[i30, :] ** 2))
        else:
            ov01 = np.abs(prev_vecs[:, prev_idx[0]] @ vectors)
            ov30 = np.abs(prev_vecs[:, prev_idx[1]] @ vectors)
            j01, j30 = int(np.argmax(ov01)), int(np.argmax(ov30))
            if j01 == j30:  # continuation collision: give runner-up to the weaker
                if ov01[j01] >= ov30[j30]:
                    ov30[j30] = -1.0
                    j30 = int(np.argmax(ov30))
                else:
                    ov01[j01] = -1.0
                    j01 = int(np.argmax(ov01))
        e_g01[k] = energies[j01] - energies[0]
        e_g30[k] = energies[j30] - energies[0]
        prev_vecs, prev_idx = vectors, (j01, j30)
    return e_g01, e_g30


def rabi_evolve(es: Eigensystem, params: SystemParams,
                times: np.ndarray) -> RabiResult:
    """Coherent evolution |psi(t)> = sum_j e^{-i eps_j t} |j><j|g01>.

    Returns populations of |g01>, |g30> and the remainder, plus the
    oscillation period extracted from the first return of P_g01 to a
    maximum (parabolic refinement on the sampling grid).
    """
    i01 = flat_index(params, 0, 0, 1)
    i30 = flat_index(params, 0, 3, 0)
    c01 = es.vectors[i01, :]
    c30 = es.vectors[i30, :]
    phases = np.exp(-1j * np.outer(times, es.energies))
    amp01 = phases @ (c01 * c01)
    amp30 = phases @ (c30 * c01)
    p01 = np.abs(amp01) ** 2
    p30 = np.abs(amp30) ** 2
    # total population of the remaining eigenstate content
    norm = np.ones_like(p01)
    p_other = norm - p01 - p30
    return RabiResult(times=times, p_g01=p01, p_g30=p30, p_other=p_other,
                      period=_rabi_period(times, p01))


def _rabi_period(times: np.ndarray, p01: np.ndarray) -> float | None:
    """First-return period of P_g01 via argmax over the return window.

    The oscillation is not purely sinusoidal (fast low-amplitude ripples
    from admixed states), so the return peak is located as the argmax of
    the window after P_g01 has dropped below 0.3 and recovered, then
    refined parabolically.
    """
    below = np.nonzero(p01 < 0.3)[0]
    if len(below) == 0:
        return None
    k_drop = below[0]
    recovered = np.nonzero(p01[k_drop:] > 0.8)[0]
    if len(recovered) == 0:
        return None
    k_back = k_drop + recovered[0]
    k_end = min(len(times), k_back + (k_back - k_drop))
    k_peak = k_back + int(np.argmax(p01[k_back:k_end]))
    if 0 < k_peak < len(times) - 1:
        y0, y1, y2 = p01[k_peak - 1:k_peak + 2]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        dt = times[1] - times[0]
        return float(times[k_peak] + shift * dt)
    return float(times[k_peak])
