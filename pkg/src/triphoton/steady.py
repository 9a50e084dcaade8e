"""Driven-dissipative steady state: equation-of-motion tensors, the (p,q)
perturbative expansion in the drive amplitude, and photon fluxes.

The density-matrix element s_ij obeys

    ds_ij/dt = sum_mn [ eta1_ijmn + E*(t) eta2_ijmn + E(t) eta3_ijmn ] s_mn

with E(t) = E_in exp(-i w_in t).  The stationary solution is expanded as
s_ij(t) = sum_pq sbar_ij^(p,q) [E*(t)]^p [E(t)]^q with time-independent
coefficients, solved order by order in p+q; the p = q systems are singular
(the generator annihilates the trace) and are closed by replacing the row
of the (0,0) matrix element with the trace constraint.

Level shifts: by default only the decay (real) parts of the self-energies
enter the tensors.  The cutoff-dependent imaginary parts are treated as
already absorbed into the bare frequencies; pass ``include_lamb_shift=True``
to keep them and study the cutoff dependence explicitly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import zgecon

from .bath import SelfEnergyTable, coupling_xi
from .params import TWO_PI, BathChannel, DriveField, SystemParams
from .spectrum import Eigensystem, label_state
from .fock import flat_index


class SolverError(RuntimeError):
    """The stationary linear system could not be solved."""


@dataclass(frozen=True)
class ResponseTensors:
    """Flattened equation-of-motion generators over the lowest n_lev states.

    ``l1``, ``l2``, ``l3`` are (n_lev^2, n_lev^2) matrices acting on the
    row-major flattening of s_mn; ``l2`` multiplies E*(t), ``l3`` E(t).
    """

    n_lev: int
    energies: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    l3: np.ndarray

    def eta(self, which: int) -> np.ndarray:
        """4-index view eta^{which}_{ijmn} of the flattened generator."""
        mat = {1: self.l1, 2: self.l2, 3: self.l3}[which]
        n = self.n_lev
        return mat.reshape(n, n, n, n)


@dataclass(frozen=True)
class FluxWeights:
    """Quadratic and interference weights of the photon-flux formulas.

    F1_out  = 2pi sum_ij c1[i,j] s_ij
    F3_out  = |E(t)|^2 + 2pi sum_ij c3[i,j] s_ij
              + i sqrt(2pi) sum_ij w_int[i,j] (s_ji E(t) - c.c.)

    with w_int[i,j] = xi3e(eps_j - eps_i) * y_ij.
    """

    n_lev: int
    c1: np.ndarray
    c3: np.ndarray
    w_int: np.ndarray


@dataclass(frozen=True)
class PerturbativeSolution:
    """Stationary expansion coefficients sbar^(p,q), 0 <= p,q <= order."""

    order: int
    omega_in: float
    coefficients: dict[tuple[int, int], np.ndarray] = field(repr=False)

    def coefficient(self, p: int, q: int) -> np.ndarray:
        return self.coefficients[(p, q)]


@dataclass(frozen=True)
class FluxResult:
    """Input/output photon fluxes and derived ratios at a drive amplitude."""

    f_in: float
    f1_out: float
    f3_out: float
    order: int
    last_term_fraction: float

    @property
    def f1_ratio(self) -> float:
        return self.f1_out / self.f_in if self.f_in > 0 else 0.0

    @property
    def f3_ratio(self) -> float:
        return self.f3_out / self.f_in if self.f_in > 0 else 0.0

    @property
    def efficiency(self) -> float:
        """Down-conversion efficiency F1_out / (3 F_in)."""
        return self.f1_ratio / 3.0

    @property
    def conservation_residual(self) -> float:
        """|F1/3 + F3 - F_in| / F_in; zero losses make this nearly vanish."""
        if self.f_in <= 0:
            return 0.0
        return abs(self.f1_out / 3.0 + self.f3_out - self.f_in) / self.f_in

    @property
    def converged(self) -> bool:
        return self.last_term_fraction < 0.05


def _dissipator_blocks(es: Eigensystem, table: SelfEnergyTable,
                       n_lev: int, include_lamb_shift: bool
                       ) -> list[tuple[np.ndarray, np.ndarray]]:
    blocks = []
    for op_key in ("x", "y", "z"):
        w = getattr(es, op_key)[:n_lev, :n_lev]
        h = table.combined(op_key)[:n_lev, :n_lev]
        if not include_lamb_shift:
            h = h.real.astype(complex)
        blocks.append((w, h))
    return blocks


def build_response_tensors(es: Eigensystem, table: SelfEnergyTable,
                           drive_omega: float,
                           n_lev: int | None = None,
                           include_lamb_shift: bool = False,
                           params: SystemParams | None = None
                           ) -> ResponseTensors:
    """Assemble eta^(1,2,3) over the lowest ``n_lev`` eigenstates.

    ``drive_omega`` fixes the coupling density xi^(3e) entering the drive
    tensor.  When ``params`` is given, the construction fails if the
    retained levels do not contain the dressed |g01> and |g30> branches.
    """
    dim = es.dim
    n = dim if n_lev is None else int(n_lev)
    if not 2 <= n <= dim:
        raise ValueError(f"n_lev must be in [2, {dim}]")
    if params is not None:
        for bare in (flat_index(params, 0, 0, 1), flat_index(params, 0, 3, 0)):
            branch = label_state(es, bare).index
            if branch >= n:
                raise ValueError(
                    f"n_lev={n} does not contain the branch of bare state "
                    f"{bare} (eigenstate {branch})")

    eps = es.energies[:n]
    eye = np.eye(n)
    tensor = np.zeros((n, n, n, n), dtype=complex)
    free = 1j * (eps[:, None] - eps[None, :])
    tensor += free[:, :, None, None] * eye[:, None, :, None] * eye[None, :, None, :]
    for w, h in _dissipator_blocks(es, table, n, include_lamb_shift):
        u = w * np.conj(h)            # u[m,i] = w_mi conj(h_mi)
        v = w * h.T                   # v[j,n] = w_jn h_nj
        g = w @ (w * h.T)             # g[j,n] = sum_l w_jl w_ln h_nl
        k = w @ (w * np.conj(h).T)    # k[i,m] = sum_l w_il w_lm conj(h_ml)
        tensor += np.einsum('mi,jn->ijmn', u, w)
        tensor += np.einsum('mi,jn->ijmn', w, v)
        tensor -= np.einsum('im,jn->ijmn', eye, g)
        tensor -= np.einsum('jn,im->ijmn', eye, k)
    l1 = tensor.reshape(n * n, n * n)

    ch3e = _channel(table, "3e")
    sq2pi_xi = np.sqrt(TWO_PI) * coupling_xi(ch3e, drive_omega)
    y = es.y[:n, :n]
    eta2 = 1j * sq2pi_xi * (np.einsum('mi,jn->ijmn', y, eye)
                            - np.einsum('jn,im->ijmn', y, eye))
    # E(t)-coefficient: the Hermiticity adjoint of eta2 (swap (ij)<->(ji),
    # (mn)<->(nm) and conjugate); equals eta2 elementwise for real vectors
    eta3 = np.conj(np.transpose(eta2, (1, 0, 3, 2)))
    return ResponseTensors(
        n_lev=n, energies=eps, l1=l1,
        l2=eta2.reshape(n * n, n * n), l3=eta3.reshape(n * n, n * n))


def _channel(table: SelfEnergyTable, channel_id: str) -> BathChannel:
    for ch in table.channels:
        if ch.channel_id == channel_id:
            return ch
    raise KeyError(f"channel {channel_id!r} missing from table")


def build_flux_weights(es: Eigensystem, table: SelfEnergyTable,
                       n_lev: int | None = None) -> FluxWeights:
    """Precompute the output-flux weight matrices over the retained levels."""
    n = es.dim if n_lev is None else int(n_lev)
    eps = es.energies[:n]
    de = eps[:, None] - eps[None, :]
    xi1 = coupling_xi(_channel(table, "1e"), de)
    xi3 = coupling_xi(_channel(table, "3e"), de)
    x = es.x[:n, :n]
    y = es.y[:n, :n]
    w1 = x * xi1.T                  # w1[m,i] = x_mi xi1(eps_i - eps_m)
    w3 = y * xi3.T
    return FluxWeights(n_lev=n, c1=w1.T @ w1, c3=w3.T @ w3, w_int=xi3.T * y)


def solve_stationary(rt: ResponseTensors, drive: DriveField,
                     order: int = 1,
                     cond_warn: float = 1e-12) -> PerturbativeSolution:
    """Solve the stationary expansion up to ``order`` in each of E* and E.

    Orders are solved in increasing p+q; each (p,q) system shares its LU
    factorization with every other system of the same p-q (the matrices
    differ only through the -i(p-q)w_in shift).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    n = rt.n_lev
    dim = n * n
    diag = np.arange(n) * n + np.arange(n)
    trace_row = np.zeros(dim, dtype=complex)
    trace_row[diag] = 1.0

    lus = {}

    def factor(shift_index: int):
        if shift_index in lus:
            return lus[shift_index]
        a = rt.l1 - 1j * shift_index * drive.omega * np.eye(dim)
        if shift_index == 0:
            a[0, :] = trace_row
        anorm = np.abs(a).sum(axis=0).max()
        lu = lu_factor(a)
        rcond = zgecon(lu[0], anorm)[0]
        if rcond < cond_warn:
            warnings.warn(
                f"stationary system p-q={shift_index} has reciprocal "
                f"condition {rcond:.2e}", RuntimeWarning, stacklevel=2)
        lus[shift_index] = lu
        return lu

    coeffs: dict[tuple[int, int], np.ndarray] = {}
    for total in range(0, 2 * order + 1):
        for p in range(0, order + 1):
            q = total - p
            if q < 0 or q > order:
                continue
            rhs = np.zeros(dim, dtype=complex)
            if p > 0:
                rhs -= rt.l2 @ coeffs[(p - 1, q)].ravel()
            if q > 0:
                rhs -= rt.l3 @ coeffs[(p, q - 1)].ravel()
            if p == q:
                rhs[0] = 1.0 if p == 0 else 0.0
            sol = lu_solve(factor(p - q), rhs)
            if not np.all(np.isfinite(sol)):
                raise SolverError(f"singular stationary system at (p,q)=({p},{q})")
            coeffs[(p, q)] = sol.reshape(n, n)
    return PerturbativeSolution(order=order, omega_in=drive.omega,
                                coefficients=coeffs)


def _series_coefficients(sol: PerturbativeSolution, weights: FluxWeights
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Per-order flux coefficients: F1/F_in = sum_p a[p] F^(p-1), and the
    F3 counterpart (quadratic plus interference, excluding the direct
    |E|^2 term)."""
    pmax = sol.order
    a = np.zeros(pmax + 1)
    b = np.zeros(pmax + 1)
    for p in range(1, pmax + 1):
        spp = sol.coefficient(p, p)
        a[p] = TWO_PI * np.sum(weights.c1 * spp).real
        quad = TWO_PI * np.sum(weights.c3 * spp).real
        sint = sol.coefficient(p, p - 1).T     # sint[i,j] = sbar_ji
        inter = (1j * np.sqrt(TWO_PI)
                 * np.sum(weights.w_int * (sint - np.conj(sint)))).real
        b[p] = quad + inter
    return a, b


def fluxes(sol: PerturbativeSolution, weights: FluxWeights,
           drive: DriveField) -> FluxResult:
    """Evaluate the stationary flux series at the drive amplitude.

    Only combinations with matching powers of E and E* survive time
    averaging; the drive phases cancel by power counting, so each term is
    a pure power of F_in = |E_in|^2.
    """
    a, b = _series_coefficients(sol, weights)
    f = drive.flux
    if f == 0.0:
        return FluxResult(f_in=0.0, f1_out=0.0, f3_out=0.0,
                          order=sol.order, last_term_fraction=0.0)
    powers = f ** np.arange(1, sol.order + 1)
    f1 = float(np.dot(a[1:], powers))
    f3 = f + float(np.dot(b[1:], powers))
    if sol.order >= 2:
        denom = max(abs(f1), abs(f3), f)
        last = (abs(a[-1]) + abs(b[-1])) * powers[-1] / denom
    else:
        last = 0.0   # diagnostic needs at least one correction order
    return FluxResult(f_in=f, f1_out=f1, f3_out=f3,
                      order=sol.order, last_term_fraction=float(last))


def linear_response_ratios(sol: PerturbativeSolution, weights: FluxWeights
                           ) -> tuple[float, float]:
    """Amplitude-independent weak-field ratios (F1_out/F_in, F3_out/F_in).

    Taken from the order-(1,1) and (1,0) coefficients alone, i.e. the
    F_in -> 0 limit of the full series.
    """
    a, b = _series_coefficients(sol, weights)
    return float(a[1]), float(1.0 + b[1])


def saturation_onset(kappa_e: float, delta_omega: float) -> float:
    """Input flux where qubit saturation sets in (photons/ns).

    Estimated from the empty-cavity mean photon number
    nbar = kappa_e F_in / |kappa_e/2 + i dw|^2 reaching ~0.1.
    """
    if kappa_e <= 0:
        raise ValueError("kappa_e must be > 0")
    return ((kappa_e / 2.0) ** 2 + delta_omega ** 2) / (10.0 * kappa_e)
