"""Independent cross-checks of the stationary solver and the bath model.

Three oracles:

* direct fixed-step RK4 integration of the same equation of motion, with
  the explicit drive phases, from the ground projector;
* the two-oscillator impedance-matching model solved as a 2x2 linear
  system;
* adaptive quadrature of the waveguide radiation kernel f against its
  closed-form approximation f_app, and principal-value quadrature of the
  self-energy integral.

The time-domain run integrates the identical generator the expansion is
built from, so agreement isolates the perturbative solution as the object
under test.  Because the equation is linear with time-periodic
coefficients, the transient is advanced by binary powers of the one-period
RK4 transition matrix; this reproduces the plain step-by-step RK4
trajectory at period boundaries while keeping hour-long transients
(kappa_e ~ 2pi x 255 kHz) tractable.  The final windows are stepped
explicitly and averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import coupling_xi
from .params import TWO_PI, BathChannel, DriveField
from .steady import FluxWeights, ResponseTensors


class ConvergenceError(RuntimeError):
    """The time-domain flux average has not settled."""


@dataclass(frozen=True)
class TimeDomainResult:
    """Windowed flux averages from direct integration."""

    f_in: float
    f1_out: float
    f3_out: float
    drift: float
    trace_error: float
    times: np.ndarray
    trajectory: np.ndarray    # s samples of the final window, shape (n_t, n, n)

    @property
    def f1_ratio(self) -> float:
        return self.f1_out / self.f_in if self.f_in > 0 else 0.0

    @property
    def f3_ratio(self) -> float:
        return self.f3_out / self.f_in if self.f_in > 0 else 0.0


def _drive_phases(omega: float, dt: float, spp: int) -> np.ndarray:
    """exp(-i w t) at half-step resolution over one drive period."""
    return np.exp(-1j * omega * np.arange(2 * spp + 1) * (dt / 2.0))


def _one_period_map(rt: ResponseTensors, amp: complex, omega: float,
                    dt: float, spp: int) -> np.ndarray:
    """One-period RK4 transition matrix of ds/dt = L(t) s."""
    dim = rt.n_lev ** 2
    eye = np.eye(dim, dtype=complex)
    phases = _drive_phases(omega, dt, spp)

    def l_at(idx: int) -> np.ndarray:
        e_t = amp * phases[idx % (2 * spp)]
        return rt.l1 + np.conj(e_t) * rt.l2 + e_t * rt.l3

    u = eye.copy()
    for k in range(spp):
        a1 = l_at(2 * k)
        a2 = l_at(2 * k + 1)
        a4 = l_at(2 * k + 2)
        k1 = a1
        k2 = a2 @ (eye + 0.5 * dt * k1)
        k3 = a2 @ (eye + 0.5 * dt * k2)
        k4 = a4 @ (eye + dt * k3)
        u = (eye + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)) @ u
    return u


def _apply_power(mat: np.ndarray, n: int, vec: np.ndarray) -> np.ndarray:
    out = vec.copy()
    base = mat
    while n > 0:
        if n & 1:
            out = base @ out
        n >>= 1
        if n:
            base = base @ base
    return out


def _window(rt: ResponseTensors, weights: FluxWeights, amp: complex,
            omega: float, dt: float, spp: int, s0: np.ndarray,
            n_periods: int, record: bool):
    """Step n_periods explicitly, returning flux means and the end state."""
    n = rt.n_lev
    phases = _drive_phases(omega, dt, spp)

    def rhs(idx: int, v: np.ndarray) -> np.ndarray:
        e_t = amp * phases[idx % (2 * spp)]
        return rt.l1 @ v + np.conj(e_t) * (rt.l2 @ v) + e_t * (rt.l3 @ v)

    s = s0.copy()
    n_steps = n_periods * spp
    f1_samples = np.empty(n_steps)
    f3_samples = np.empty(n_steps)
    trace_err = 0.0
    traj = np.empty((n_steps, n, n), dtype=complex) if record else None
    times = np.arange(n_steps) * dt
    for k in range(n_steps):
        idx = 2 * (k % spp)
        sm = s.reshape(n, n)
        e_t = amp * phases[idx]
        f1_samples[k] = TWO_PI * np.sum(weights.c1 * sm).real
        inter = (1j * np.sqrt(TWO_PI)
                 * np.sum(weights.w_int * (sm.T * e_t
                                           - np.conj(sm.T * e_t)))).real
        f3_samples[k] = abs(e_t) ** 2 + TWO_PI * np.sum(weights.c3 * sm).real + inter
        trace_err = max(trace_err, abs(np.trace(sm) - 1.0))
        if record:
            traj[k] = sm
        k1 = rhs(idx, s)
        k2 = rhs(idx + 1, s + 0.5 * dt * k1)
        k3 = rhs(idx + 1, s + 0.5 * dt * k2)
        k4 = rhs(idx + 2, s + dt * k3)
        s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return (float(f1_samples.mean()), float(f3_samples.mean()),
            trace_err, s, times, traj)


def time_domain_steady_state(rt: ResponseTensors, weights: FluxWeights,
                             drive: DriveField, t_final: float,
                             steps_per_period: int = 128,
                             drift_tol: float = 5e-3,
                             average_periods: int = 10,
                             initial: np.ndarray | None = None
                             ) -> TimeDomainResult:
    """Integrate ds/dt from the ground projector and average the fluxes.

    The step divides the drive period exactly (``steps_per_period``
    samples, at least 40 so the drive phase is resolved).  Fluxes are
    averaged over the final ``average_periods`` drive periods; the same
    average one window earlier provides the drift diagnostic, raising
    ConvergenceError above ``drift_tol`` relative drift.  ``initial``
    replaces the default ground-projector start (unit-trace Hermitian
    matrix, cross-check use only).
    """
    if drive.omega <= 0:
        raise ValueError("drive frequency must be positive")
    if steps_per_period < 40:
        raise ValueError("steps_per_period must be >= 40 to resolve the drive")
    period = TWO_PI / drive.omega
    dt = period / steps_per_period
    n_total = max(int(np.ceil(t_final / period)), 2 * average_periods + 1)
    dim = rt.n_lev ** 2
    if initial is None:
        s0 = np.zeros(dim, dtype=complex)
        s0[0] = 1.0
    else:
        s0 = np.asarray(initial, dtype=complex).reshape(dim).copy()

    transient = n_total - 2 * average_periods
    if transient > 4 * average_periods:
        u = _one_period_map(rt, drive.amplitude, drive.omega, dt,
                            steps_per_period)
        s = _apply_power(u, transient, s0)
    else:
        _, _, _, s, _, _ = _window(rt, weights, drive.amplitude, drive.omega,
                                   dt, steps_per_period, s0, transient, False)

    f1_a, f3_a, err_a, s, _, _ = _window(
        rt, weights, drive.amplitude, drive.omega, dt, steps_per_period,
        s, average_periods, False)
    f1_b, f3_b, err_b, _, times, traj = _window(
        rt, weights, drive.amplitude, drive.omega, dt, steps_per_period,
        s, average_periods, True)

    scale = max(abs(f1_b), abs(f3_b), drive.flux, 1e-300)
    drift = max(abs(f1_b - f1_a), abs(f3_b - f3_a)) / scale
    if drive.flux > 0 and drift > drift_tol:
        raise ConvergenceError(
            f"flux average drifting by {drift:.2e} between windows "
            f"(F1: {f1_a:.6e} -> {f1_b:.6e}, F3: {f3_a:.6e} -> {f3_b:.6e}); "
            f"increase t_final")
    return TimeDomainResult(
        f_in=drive.flux, f1_out=f1_b, f3_out=f3_b, drift=float(drift),
        trace_error=float(max(err_a, err_b)), times=times, trajectory=traj)


# ---------------------------------------------------------------------------
# Two-oscillator impedance-matching model

@dataclass(frozen=True)
class TwoOscillatorParams:
    """Two equal-frequency oscillators bridging two waveguides."""

    omega_c: float
    g_eff: float
    kappa_1: float
    kappa_2: float
    omega_in: float

    def __post_init__(self):
        if self.kappa_1 < 0 or self.kappa_2 < 0:
            raise ValueError("decay rates must be >= 0")


def two_oscillator_transmission(p: TwoOscillatorParams) -> complex:
    """Transmission <b_out,2>/<b_in,1> of the stationary 2x2 system."""
    delta = 1j * (p.omega_in - p.omega_c)
    a = np.array([[delta - p.kappa_1 / 2.0, -1j * p.g_eff],
                  [-1j * p.g_eff, delta - p.kappa_2 / 2.0]], dtype=complex)
    rhs = np.array([1j * np.sqrt(p.kappa_1), 0.0], dtype=complex)
    amp = np.linalg.solve(a, rhs)
    return complex(-1j * np.sqrt(p.kappa_2) * amp[1])


def two_oscillator_resonant_transmission(g_eff: float, kappa_1: float,
                                         kappa_2: float) -> complex:
    """Closed form i sqrt(k1 k2) g / (k1 k2 / 4 + g^2) at resonance."""
    return 1j * np.sqrt(kappa_1 * kappa_2) * g_eff / (
        kappa_1 * kappa_2 / 4.0 + g_eff ** 2)


# ---------------------------------------------------------------------------
# Radiation kernel f vs its causal-window approximation

@dataclass(frozen=True)
class RadiationKernelSample:
    """f and f_app at one (eps, r, t) point (waveguide photon velocity 1)."""

    eps: float
    r: float
    t: float
    f_exact: complex
    f_app: complex


def radiation_kernel_app(channel: BathChannel, eps: float, r, t: float):
    """f_app = -i sqrt(2pi) xi_eps theta(eps) theta(r) theta(t-r)."""
    r = np.asarray(r, dtype=float)
    xi = coupling_xi(channel, eps)
    val = np.where((r > 0) & (r < t), -1j * np.sqrt(TWO_PI) * xi, 0.0)
    return val if val.ndim else complex(val)


def _gauss_panels(func, a: float, b: float, max_freq: float,
                  order: int = 12) -> complex:
    """Fixed-order Gauss-Legendre on panels sized to the oscillation.

    Panel width <= pi / (4 max_freq) keeps well under a quarter
    oscillation per panel.
    """
    width = np.pi / (4.0 * max(max_freq, 1.0))
    n_panels = max(int(np.ceil((b - a) / width)), 1)
    edges = np.linspace(a, b, n_panels + 1)
    nodes, wts = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wall = (half[:, None] * wts[None, :]).ravel()
    return complex(np.sum(func(pts) * wall))


def radiation_kernel_exact(channel: BathChannel, eps: float, r: float,
                           t: float) -> complex:
    """Quadrature of f(eps, r, t) over the coupling band.

    The integrand is written with the difference of exponentials kept
    together, so the k = eps point is removable and no principal value is
    needed.
    """
    if channel.rate == 0:
        return 0.0
    xi = np.sqrt(channel.rate / TWO_PI)

    def integrand(k: np.ndarray) -> np.ndarray:
        u = k - eps
        # [exp(iu(r-t)) - exp(iur)] / u, finite at u = 0
        out = np.empty(len(u), dtype=complex)
        small = np.abs(u) < 1e-9
        us = u[~small]
        out[~small] = (np.exp(1j * us * (r - t)) - np.exp(1j * us * r)) / us
        if np.any(small):
            # limit: exp(iur) * (exp(-iut) - 1)/u -> -it at u = 0
            out[small] = -1j * t
        return out

    max_freq = max(abs(r), abs(t - r), 1.0)
    val = _gauss_panels(integrand, 0.0, channel.cutoff, max_freq)
    return complex(xi / np.sqrt(TWO_PI) * val)


def radiation_kernel_compare(channel: BathChannel, eps: float,
                             r_grid: np.ndarray, t: float
                             ) -> list[RadiationKernelSample]:
    """Sample f and f_app over a grid of emission distances."""
    out = []
    for r in np.asarray(r_grid, dtype=float):
        out.append(RadiationKernelSample(
            eps=eps, r=float(r), t=t,
            f_exact=radiation_kernel_exact(channel, eps, float(r), t),
            f_app=complex(radiation_kernel_app(channel, eps, float(r), t))))
    return out


# ---------------------------------------------------------------------------
# Principal-value quadrature oracle for the self-energy

def self_energy_quadrature(rate: float, cutoff: float, eps: float) -> complex:
    """h(eps) with the level-shift integral done numerically.

    The pole term pi xi^2 theta(eps) is algebraic (Sokhotski split); the
    principal-value part -i P int xi_k^2/(k - eps) dk is integrated with
    a symmetric window around the pole so the divergent pieces cancel.
    """
    from scipy.integrate import quad

    if rate == 0:
        return 0.0
    xi2 = rate / TWO_PI
    re = np.pi * xi2 if 0.0 < eps < cutoff else 0.0

    if 0.0 < eps < cutoff:
        delta = 0.45 * min(eps, cutoff - eps)
        left = quad(lambda k: xi2 / (k - eps), 0.0, eps - delta, limit=200)[0]
        right = quad(lambda k: xi2 / (k - eps), eps + delta, cutoff, limit=200)[0]
        pv = left + right   # symmetric window integrates to zero for flat xi^2
    else:
        pv = quad(lambda k: xi2 / (k - eps), 0.0, cutoff, limit=200)[0]
    return complex(re, -pv)
