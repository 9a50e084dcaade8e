"""Self-validation suite: analytic oracles, invariants and cross-checks.

Each check returns a record with the measured and expected values so the
CLI can print an itemized report; ``run_all`` is the entry point behind
the ``validate`` subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import build_self_energy_table, self_energy
from .fock import (build_hamiltonian, build_operators, flat_index,
                   parity_operator)
from .oracles import (TwoOscillatorParams, radiation_kernel_compare,
                      self_energy_quadrature, time_domain_steady_state,
                      two_oscillator_resonant_transmission,
                      two_oscillator_transmission)
from .params import TWO_PI, BathChannel, SystemParams, ghz
from .scenario import Scenario, SweepAxis, default_scenario
from .spectrum import eigensystem_for, find_optimum, label_state
from .steady import (build_flux_weights, build_response_tensors, fluxes,
                     solve_stationary)
from .sweeps import evaluate_point, run_sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: str
    expected: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: measured {self.measured}, expected {self.expected}"


def _check(name: str, passed: bool, measured, expected) -> CheckResult:
    return CheckResult(name, bool(passed), str(measured), str(expected))


def check_radiation_kernel() -> list[CheckResult]:
    """f vs f_app on the causal plateau and outside it, t = 4 ns."""
    out = []
    channel = BathChannel("1e", ghz(255e-6), ghz(20.0))
    t = 4.0
    for eps_ghz in (3.0, 9.0):
        eps = ghz(eps_ghz)
        plateau = np.linspace(0.6, t - 0.6, 18)
        samples = radiation_kernel_compare(channel, eps, plateau, t)
        rel = max(abs(s.f_exact - s.f_app) / abs(s.f_app) for s in samples)
        out.append(_check(f"radiation kernel plateau eps={eps_ghz} GHz",
                          rel <= 0.15, f"max rel dev {rel:.3f}", "<= 0.15"))
        tails = radiation_kernel_compare(channel, eps,
                                         np.array([-1.0, t + 1.0]), t)
        bound = 0.15 * np.sqrt(TWO_PI) * np.sqrt(channel.rate / TWO_PI)
        worst = max(abs(s.f_exact) for s in tails)
        out.append(_check(f"radiation kernel tails eps={eps_ghz} GHz",
                          worst <= bound, f"max |f| {worst:.2e}",
                          f"<= {bound:.2e}"))
    return out


def check_two_oscillator() -> list[CheckResult]:
    out = []
    g = ghz(222.5e-6)
    omega_c = ghz(8.9456)
    kappa_match = 2.0 * g
    t_match = two_oscillator_transmission(TwoOscillatorParams(
        omega_c=omega_c, g_eff=g, kappa_1=kappa_match, kappa_2=kappa_match,
        omega_in=omega_c))
    out.append(_check("two-oscillator matched |T|",
                      abs(abs(t_match) - 1.0) < 1e-12,
                      f"{abs(t_match):.12f}", "1 at sqrt(k1 k2) = 2 g"))
    closed = two_oscillator_resonant_transmission(g, kappa_match, kappa_match)
    out.append(_check("two-oscillator solver vs closed form",
                      abs(t_match - closed) < 1e-12 * abs(closed),
                      f"|diff| {abs(t_match - closed):.2e}", "~0"))
    kappas = np.linspace(0.2 * g, 8.0 * g, 400)
    tvals = np.array([abs(two_oscillator_resonant_transmission(g, k, k))
                      for k in kappas])
    out.append(_check("two-oscillator passivity", (tvals <= 1 + 1e-12).all(),
                      f"max |T| {tvals.max():.12f}", "<= 1"))
    k_best = kappas[int(np.argmax(tvals))]
    out.append(_check("two-oscillator argmax kappa",
                      abs(k_best - 2 * g) <= (kappas[1] - kappas[0]),
                      f"{k_best / g:.3f} g", "2 g"))
    t_off = two_oscillator_transmission(TwoOscillatorParams(
        omega_c=omega_c, g_eff=g, kappa_1=10 * kappa_match,
        kappa_2=10 * kappa_match, omega_in=omega_c))
    out.append(_check("two-oscillator 10x off-optimum |T|",
                      abs(t_off) < 0.5, f"{abs(t_off):.3f}", "< 0.5"))
    return out


def check_self_energy_quadrature(n_random: int = 20) -> list[CheckResult]:
    """Analytic h against principal-value quadrature over both signs."""
    out = []
    rate, cutoff = ghz(255e-6), ghz(20.0)
    analytic = self_energy(rate, cutoff, ghz(9.0))
    expected_im = -(rate / TWO_PI) * np.log(11.0 / 9.0)
    ok = (abs(analytic.real - rate / 2) < 1e-15
          and abs(analytic.imag - expected_im) < 1e-12 * abs(expected_im))
    out.append(_check("self-energy printed example", ok,
                      f"{analytic:.6e}", f"{rate/2:.3e}{expected_im:+.3e}j"))
    rng = np.random.RandomState(7)
    hi_dev = 0.0
    exclude = ghz(0.05)
    count = 0
    while count < n_random:
        eps = ghz(rng.uniform(-15.0, 15.0))
        if min(abs(eps), abs(cutoff - eps)) < exclude:
            continue
        count += 1
        ana = self_energy(rate, cutoff, eps)
        quad = self_energy_quadrature(rate, cutoff, eps)
        scale = max(abs(quad), rate / 2)
        hi_dev = max(hi_dev, abs(ana - quad) / scale)
    out.append(_check("self-energy vs PV quadrature (random)",
                      hi_dev <= 0.01, f"max rel dev {hi_dev:.2e}", "<= 1%"))
    return out


def _fig4a_setup(scenario: Scenario, n_lev: int | None):
    params = scenario.system_params()
    es = eigensystem_for(params)
    table = build_self_energy_table(es, scenario.channels())
    drive = scenario.drive()
    rt = build_response_tensors(es, table, drive.omega, n_lev=n_lev,
                                include_lamb_shift=scenario.lamb_shift,
                                params=params)
    weights = build_flux_weights(es, table, n_lev=rt.n_lev)
    return params, es, rt, weights, drive


def check_invariants() -> list[CheckResult]:
    out = []
    scenario = default_scenario()
    params = scenario.system_params()
    ops = build_operators(params)
    h = build_hamiltonian(params, ops)
    scale = np.abs(h).max()
    out.append(_check("H hermitian", np.abs(h - h.T.conj()).max() <= 1e-12 * scale,
                      f"{np.abs(h - h.T.conj()).max():.2e}", f"<= 1e-12*{scale:.1f}"))
    par = parity_operator(params)
    comm = np.abs(h @ par - par @ h).max()
    out.append(_check("parity conservation", comm <= 1e-12 * scale,
                      f"max |[H,P]| {comm:.2e}", f"<= 1e-12*{scale:.1f}"))
    es = eigensystem_for(params)
    diag = max(np.abs(np.diag(es.x)).max(), np.abs(np.diag(es.y)).max(),
               np.abs(np.diag(es.z)).max())
    out.append(_check("parity selection x_jj = y_jj = z_jj = 0",
                      diag <= 1e-10, f"{diag:.2e}", "<= 1e-10"))
    _, _, rt, _, _ = _fig4a_setup(scenario, None)
    n = rt.n_lev
    trace_rows = np.abs(rt.eta(1).reshape(n, n, n * n)
                        [np.arange(n), np.arange(n), :].sum(axis=0)).max()
    scale1 = np.abs(rt.l1).max()
    out.append(_check("generator annihilates trace",
                      trace_rows <= 1e-10 * scale1,
                      f"{trace_rows:.2e}", f"<= 1e-10*{scale1:.1f}"))
    adj = np.conj(np.transpose(rt.eta(2), (1, 0, 3, 2))).reshape(n * n, n * n)
    out.append(_check("drive tensors hermiticity-paired",
                      np.abs(rt.l3 - adj).max() <= 1e-14,
                      f"{np.abs(rt.l3 - adj).max():.2e}", "<= 1e-14"))
    return out


def check_oracle_agreement(n_lev: int = 24) -> list[CheckResult]:
    """Perturbative vs time-domain fluxes at the down-conversion point."""
    out = []
    scenario = default_scenario().with_updates(n_lev=n_lev)
    anti = find_optimum(scenario.system_params(),
                        window=(ghz(10.6), ghz(10.85)))
    scenario = scenario.with_updates(omega_q=anti.omega_q_opt,
                                     omega_in=anti.omega_in_opt,
                                     f_in=scenario.kappa_e / 40.0 * 0.01)
    _, _, rt, weights, drive = _fig4a_setup(scenario, n_lev)
    sol = solve_stationary(rt, drive, order=2)
    pert = fluxes(sol, weights, drive)
    td = time_domain_steady_state(rt, weights, drive, t_final=9000.0)
    rel = abs(td.f1_ratio - pert.f1_ratio) / pert.f1_ratio
    out.append(_check("time-domain vs perturbative F1 (weak drive)",
                      rel <= 0.01, f"rel dev {rel:.2e}", "<= 1%"))
    out.append(_check("time-domain trace error",
                      td.trace_error <= 1e-8,
                      f"{td.trace_error:.2e}", "<= 1e-8"))
    return out


def check_truncation() -> list[CheckResult]:
    out = []
    base = SystemParams.from_ghz(10.72, 3.0, 9.0, 0.3, 0.3, 6, 2)
    wide = SystemParams.from_ghz(10.72, 3.0, 9.0, 0.3, 0.3, 8, 3)
    es_a = eigensystem_for(base)
    es_b = eigensystem_for(wide)
    rel = []
    for bare in ((0, 0, 1), (0, 3, 0)):
        ia = label_state(es_a, flat_index(base, *bare)).index
        ib = label_state(es_b, flat_index(wide, *bare)).index
        ea = es_a.energies[ia] - es_a.energies[0]
        eb = es_b.energies[ib] - es_b.energies[0]
        rel.append(abs(ea - eb) / abs(eb))
    out.append(_check("truncation convergence (6,2)->(8,3)",
                      max(rel) < 1e-6, f"max rel change {max(rel):.2e}",
                      "< 1e-6"))
    scenario = default_scenario()
    f1_25 = evaluate_point(scenario.with_updates(n_lev=25), {})[0]
    f1_42 = evaluate_point(scenario.with_updates(n_lev=None), {})[0]
    rel_f = abs(f1_25 - f1_42) / abs(f1_42)
    out.append(_check("level retention convergence 25 vs 42",
                      rel_f < 1e-3, f"rel change {rel_f:.2e}", "< 0.1%"))
    return out


def check_step_halving(n_lev: int = 20) -> list[CheckResult]:
    """RK4 dt-halving at the fast-decay (g = 1 GHz) operating point."""
    scenario = default_scenario().with_updates(
        g_1=ghz(1.0), g_3=ghz(1.0), omega_q=ghz(9.735),
        omega_in=ghz(8.378), kappa_e=ghz(35.4e-3), n_lev=n_lev)
    scenario = scenario.with_updates(f_in=scenario.kappa_e / 40.0 * 0.01)
    _, _, rt, weights, drive = _fig4a_setup(scenario, n_lev)
    a = time_domain_steady_state(rt, weights, drive, t_final=400.0,
                                 steps_per_period=64)
    b = time_domain_steady_state(rt, weights, drive, t_final=400.0,
                                 steps_per_period=128)
    rel = abs(a.f1_ratio - b.f1_ratio) / abs(b.f1_ratio)
    return [_check("RK4 step halving", rel < 1e-3,
                   f"rel change {rel:.2e}", "< 0.1%")]


def check_determinism() -> list[CheckResult]:
    out = []
    scenario = default_scenario()
    a = evaluate_point(scenario, {"omega_in": ghz(8.9455)})
    b = evaluate_point(scenario, {"omega_in": ghz(8.9455)})
    out.append(_check("point evaluation deterministic", a == b,
                      "re-run identical" if a == b else f"{a} vs {b}",
                      "bitwise equal"))
    small = scenario.with_updates(n_lev=20, axes=(
        SweepAxis("omega_in", ghz(8.9450), ghz(8.9460), 4),))
    serial = run_sweep(small, workers=1)
    parallel = run_sweep(small, workers=2)
    same = all(s == p for s, p in zip(serial, parallel))
    out.append(_check("parallel/serial equivalence", same,
                      "identical rows" if same else "rows differ",
                      "bitwise equal"))
    return out


def run_all(fast: bool = False) -> list[CheckResult]:
    """Full validation suite; ``fast`` skips the time-domain cross-check."""
    checks = []
    checks += check_radiation_kernel()
    checks += check_two_oscillator()
    checks += check_self_energy_quadrature()
    checks += check_invariants()
    checks += check_truncation()
    checks += check_determinism()
    if not fast:
        checks += check_step_halving()
        checks += check_oracle_agreement()
    return checks
