import numpy as np
import pytest

import triphoton as tp
from triphoton.bath import build_self_energy_table
from triphoton.oracles import (TwoOscillatorParams, radiation_kernel_app,
                               radiation_kernel_compare,
                               radiation_kernel_exact,
                               time_domain_steady_state,
                               two_oscillator_resonant_transmission,
                               two_oscillator_transmission)
from triphoton.params import TWO_PI, BathChannel
from triphoton.steady import (build_flux_weights, build_response_tensors,
                              fluxes, solve_stationary)

G_EFF = tp.ghz(222.5e-6)
OMEGA_C = tp.ghz(8.9456)


def osc(kappa_1, kappa_2, omega_in=OMEGA_C, g=G_EFF):
    return TwoOscillatorParams(omega_c=OMEGA_C, g_eff=g, kappa_1=kappa_1,
                               kappa_2=kappa_2, omega_in=omega_in)


class TestTwoOscillator:
    def test_impedance_matched_unit_transmission(self):
        t = two_oscillator_transmission(osc(2 * G_EFF, 2 * G_EFF))
        assert abs(t) == pytest.approx(1.0, abs=1e-12)

    def test_decoupled_output_port(self):
        assert two_oscillator_transmission(osc(2 * G_EFF, 0.0)) == 0.0

    def test_solver_matches_closed_form_on_resonance(self):
        rng = np.random.RandomState(9)
        for _ in range(10):
            k1, k2 = tp.ghz(rng.uniform(1e-5, 1e-2, size=2))
            t = two_oscillator_transmission(osc(k1, k2))
            ref = two_oscillator_resonant_transmission(G_EFF, k1, k2)
            assert t == pytest.approx(ref, rel=1e-12)

    def test_symmetric_kappa_equal_to_paper_operating_point(self):
        # closed form at kappa_1 = kappa_2 = 2pi x 255 kHz, g = 2pi x 222.5 kHz
        t = two_oscillator_transmission(osc(tp.ghz(255e-6), tp.ghz(255e-6)))
        assert abs(t) == pytest.approx(0.86274, abs=5e-5)

    def test_passivity_and_argmax(self):
        kappas = np.linspace(0.1 * G_EFF, 10 * G_EFF, 800)
        tvals = np.array([abs(two_oscillator_resonant_transmission(G_EFF, k, k))
                          for k in kappas])
        assert (tvals <= 1.0 + 1e-12).all()
        k_best = kappas[np.argmax(tvals)]
        assert k_best == pytest.approx(2 * G_EFF, abs=kappas[1] - kappas[0])

    def test_ten_times_off_optimum(self):
        t = two_oscillator_transmission(osc(20 * G_EFF, 20 * G_EFF))
        assert abs(t) < 0.5


class TestRadiationKernel:
    channel = BathChannel("1e", tp.ghz(255e-6), tp.ghz(20.0))

    def test_app_heaviside_structure(self):
        assert radiation_kernel_app(self.channel, -tp.ghz(1.0), 1.0, 4.0) == 0.0
        assert radiation_kernel_app(self.channel, tp.ghz(3.0), -0.5, 4.0) == 0.0
        assert radiation_kernel_app(self.channel, tp.ghz(3.0), 5.0, 4.0) == 0.0
        inside = radiation_kernel_app(self.channel, tp.ghz(3.0), 2.0, 4.0)
        expected = -1j * np.sqrt(TWO_PI) * np.sqrt(self.channel.rate / TWO_PI)
        assert inside == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("eps_ghz", [3.0, 9.0])
    def test_plateau_agreement(self, eps_ghz):
        samples = radiation_kernel_compare(
            self.channel, tp.ghz(eps_ghz), np.linspace(0.6, 3.4, 15), 4.0)
        for s in samples:
            assert abs(s.f_exact - s.f_app) <= 0.15 * abs(s.f_app)

    @pytest.mark.parametrize("eps_ghz", [3.0, 9.0])
    def test_causal_tails(self, eps_ghz):
        bound = 0.15 * np.sqrt(TWO_PI) * np.sqrt(self.channel.rate / TWO_PI)
        for r in (-1.0, -0.2, 4.6, 6.0):
            f = radiation_kernel_exact(self.channel, tp.ghz(eps_ghz), r, 4.0)
            assert abs(f) <= bound

    def test_zero_rate_vanishes(self):
        ch = BathChannel("1e", 0.0, tp.ghz(20.0))
        assert radiation_kernel_exact(ch, tp.ghz(3.0), 1.0, 4.0) == 0.0


class TestTimeDomain:
    def _point(self, n_lev=16):
        # fast-decaying g = 1 GHz operating point keeps transients short
        scen = tp.default_scenario().with_updates(
            g_1=tp.ghz(1.0), g_3=tp.ghz(1.0), omega_q=tp.ghz(9.735),
            omega_in=tp.ghz(8.378), kappa_e=tp.ghz(35.4e-3), n_lev=n_lev)
        params = scen.system_params()
        es = tp.eigensystem_for(params)
        table = build_self_energy_table(es, scen.channels())
        rt = build_response_tensors(es, table, scen.omega_in, n_lev=n_lev,
                                    params=params)
        weights = build_flux_weights(es, table, n_lev=n_lev)
        return scen, rt, weights

    def test_undriven_stays_at_ground(self):
        scen, rt, weights = self._point()
        drive = tp.DriveField(0.0, scen.omega_in)
        res = time_domain_steady_state(rt, weights, drive, t_final=20.0,
                                       steps_per_period=64)
        assert res.f1_out == pytest.approx(0.0, abs=1e-15)
        assert res.f3_out == pytest.approx(0.0, abs=1e-15)
        ground = np.zeros((rt.n_lev, rt.n_lev))
        ground[0, 0] = 1.0
        np.testing.assert_allclose(res.trajectory[-1], ground, atol=1e-9)

    def test_relaxes_from_random_state_to_stationary_solution(self):
        scen, rt, weights = self._point()
        rng = np.random.RandomState(4)
        n = rt.n_lev
        m = rng.randn(n, n) + 1j * rng.randn(n, n)
        s_init = m @ m.conj().T
        s_init /= np.trace(s_init).real
        drive = tp.DriveField(0.0, scen.omega_in)
        res = time_domain_steady_state(rt, weights, drive, t_final=800.0,
                                       steps_per_period=64, initial=s_init)
        sol = solve_stationary(rt, tp.DriveField(1e-6, scen.omega_in), order=1)
        np.testing.assert_allclose(res.trajectory[-1], sol.coefficient(0, 0),
                                   atol=1e-7)

    def test_matches_perturbative_at_weak_drive(self):
        scen, rt, weights = self._point(n_lev=20)
        f_in = tp.saturation_onset(scen.kappa_e, 0.0) * 0.01
        drive = tp.DriveField(np.sqrt(f_in), scen.omega_in)
        sol = solve_stationary(rt, drive, order=2)
        pert = fluxes(sol, weights, drive)
        td = time_domain_steady_state(rt, weights, drive, t_final=400.0)
        assert td.trace_error <= 1e-8
        assert abs(td.f1_ratio - pert.f1_ratio) / pert.f1_ratio <= 0.01
        assert abs(td.f3_ratio - pert.f3_ratio) <= 0.01

    def test_step_halving_stable(self):
        scen, rt, weights = self._point()
        f_in = tp.saturation_onset(scen.kappa_e, 0.0) * 0.01
        drive = tp.DriveField(np.sqrt(f_in), scen.omega_in)
        a = time_domain_steady_state(rt, weights, drive, t_final=400.0,
                                     steps_per_period=64)
        b = time_domain_steady_state(rt, weights, drive, t_final=400.0,
                                     steps_per_period=128)
        assert abs(a.f1_ratio - b.f1_ratio) / b.f1_ratio < 1e-3

    def test_population_decay_rate_in_generator(self):
        # bare one-photon state decays at kappa: diagonal generator element
        params = tp.SystemParams.from_ghz(10.5, 3.0, 9.0, 0.0, 0.0)
        es = tp.eigensystem_for(params)
        kappa = tp.ghz(1e-3)
        table = build_self_energy_table(es, tp.standard_channels(kappa))
        rt = build_response_tensors(es, table, params.omega_3, n_lev=10)
        j = tp.label_state(es, tp.flat_index(params, 0, 1, 0)).index
        assert j < 10
        flat = j * rt.n_lev + j
        assert rt.l1[flat, flat].real == pytest.approx(-kappa, rel=1e-12)
