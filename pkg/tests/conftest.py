import numpy as np
import pytest

import triphoton as tp

WINDOW_03 = (tp.ghz(10.60), tp.ghz(10.85))
WINDOW_10 = (tp.ghz(9.40), tp.ghz(10.10))


@pytest.fixture(scope="session")
def anti03():
    scen = tp.default_scenario()
    return tp.find_optimum(scen.system_params(), window=WINDOW_03)


@pytest.fixture(scope="session")
def anti10():
    scen = tp.default_scenario().with_updates(g_1=tp.ghz(1.0), g_3=tp.ghz(1.0))
    return tp.find_optimum(scen.system_params(), window=WINDOW_10)


@pytest.fixture(scope="session")
def fig4a(anti03):
    """g = 0.3 GHz operating point with bath tables, 24 retained levels."""
    scen = tp.default_scenario().with_updates(
        omega_q=anti03.omega_q_opt, omega_in=anti03.omega_in_opt, n_lev=24)
    params = scen.system_params()
    es = tp.eigensystem_for(params)
    table = tp.build_self_energy_table(es, scen.channels())
    return scen, params, es, table


@pytest.fixture(scope="session")
def fig4a_pipeline(fig4a):
    scen, params, es, table = fig4a
    drive = scen.drive()
    rt = tp.build_response_tensors(es, table, drive.omega,
                                   n_lev=scen.n_lev, params=params)
    weights = tp.build_flux_weights(es, table, n_lev=rt.n_lev)
    return scen, rt, weights, drive
