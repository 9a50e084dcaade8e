"""Deterministic three-photon down-conversion in ultrastrong cavity QED.

Builds the qubit/two-mode Hamiltonian with counter-rotating terms, locates
the |g01>/|g30> anticrossing, solves the driven-dissipative steady state
perturbatively in the drive amplitude, and evaluates input/output photon
fluxes, with independent time-domain and analytic oracles.
"""

__version__ = "0.1.0"

from .params import (BareState, BathChannel, DriveField, SystemParams,
                     ghz, standard_channels, to_ghz)
from .fock import (SystemOperators, build_hamiltonian, build_operators,
                   build_space, flat_index, parity_operator)
from .spectrum import (AnticrossingResult, Eigensystem, LabelResult,
                       RabiResult, branch_scan, eigendecompose,
                       eigensystem_for, find_optimum, label_state,
                       rabi_evolve)
from .bath import (SelfEnergyTable, build_self_energy_table, coupling_xi,
                   self_energy)
from .steady import (FluxResult, FluxWeights, PerturbativeSolution,
                     ResponseTensors, SolverError, build_flux_weights,
                     build_response_tensors, fluxes, linear_response_ratios,
                     saturation_onset, solve_stationary)
from .oracles import (ConvergenceError, RadiationKernelSample,
                      TimeDomainResult, TwoOscillatorParams,
                      radiation_kernel_app, radiation_kernel_compare,
                      radiation_kernel_exact, self_energy_quadrature,
                      time_domain_steady_state, two_oscillator_transmission,
                      two_oscillator_resonant_transmission)
from .scenario import ConfigError, Scenario, default_scenario, load_scenario
