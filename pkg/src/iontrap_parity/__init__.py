"""
Simulation of the parity effect in a trapped ion's xy vibrations and of a
direct, linearized measurement of vibrational mean values through the ion's
internal state.
"""

from .dynamics import (
    ScenarioConfig,
    analytic_jcm_amplitudes,
    analytic_jcm_state,
    evolve,
    evolve_many,
    jcm_hamiltonian,
    probe_hamiltonian,
)
from .hilbert import (
    EXCITED,
    GROUND,
    HermitianOperator,
    Operator,
    SpaceDescriptor,
    build_space,
    correlation_operator,
    identity,
    ladder,
    observable,
    pauli,
    restrict,
    sector_basis,
)
from .measurement import (
    TimeSeries,
    conditional_collapse,
    expectation,
    locate_extremum,
    parity_scan,
)
from .probe import (
    MeasurementReport,
    ProbeConfig,
    choose_probe_time,
    end_to_end,
    estimate_mean,
    linearization_bound,
    rotate_electronic,
    run_direct_measurement,
    sigma_z_readout,
    spectral_sine_expectation,
)
from .states import StateVector, fock_state, qubit_reference, sector_state, su2_coherent

__version__ = "0.1.0"
