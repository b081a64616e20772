"""Simulator of ferroelectrically gated quantum-dot exchange operations.

Layers, bottom up: physics (constants and parameter types), optics
(rectified transient fields), dynamics (1-D quantum propagation), exchange
(two-electron splitting, exchange angle, scenario runs), spinreg (n-spin
register), schedule (pulse-program file format and calibration), cli.
"""

from .physics import (
    BARIUM_TITANATE,
    CONSTANTS,
    DEFAULT_LASER,
    LaserParams,
    MaterialParams,
    PhysicalConstants,
    equilibrium_polarization,
    peak_intensity,
)
from .optics import (
    PulseEnvelope,
    TransientPolarization,
    dfg_polarization,
    displacement_b_profile,
    displacement_bmax,
    rectified_polarization_peak,
    rectified_polarization_profile,
    sheet_density,
)
from .dynamics import (
    Grid1D,
    PotentialModel,
    Trajectory,
    TransientTerm,
    Wavefunction,
    evaluate_potential,
    propagate,
    stationary_states,
)
from .exchange import (
    ExchangeTrace,
    ScenarioConfig,
    ScenarioReport,
    TwoElectronProblem,
    adiabatic_leakage,
    calibrate_swap_schedule,
    exchange_angle,
    exchange_splitting,
    exchange_unitary,
    gate_fidelity,
    run_swap_scenario,
    scenario_from_schedule,
    singlet_triplet_energies,
)
from .spinreg import (
    ExchangeEvent,
    SpinState,
    apply_exchange,
    route_swap,
    run_sequence,
    spin_expectations,
)
from .schedule import (
    CalibrationResult,
    Fig3Params,
    PulseSpec,
    Schedule,
    calibrate_pulse,
    canonical_fig3_schedule,
    load_schedule,
    parse_schedule,
    reverse_schedule,
    save_schedule,
    scale_pulses,
    serialize_schedule,
)
from .errors import (
    BudgetError,
    CalibrationError,
    ConvergenceError,
    DomainError,
    EdgeAmplitudeError,
    FerrogateError,
    ParameterError,
    ScheduleError,
)

__version__ = "0.1.0"
