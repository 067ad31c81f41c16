"""Steady states, multistability, stability and weak-probe response of a
two-tone-driven optomechanical cavity with cross-Kerr photon-phonon coupling."""

from .dynamics import (
    SettleResult,
    Trajectory,
    integrate_mean_field,
    random_initial_states,
    settle,
)
from .errors import (
    BranchUnavailableError,
    ConfigError,
    FoldNotFoundError,
    OptokerrError,
    ResidualError,
    RootFindingError,
    SingularResponseError,
    StiffnessError,
    StructuralError,
    ZeroCrossingNotFoundError,
)
from .model import (
    HBAR,
    K_B,
    DriveParams,
    SystemParams,
    rabi_from_power,
    thermal_occupancy,
)
from .response import (
    AbsorptionPeak,
    DiscrepancyReport,
    ResponsePoint,
    SidebandAmplitudes,
    absorption_peaks,
    absorption_spectrum,
    aplus_discrepancy_report,
    closed_form_aplus,
    epsilon_T,
    linear_response,
    output_amplitudes,
    select_branch,
    zero_absorption_point,
)
from .stability import (
    DriftMatrix,
    StabilityReport,
    characteristic_coefficients,
    classify,
    classify_roots,
    drift_matrix,
    pattern_is_generic,
    routh_hurwitz_conditions,
    routh_hurwitz_stable,
    stability_pattern,
)
from .steadystate import (
    DescartesReport,
    QuinticCoefficients,
    SteadyState,
    all_steady_states,
    descartes_check,
    phonon_of_photon,
    photon_residual,
    quintic_coefficients,
    raw_coefficients,
    steady_photon_numbers,
    steady_state_from_photon,
    tangency_flags,
)
from .sweep import (
    CkShiftScan,
    DetuningRobustness,
    FoldPoint,
    PhononCurves,
    PowerSweepResult,
    SweepBranch,
    ck_shift_scan,
    detuning_robustness,
    phonon_photon_curve,
    power_sweep,
)

__version__ = "0.1.0"
