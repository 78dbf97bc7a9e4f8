"""Radiation-reaction position shift of a charge crossing a smooth potential step.

Classical (Lorentz-Dirac) and classical-limit QED routes to the same
position shift, with the machinery to check them against each other.
"""

from .classical_shift import (
    ClassicalShiftResult,
    ShiftRoute,
    compute_classical_shift,
    delta_z_class_tdep,
    delta_z_extra,
    delta_z_green,
    delta_z_LD_direct,
    emitted_energy_larmor,
    work_by_radiation_reaction,
)
from .dynamics import (
    GridControl,
    JacobiField,
    ParticleParams,
    Trajectory,
    TrajectoryState,
    dz_dp_closed_form,
    integrate_trajectory,
    jacobi_field,
    linearized_coefficients,
    lorentz_dirac_force,
    symplectic_product,
)
from .emission import (
    AmplitudeForm,
    CutoffFunction,
    SpectralEnergy,
    SpectrumGrid,
    XiFrame,
    emission_amplitude,
    energy_extrapolated,
    energy_spectral,
    energy_time_domain,
    ramp_artifact,
    spectrum_grid,
    xi_derivatives,
)
from .errors import (
    ConfigError,
    CutoffCoverageError,
    DerivativeStepError,
    DomainError,
    KinematicsError,
    RadiationReactionError,
    TailError,
    ToleranceError,
    TurningPointError,
)
from .potentials import (
    SmoothStepProfile,
    StaticPotentialSpec,
    TimePotentialSpec,
    check_pair,
    eval_static,
    eval_time,
)
from .quantum_shift import (
    Q1Route,
    QuantumShiftResult,
    angular_kernels,
    delta_z_q1_closed,
    delta_z_q1_t,
    delta_z_q1_xi,
    delta_z_q2,
    dp_dP,
    compute_quantum_shift,
)
from .wkb import (
    WkbModeStatic,
    WkbModeTime,
    amplitude_direct_static,
    amplitude_direct_time,
    hbar_convergence,
    kappa,
    phase_integral,
    wkb_validity,
)

__version__ = "0.1.0"
