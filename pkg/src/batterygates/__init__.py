"""Battery-assisted implementation of non-energy-preserving qubit and qudit gates."""

from .battery import (
    BatteryState,
    ResourceReport,
    ShapeProfile,
    average_ud,
    continuous_ud,
    custom_profile,
    discrete_ud,
    gaussian_profile,
    resource_report,
    sample_ansatz,
    sine_profile,
)
from .channel import (
    BlockUnitary,
    KrausSet,
    choi_infidelity_closed,
    choi_infidelity_exact,
    ground_penalty_infimum,
    ground_state_penalty,
    interaction_lower_bound,
    kraus_set,
    sandwich_check,
    target_copy_unitary,
    uniform_angle_unitary,
    worst_case_infidelity,
)
from .gates import (
    QubitGate,
    QuditGate,
    angles_from_matrix,
    asymmetry_weight,
    gate_from_angles,
    hadamard,
    is_energy_preserving,
    qudit_asymmetry,
)
from .qudit import (
    QuditBlockUnitary,
    qudit_asymptotic_infidelity,
    qudit_choi_infidelity,
    qudit_target_copy,
    scheme_two_compare,
)
from .spectral import (
    DstCoefficients,
    dst_forward,
    dst_inverse,
    infidelity_spectral,
    min_levels_bound,
    optimal_sine_state,
)
from .special import airy_ai, airy_aip
from .variational import (
    ProfileConstants,
    airy_profile,
    coherent_profile,
    coherent_state,
    compute_constants,
    hermite1_profile,
    intrinsic_error,
    qfi_profile,
    resource_bounds,
)

__version__ = "0.1.0"
