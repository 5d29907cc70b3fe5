"""Non-Markovianity of open qubit dynamics from local quantum Fisher information."""

from .channels import (
    AmplitudeDampingParams,
    DephasingParams,
    DepolarizingParams,
    ad_amplitude,
    ad_state,
    dephasing_coherence,
    dephasing_rate,
    dephasing_state,
    depol_apply,
    depol_memory,
    depol_probs,
    depol_state_closed,
    evolve,
)
from .linalg import EigenSystem, hermitian_eig, kron, pauli, psd_sqrt
from .measures import b_matrix, brute_force_min, kernel_matrix, lqfi, lqfi_lqu, lqu, qfi, s_matrix, skew_info
from .nonmarkov import (
    IncreaseInterval,
    NonMarkovReport,
    Trajectory,
    channel_report,
    derivative,
    increasing_intervals,
    maximize_over_initial,
    non_markovianity,
    sample_trajectory,
)
from .states import bell_phi_plus, random_state, x_state

__version__ = "0.1.0"
