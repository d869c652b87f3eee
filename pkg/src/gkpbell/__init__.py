"""Bell tests with finite-energy GKP qubits read out by binned homodyne detection."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    IDENTITY_CHANNEL,
    FiniteEnergyParams,
    NoiseChannel,
    coset_membership,
    envelope_weight,
    lattice_sites,
    params_from_db,
    pauli_trace,
    sign_pattern,
    truncation_radius,
    wigner_value,
)
from .homodyne import (  # noqa: E402
    MeasurementSetting,
    OverlapTable,
    binning_function,
    effective_sigma,
    overlap_table,
    projected_mean,
    single_mode_overlap,
)
from .logical import LogicalState, from_density_matrix, ghz_coefficients, w_coefficients  # noqa: E402
from .behavior import (  # noqa: E402
    Behavior,
    BehaviorError,
    SettingScheme,
    assemble_behavior,
    assemble_correlators,
    full_correlator,
    marginal,
)
from .bell import BellResult, cabello_value, chsh_value, mabk_coefficients, mabk_value  # noqa: E402
from .nogo import SignedPauli, chsh_pauli_max, clifford_group, pauli_pair_correlator, verify_nogo  # noqa: E402
from .simplex import LinearProgram, lp_solve  # noqa: E402
from .polytope import DistanceResult, enumerate_deterministic_behaviors, polytope_distance  # noqa: E402
