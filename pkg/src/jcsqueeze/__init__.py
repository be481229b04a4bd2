"""Jaynes-Cummings atom coupled to a squeezed field: photon statistics,
collapse/revival dynamics and atom-field mutual entropy."""

__version__ = "0.1.0"

from .errors import ConsistencyError, NumericDomainError, TruncationError  # noqa: E402
from .special_fn import ScaledHermite, hermite, log_factorial  # noqa: E402
from .photon_stats import (  # noqa: E402
    PhotonDistribution,
    SqueezedField,
    coherent_distribution,
    distribution_moments,
    fock_amplitudes,
    photon_distribution,
)
from .dynamics import (  # noqa: E402
    AtomMixture,
    LiftedCoefficients,
    ModelParams,
    lifted_coefficients,
    rabi_frequency,
    transition_c,
    transition_s,
)
from .entanglement import (  # noqa: E402
    BranchState,
    DemResult,
    dem_exact,
    dem_paper,
    evolve_branch,
    hermitian_spectrum_small,
    shannon_entropy,
)
from .sweep import SweepResult, SweepRow, SweepSpec, TimeSpec, revival_time, run_sweep  # noqa: E402
