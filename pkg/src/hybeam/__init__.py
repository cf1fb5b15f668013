"""Hybrid analog/digital precoder design for angle-of-departure estimation
with limited-resolution phase shifters: Fisher-information angle error
bounds, codebook power allocation, and alternating LS/ADMM decomposition.
"""

from .array_model import UlaGeometry, position_operator, steering, steering_deriv_sin_theta, steering_deriv_theta
from .digital import (
    Codebook,
    PowerAllocation,
    UncertaintySet,
    assemble_f_opt,
    build_codebook,
    max_grid_aeb,
    optimize_power_allocation,
)
from .errors import (
    BoundViolation,
    ConfigError,
    DegenerateBound,
    DimensionMismatch,
    HybeamError,
    InfeasibleGrid,
    NotHermitian,
    SingularFim,
    SingularGram,
    TooFewPilots,
    ZeroBb,
)
from .fisher import ChannelState, aeb, crb, fim
from .hybrid import (
    INFINITE_RESOLUTION,
    AdmmState,
    Diagnostics,
    HybridFactors,
    QuantizerSpec,
    admm_step,
    alt_opt_ls_admm,
    augmented_lagrangian,
    bb_update,
    decomposition_error,
    quantize_phases,
    random_feasible_rf,
    rho_rule,
)
from .numerics import frobenius_norm, left_pseudoinverse, min_max_eigenvalues
from .quantization import QuantBoundReport, quant_bound_factor, verify_quantization_bound

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
