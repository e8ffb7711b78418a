"""Fractional BDF6 convolution quadrature with a relaxed scalar auxiliary
variable, applied to the time-fractional Allen-Cahn flow on (-1, 1)."""

from .allen_cahn import (
    AllenCahnProblem,
    discrete_K,
    energy,
    extrapolate_B6,
    manufactured_problem,
    nonlinearity,
    potential,
    unforced_problem,
)
from .cq_weights import (
    BDF6_COEFFS,
    Bdf6Symbol,
    CQWeights,
    bdf6_symbol,
    frac_weights,
    history_convolution,
    symbol_eval,
)
from .legendre import (
    Field,
    SpectralSpace,
    build_space,
    eval_at_nodes,
    grad_inner,
    l2_inner,
    linf_nodal,
    project,
    solve_shifted_laplacian,
)
from .multipliers import (
    MULTIPLIERS,
    MultiplierSeries,
    MultiplierSet,
    SymbolCertificate,
    angle_budget,
    q_weights,
    toeplitz_min,
    verify_positive_real,
)
from .stepper import (
    ErrorReport,
    RelaxationBreakdownError,
    SavState,
    StepDiagnostics,
    init_state,
    run,
    step,
)

__version__ = "0.1.0"
