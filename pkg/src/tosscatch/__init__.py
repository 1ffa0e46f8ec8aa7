"""Random iterated function systems built from logistic and tent maps:
finite invariant sets, their stationary measures and expected Lyapunov
exponents, and epsilon-cover scans of parameter space."""

from .engine import (
    IfsConfig,
    Trajectory,
    finite_time_lyapunov,
    occupation_frequencies,
    simulate,
    step_log_derivs,
)
from .errors import (
    DomainError,
    EscapeError,
    NonUniqueStationaryError,
    ParameterError,
    SingularDerivativeError,
)
from .geometry import (
    CoverResult,
    ScanGrid,
    ScanSettings,
    bifurcation_scan,
    greedy_cover,
    heatmap_scan,
    scan_cells,
)
from .maps import (
    Map1D,
    MapKind,
    logistic,
    logistic_fixed_point,
    logistic_period2,
    logistic_preimages,
    tent,
    tent_fixed_points,
    tent_period2,
)
from .spectrum import (
    TransitionMatrix,
    build_transition_matrix,
    closed_form_lyapunov,
    expected_lyapunov,
    stationary_distribution,
    sweep_expected_lyapunov,
)
from .structures import (
    FiniteInvariantSet,
    PointLabel,
    TacKind,
    build_tac,
    c2_alpha,
    c3_residuals,
    c5_residuals,
    classify_bridging,
    lt_gamma,
    solve_c3,
    solve_c5,
    verify_invariance,
)

__version__ = "0.1.0"
