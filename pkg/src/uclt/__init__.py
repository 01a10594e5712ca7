"""Toolkit for moment-generating-function calculus, metric entropy, tail
transforms and Monte Carlo diagnostics of martingale-difference random fields."""

from . import errors
from .psi import (
    MomentCurve,
    PsiFunction,
    gaussian_lp_norm,
    gls_norm,
    gls_tail_bound,
    orlicz_n_function,
    psi_bar_conjugate,
    psi_lower_star,
    rosenthal_transform,
    subq_norm,
    young_fenchel,
)
from .covering import (
    FiniteMetricSpace,
    covering_number_exact,
    covering_number_greedy,
    diameter,
    entropy,
    holder_covering_bound,
)
from .distances import (
    PairwiseMomentField,
    distance_bar,
    distance_di,
    distance_matrix,
    natural_function,
    pisier_distance,
    rho_q_distance,
    sigma_squared,
)
from .integrals import (
    EntropyProfile,
    HolderEntropyModel,
    entropy_integral,
    exponent_comparison,
    holder_profile,
    measure_profile,
    pisier_condition,
    power_entropy_integral,
    moment_level_check,
    subq_level_check,
)
from .tails import (
    TailFunction,
    fit_tail_constant,
    uniform_sum_tail_bound,
    subq_tail_equivalence,
    tail_second_moment,
    w_operator,
    weibull_sum_bound,
)
from .simulate import (
    OSEKOWSKI_CONSTANT,
    ROSENTHAL_CONSTANT,
    MartingaleFieldModel,
    SimulationReport,
    clt_diagnostic,
    covariance_estimate,
    equicontinuity_check,
    estimate_moment_curves,
    grid_coords,
    ks_gaussian,
    ks_two_sample,
    martingale_difference_check,
    osekowski_check,
    simulate_eta,
    tail_domination_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
