"""Minimax off-policy evaluation for multi-armed bandits.

Plug-in, importance-sampling, Switch and Chebyshev estimators; the optimal
plug-in subset; seeded simulators; exact and Monte Carlo risk analysis.
"""

__version__ = "0.1.0"

from .analysis import (
    CompetitiveRatio,
    MseReport,
    SlopeFit,
    binomial_inverse_moment,
    competitive_ratio,
    loglog_slope,
    make_estimator,
    monte_carlo_compare,
    monte_carlo_mse,
    plugin_mse_exact,
    poisson_weighted_mse_exact,
)
from .bandit import (
    INFINITE,
    BanditInstance,
    Dataset,
    Policy,
    likelihood_ratio,
    uniform_policy,
    validate_policy,
    value_function,
)
from .chebyshev import (
    ChebyshevConfig,
    ChebyshevWeights,
    ModelMismatchWarning,
    chebyshev_bias_oracle,
    chebyshev_coefficients,
    chebyshev_estimate,
    weights_for,
)
from .errors import *  # noqa: F401,F403
from .estimators import importance_sampling, plug_in, switch, truncated_is
from .sampler import SeedSpec, draw_dataset, draw_multinomial_dataset, draw_poisson_dataset
from .subset import (
    SwitchSolution,
    brute_force_subset,
    minimax_risk_surrogate,
    solve_optimal_subset,
    switch_mse_upper_bound,
    switch_objective,
)
