"""Buyer-optimal procurement mechanisms with winner-pay and all-pay costs.

Solvers for optimal symmetric scoring auctions, two-firm score-floor /
score-ceiling / sole-sourcing mechanisms, executable mechanism games with a
Bayes-Nash verifier and Monte Carlo simulator, and restricted-entry analysis.
"""

from .errors import (ScoremechError, InvalidParameter, MissingField,
                     UnknownField, DomainError, OutOfRange, NoRoot,
                     NoConvergence, NonMonotone, SingularEndpoint,
                     BoundaryTie)
from .env import Environment, GFunction, VFunction, make_environment, \
    check_regularity, indirect_cost
from .symmetric import (SymmetricSolution, solve_symmetric, solve_quality_sym,
                        scoring_rule, equilibrium_strategies,
                        buyer_utility_sym, informational_rent,
                        score_slope_comparative)
from .asymmetric import (SeparableEnv, as_separable, Regime, solve_optimal,
                         threshold_floor, threshold_ceiling,
                         utility_at_threshold, utility_symmetric,
                         utility_sole, buyer_utility_asym, censored_outcomes,
                         floor_params, ceiling_params, classify_convexity,
                         classify_regime_ce, regime_boundary_slack,
                         efficient_threshold)
from .auctionsim import (MechanismSpec, StrategyProfile, VerificationReport,
                         SimulationResult, resolve, profit, best_quality,
                         win_probability, verify_bne, simulate,
                         symmetric_profile, floor_profile, ceiling_profile,
                         sole_source_profile)
from .entry import (EntryCurve, utility_restricted,
                    utility_restricted_quadratic, optimal_entry,
                    alpha_crossover, g_condition_holds)

__version__ = "0.1.0"
