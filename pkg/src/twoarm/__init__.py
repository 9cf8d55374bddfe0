"""Exact computation and verification for mirrored two-armed bandits.

The model: two arms X and Y draw payoffs from a pair of finite-support
distributions, with the assignment of distributions to arms decided by an
unknown binary hypothesis carrying a prior. The package computes exact
expected utilities of strategies, optimal values by backward induction,
checks when the posterior-threshold (myopic) rule is optimal, and
cross-validates everything with exhaustive enumeration and seeded
simulation.
"""

from .analysis import (DeltaPoint, Verdict, check_condition_I,
                       condition_slack, conjecture_harness, d_monotonicity_scan,
                       delta_direct, delta_recursive, reachable_wealths,
                       search_counterexample, verify_myopic_optimality,
                       weighted_delta)
from .dp import OptimalValue, ValueQuery, ValueTable, evaluate_policy, \
    optimal_policy_tree, optimal_value
from .errors import (BanditError, ConfigError, EmptyGrid, EnumerationTooLarge,
                     HorizonTooSmall, ImpossibleObservation, InvalidParameters,
                     PolicyHorizonMismatch)
from .model import (Arm, BanditInstance, Belief, FiniteDistribution,
                    Hypothesis, Identity, IndicatorThreshold, Negated,
                    PiecewiseLinear, UtilityFn, expectation_under,
                    mixture_outcome_prob, posterior_update)
from .montecarlo import SimConfig, SimResult, simulate_policy
from .strategies import (BruteForceResult, DecisionTree, PolicyKind,
                         PolicySpec, all_strategy_values, brute_force_value,
                         enumerate_strategies, expand_policy, myopic_decision,
                         policy_arm, tree_at_index, tree_count, tree_from_dict,
                         tree_to_dict)

__version__ = "0.1.0"
